#include "hvis/overlay.hpp"

#include <algorithm>
#include <cmath>

#include "hvis/error.hpp"
#include "json_util.hpp"

namespace hvis {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

Rgb Image::pixel(int x, int y) const {
    const std::size_t i = 3 * (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                               static_cast<std::size_t>(x));
    return {rgb[i], rgb[i + 1], rgb[i + 2]};
}

Rgb id_color(int id, std::uint64_t palette_seed) {
    const std::uint64_t h = splitmix64(static_cast<std::uint64_t>(id) ^ splitmix64(palette_seed));
    // keep every channel in [64, 255] so colors stand out from the background
    return {static_cast<std::uint8_t>(64 + (h & 0xff) % 192),
            static_cast<std::uint8_t>(64 + ((h >> 8) & 0xff) % 192),
            static_cast<std::uint8_t>(64 + ((h >> 16) & 0xff) % 192)};
}

Image render_overlay(int width, int height, std::span<const OverlayItem> items,
                     std::uint64_t palette_seed) {
    if (width < 1 || height < 1) {
        throw Error(ErrorCode::InvalidDims, "overlay needs positive dimensions");
    }
    for (const auto& item : items) {
        if (item.mask != nullptr && (item.mask->width() != width || item.mask->height() != height)) {
            throw Error(ErrorCode::DimensionMismatch,
                        "mask for id " + std::to_string(item.id) + " does not match the frame");
        }
    }
    Image img{width, height, {}};
    img.rgb.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
    for (std::size_t i = 0; i < img.rgb.size(); i += 3) {
        std::copy(kOverlayBackground.begin(), kOverlayBackground.end(), img.rgb.begin() + i);
    }

    std::vector<const OverlayItem*> order;
    for (const auto& item : items) {
        order.push_back(&item);
    }
    std::stable_sort(order.begin(), order.end(),
                     [](const OverlayItem* a, const OverlayItem* b) { return a->id < b->id; });

    const auto put = [&](int x, int y, const Rgb& c) {
        const std::size_t i = 3 * (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                                   static_cast<std::size_t>(x));
        img.rgb[i] = c[0];
        img.rgb[i + 1] = c[1];
        img.rgb[i + 2] = c[2];
    };

    for (const auto* item : order) {
        if (item->mask == nullptr) {
            continue;
        }
        const Rgb c = id_color(item->id, palette_seed);
        Rgb blended;
        for (int k = 0; k < 3; ++k) {
            blended[k] = static_cast<std::uint8_t>((kOverlayBackground[k] + c[k]) / 2);
        }
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                if (item->mask->at(x, y)) {
                    put(x, y, blended);
                }
            }
        }
    }
    for (const auto* item : order) {
        if (!item->box) {
            continue;
        }
        const Rgb c = id_color(item->id, palette_seed);
        const int x0 = std::max(0, static_cast<int>(std::floor(item->box->x_min)));
        const int y0 = std::max(0, static_cast<int>(std::floor(item->box->y_min)));
        const int x1 = std::min(width - 1, static_cast<int>(std::ceil(item->box->x_max)) - 1);
        const int y1 = std::min(height - 1, static_cast<int>(std::ceil(item->box->y_max)) - 1);
        if (x0 > x1 || y0 > y1) {
            continue;
        }
        for (int x = x0; x <= x1; ++x) {
            put(x, y0, c);
            put(x, y1, c);
        }
        for (int y = y0; y <= y1; ++y) {
            put(x0, y, c);
            put(x1, y, c);
        }
    }
    return img;
}

std::string encode_ppm(const Image& image) {
    std::string out = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) +
                      "\n255\n";
    out.append(reinterpret_cast<const char*>(image.rgb.data()), image.rgb.size());
    return out;
}

void write_ppm(const std::filesystem::path& path, const Image& image) {
    io_detail::write_file(path, encode_ppm(image));
}

}  // namespace hvis
