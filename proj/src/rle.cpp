#include "hvis/rle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hvis/error.hpp"

namespace hvis {

std::vector<std::uint32_t> rle_encode(const BinaryMask& mask) {
    const auto w = static_cast<std::size_t>(mask.width());
    const auto h = static_cast<std::size_t>(mask.height());
    std::vector<std::uint32_t> counts;
    bool current = false;
    std::uint64_t run = 0;
    const auto emit = [&](bool v, std::uint64_t len) {
        if (len == 0) {
            return;
        }
        if (v != current) {
            counts.push_back(static_cast<std::uint32_t>(run));
            run = 0;
            current = v;
        }
        run += len;
    };
    if (mask.empty()) {
        emit(false, static_cast<std::uint64_t>(w) * h);
    } else {
        // Pixels outside the bounding box are known to be unset.
        const BoundingBox box = mask_bbox(mask);
        const auto x0 = static_cast<std::size_t>(box.x_min);
        const auto x1 = static_cast<std::size_t>(box.x_max);
        const auto y0 = static_cast<std::size_t>(box.y_min);
        const auto y1 = static_cast<std::size_t>(box.y_max);
        emit(false, static_cast<std::uint64_t>(x0) * h);
        for (std::size_t x = x0; x < x1; ++x) {
            emit(false, y0);
            for (std::size_t y = y0; y < y1; ++y) {
                emit(mask.at(static_cast<int>(x), static_cast<int>(y)), 1);
            }
            emit(false, h - y1);
        }
        emit(false, static_cast<std::uint64_t>(w - x1) * h);
    }
    counts.push_back(static_cast<std::uint32_t>(run));
    return counts;
}

BinaryMask rle_decode(std::span<const std::uint32_t> counts, int width, int height) {
    BinaryMask mask(width, height);
    const auto h = static_cast<std::uint64_t>(height);
    const std::uint64_t total = static_cast<std::uint64_t>(width) * h;
    std::uint64_t pos = 0;
    bool value = false;
    for (std::uint32_t c : counts) {
        if (pos + c > total) {
            throw Error(ErrorCode::SchemaError, "RLE counts exceed " + std::to_string(total) +
                                                    " pixels");
        }
        if (value) {
            for (std::uint64_t p = pos; p < pos + c; ++p) {
                mask.set(static_cast<int>(p / h), static_cast<int>(p % h));
            }
        }
        pos += c;
        value = !value;
    }
    if (pos != total) {
        throw Error(ErrorCode::SchemaError, "RLE counts cover " + std::to_string(pos) + " of " +
                                                std::to_string(total) + " pixels");
    }
    return mask;
}

BinaryMask rasterize_polygons(std::span<const std::vector<double>> rings, int width, int height) {
    BinaryMask mask(width, height);
    for (const auto& ring : rings) {
        if (ring.size() < 6 || ring.size() % 2 != 0) {
            throw Error(ErrorCode::SchemaError, "polygon ring needs >= 3 (x, y) pairs");
        }
    }
    std::vector<double> crossings;
    for (int y = 0; y < height; ++y) {
        const double py = y + 0.5;
        crossings.clear();
        for (const auto& ring : rings) {
            const std::size_t n = ring.size() / 2;
            for (std::size_t i = 0; i < n; ++i) {
                const double x0 = ring[2 * i], y0 = ring[2 * i + 1];
                const double x1 = ring[2 * ((i + 1) % n)], y1 = ring[2 * ((i + 1) % n) + 1];
                // half-open rule so shared vertices count once
                if ((y0 <= py) != (y1 <= py)) {
                    crossings.push_back(x0 + (py - y0) * (x1 - x0) / (y1 - y0));
                }
            }
        }
        std::sort(crossings.begin(), crossings.end());
        for (std::size_t k = 0; k + 1 < crossings.size(); k += 2) {
            // x + 0.5 in [c0, c1)  <=>  ceil(c0 - 0.5) <= x < ceil(c1 - 0.5)
            const int first = std::max(0, static_cast<int>(std::ceil(crossings[k] - 0.5)));
            const int last = std::min(width, static_cast<int>(std::ceil(crossings[k + 1] - 0.5)));
            for (int x = first; x < last; ++x) {
                mask.set(x, y);
            }
        }
    }
    return mask;
}

}  // namespace hvis
