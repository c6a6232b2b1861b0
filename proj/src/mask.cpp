#include "hvis/mask.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "hvis/box.hpp"
#include "hvis/error.hpp"
#include "hvis/kernels.hpp"
#include "hvis/random.hpp"

namespace hvis {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) {
        --q;
    }
    return q;
}

// Nearest integer to num/den (den > 0), halves rounded down.
int round_half_down(std::int64_t num, std::int64_t den) {
    // ceil((2 num - den) / (2 den))
    return static_cast<int>(-floor_div(-(2 * num - den), 2 * den));
}

void require_nonempty(const BinaryMask& mask, const char* what) {
    if (mask.empty()) {
        throw Error(ErrorCode::EmptyMask, std::string(what) + " requires a nonempty mask");
    }
}

}  // namespace

BinaryMask::BinaryMask(int width, int height) : width_(width), height_(height) {
    if (width < 1 || height < 1) {
        throw Error(ErrorCode::InvalidDims, "mask dimensions must be positive, got " +
                                                std::to_string(width) + "x" + std::to_string(height));
    }
    const std::size_t pixels = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    words_.assign((pixels + 63) / 64, 0);
}

BinaryMask::BinaryMask(int width, int height, std::span<const std::uint8_t> bytes)
    : BinaryMask(width, height) {
    if (bytes.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw Error(ErrorCode::DimensionMismatch,
                    "bit count " + std::to_string(bytes.size()) + " does not match " +
                        std::to_string(width) + "x" + std::to_string(height));
    }
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        if (bytes[i] != 0) {
            words_[i >> 6] |= std::uint64_t{1} << (i & 63U);
        }
    }
    for (const std::uint64_t w : words_) {
        area_ += std::popcount(w);
    }
}

void BinaryMask::set(int x, int y, bool value) {
    const std::size_t i = index(x, y);
    std::uint64_t& word = words_[i >> 6];
    const std::uint64_t bit = std::uint64_t{1} << (i & 63U);
    const bool old = (word & bit) != 0;
    if (old == value) {
        return;
    }
    if (value) {
        word |= bit;
        ++area_;
    } else {
        word &= ~bit;
        --area_;
    }
}

BoundingBox mask_bbox(const BinaryMask& mask) {
    require_nonempty(mask, "mask_bbox");
    const auto words = mask.words();
    const auto w = static_cast<std::size_t>(mask.width());
    BoundingBox box{mask.width(), mask.height(), 0, 0};
    for (std::size_t k = 0; k < words.size(); ++k) {
        std::uint64_t word = words[k];
        while (word != 0) {
            const std::size_t i = 64 * k + static_cast<std::size_t>(std::countr_zero(word));
            word &= word - 1;
            const int x = static_cast<int>(i % w);
            const int y = static_cast<int>(i / w);
            box.x_min = std::min(box.x_min, x);
            box.y_min = std::min(box.y_min, y);
            box.x_max = std::max(box.x_max, x + 1);
            box.y_max = std::max(box.y_max, y + 1);
        }
    }
    return box;
}

Point mask_centroid(const BinaryMask& mask) {
    require_nonempty(mask, "mask_centroid");
    std::int64_t sx = 0;
    std::int64_t sy = 0;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (mask.at(x, y)) {
                sx += x;
                sy += y;
            }
        }
    }
    // The squared distance separates per axis, so the nearest lattice point
    // rounds each coordinate independently; rounding halves down realises
    // the (y, x) tie rule.
    return {round_half_down(sx, mask.area()), round_half_down(sy, mask.area())};
}

Point box_center_point(const BoundingBox& box) {
    // pixel-index center is (x_min + x_max - 1) / 2
    return {round_half_down(box.x_min + box.x_max - 1, 2),
            round_half_down(box.y_min + box.y_max - 1, 2)};
}

std::vector<Point> mask_edge_points(const BinaryMask& mask) {
    require_nonempty(mask, "mask_edge_points");
    std::vector<Point> edges;
    const auto unset_or_outside = [&](int x, int y) {
        return !mask.in_bounds(x, y) || !mask.at(x, y);
    };
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y)) {
                continue;
            }
            if (unset_or_outside(x - 1, y) || unset_or_outside(x + 1, y) ||
                unset_or_outside(x, y - 1) || unset_or_outside(x, y + 1)) {
                edges.push_back({x, y});
            }
        }
    }
    return edges;
}

std::vector<Point> sample_edge_points(std::span<const Point> edges, std::size_t k,
                                      std::uint64_t seed) {
    if (edges.empty() || k == 0) {
        throw Error(ErrorCode::EmptyInput, "sample_edge_points needs edges and k >= 1");
    }
    if (k >= edges.size()) {
        return {edges.begin(), edges.end()};
    }
    Rng rng(seed);
    std::vector<Point> sample;
    sample.reserve(k);
    for (std::size_t i : rng.sample_indices(edges.size(), k)) {
        sample.push_back(edges[i]);
    }
    return sample;
}

Point inner_center_of(const BinaryMask& mask, std::span<const Point> edge_sample) {
    require_nonempty(mask, "inner_center");
    if (edge_sample.empty()) {
        throw Error(ErrorCode::EmptyInput, "inner_center needs at least one edge point");
    }
    return kernels::omp::squared_distance_argmin(mask, edge_sample).point;
}

Point inner_center(const BinaryMask& mask, std::size_t k, std::uint64_t seed) {
    const auto edges = mask_edge_points(mask);
    const auto sample = sample_edge_points(edges, k, seed);
    return inner_center_of(mask, sample);
}

std::int64_t intersection_area(const BinaryMask& a, const BinaryMask& b) {
    if (a.width() != b.width() || a.height() != b.height()) {
        throw Error(ErrorCode::DimensionMismatch, "masks differ in size");
    }
    const auto wa = a.words();
    const auto wb = b.words();
    std::int64_t inter = 0;
    for (std::size_t i = 0; i < wa.size(); ++i) {
        inter += std::popcount(wa[i] & wb[i]);
    }
    return inter;
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
    const std::int64_t inter = intersection_area(a, b);
    const std::int64_t uni = a.area() + b.area() - inter;
    if (uni == 0) {
        throw Error(ErrorCode::BothEmpty, "IoU of two empty masks is undefined");
    }
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double box_iou(const Box& a, const Box& b) {
    const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    if (iw <= 0.0 || ih <= 0.0) {
        return 0.0;
    }
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

}  // namespace hvis
