#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hvis/random.hpp"

namespace hvis {

struct Point {
    int x = 0;
    int y = 0;

    friend bool operator==(const Point&, const Point&) = default;
};

// Row-major ordering (y first, then x); used for all deterministic tie-breaks.
inline bool row_major_less(const Point& a, const Point& b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
}

// Pixel box, max edges exclusive.
struct BoundingBox {
    int x_min = 0;
    int y_min = 0;
    int x_max = 0;
    int y_max = 0;

    int width() const { return x_max - x_min; }
    int height() const { return y_max - y_min; }
    bool valid() const { return x_min < x_max && y_min < y_max; }
    bool contains(Point p) const {
        return p.x >= x_min && p.x < x_max && p.y >= y_min && p.y < y_max;
    }

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

// Row-major occupancy grid packed into 64-bit words: pixel i = y * width + x
// is bit i % 64 of word i / 64, and bits past width * height stay zero. The
// set-pixel count is maintained on every write so area() is O(1).
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height);
    // One byte per pixel, row-major; nonzero means set.
    BinaryMask(int width, int height, std::span<const std::uint8_t> bytes);

    int width() const { return width_; }
    int height() const { return height_; }
    std::int64_t area() const { return area_; }
    bool empty() const { return area_ == 0; }

    bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
    bool at(int x, int y) const {
        const std::size_t i = index(x, y);
        return ((words_[i >> 6] >> (i & 63U)) & 1U) != 0;
    }
    bool at(Point p) const { return at(p.x, p.y); }
    // In-bounds and set.
    bool contains(Point p) const { return in_bounds(p.x, p.y) && at(p); }

    void set(int x, int y, bool value = true);

    std::span<const std::uint64_t> words() const { return words_; }

    friend bool operator==(const BinaryMask& a, const BinaryMask& b) {
        return a.width_ == b.width_ && a.height_ == b.height_ && a.words_ == b.words_;
    }

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::int64_t area_ = 0;
    std::vector<std::uint64_t> words_;
};

inline constexpr std::size_t kDefaultEdgeSamples = 64;

BoundingBox mask_bbox(const BinaryMask& mask);

// Integer point nearest to the mean of the set pixels; ties resolve toward
// smaller y, then smaller x. May be an unset pixel for concave masks.
Point mask_centroid(const BinaryMask& mask);

// Box center rounded with the same half-down rule as mask_centroid.
Point box_center_point(const BoundingBox& box);

// Set pixels with at least one 4-neighbour that is unset or off-grid,
// in row-major order.
std::vector<Point> mask_edge_points(const BinaryMask& mask);

// Uniform sample of k edges without replacement (all of them when
// k >= edges.size()). Preserves the input order of the chosen points.
std::vector<Point> sample_edge_points(std::span<const Point> edges, std::size_t k,
                                      std::uint64_t seed);

// Set pixel minimising the sum of squared distances to `edge_sample`,
// ties by (y, x). Evaluated with exact integer arithmetic.
Point inner_center_of(const BinaryMask& mask, std::span<const Point> edge_sample);

// Inner center of a mask using k randomly sampled edge points.
Point inner_center(const BinaryMask& mask, std::size_t k = kDefaultEdgeSamples,
                   std::uint64_t seed = kDefaultSeed);

std::int64_t intersection_area(const BinaryMask& a, const BinaryMask& b);

double mask_iou(const BinaryMask& a, const BinaryMask& b);

}  // namespace hvis
