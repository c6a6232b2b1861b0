#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hvis/mask.hpp"

namespace hvis {

// Uncompressed run lengths over the column-major pixel order, starting with
// a run of unset pixels (possibly zero-length).
std::vector<std::uint32_t> rle_encode(const BinaryMask& mask);

// Throws SchemaError when the counts do not cover width * height pixels.
BinaryMask rle_decode(std::span<const std::uint32_t> counts, int width, int height);

// Even-odd fill of one or more rings given as flat [x0, y0, x1, y1, ...]
// lists in continuous pixel coordinates; a pixel is set when its center
// (x + 0.5, y + 0.5) is inside.
BinaryMask rasterize_polygons(std::span<const std::vector<double>> rings, int width, int height);

}  // namespace hvis
