#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hvis/box.hpp"
#include "hvis/mask.hpp"

namespace hvis {

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr Rgb kOverlayBackground{24, 24, 24};

struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

    Rgb pixel(int x, int y) const;
};

struct OverlayItem {
    int id = 0;
    const BinaryMask* mask = nullptr;  // optional
    std::optional<Box> box;
};

// Identity color: a pure function of (id, seed), so an id keeps its color
// across frames.
Rgb id_color(int id, std::uint64_t palette_seed);

// Masks are blended 50/50 over the background in ascending id order; where
// masks overlap the higher id wins. Box outlines are drawn last, unblended.
Image render_overlay(int width, int height, std::span<const OverlayItem> items,
                     std::uint64_t palette_seed = 0);

// Binary portable pixmap ("P6").
std::string encode_ppm(const Image& image);
void write_ppm(const std::filesystem::path& path, const Image& image);

}  // namespace hvis
