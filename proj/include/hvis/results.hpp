#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hvis/box.hpp"
#include "hvis/mask.hpp"
#include "hvis/metrics.hpp"

namespace hvis {

struct ResultItem {
    int id = 0;
    std::optional<Box> box;
    std::optional<BinaryMask> mask;

    friend bool operator==(const ResultItem&, const ResultItem&) = default;
};

struct ResultFrame {
    int frame = 0;
    std::vector<ResultItem> items;

    friend bool operator==(const ResultFrame&, const ResultFrame&) = default;
};

struct ResultSequence {
    std::string video_id;
    int width = 0;
    int height = 0;
    std::vector<ResultFrame> frames;

    friend bool operator==(const ResultSequence&, const ResultSequence&) = default;
};

// Tracking results document:
//   {"format_version": 1,
//    "videos": [{"id": "v0", "width": W, "height": H,
//                "frames": [{"frame": 0,
//                            "items": [{"id": 3, "box": [x0, y0, x1, y1], "rle": [...]}]}]}]}
// "box" and "rle" are each optional. Boxes are written with round-trip
// precision, so load(save(x)) == x.
std::string serialize_results(std::span<const ResultSequence> results);
std::vector<ResultSequence> parse_results(std::string_view text,
                                          std::string_view source = "<memory>");
void save_results(const std::filesystem::path& path, std::span<const ResultSequence> results);
std::vector<ResultSequence> load_results(const std::filesystem::path& path);

// Evaluation view; SchemaError when an item has no mask.
std::vector<FrameResult> to_frame_results(const ResultSequence& sequence);

}  // namespace hvis
