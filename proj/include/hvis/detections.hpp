#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hvis/tracker.hpp"

namespace hvis {

struct DetectionFrame {
    int frame = 0;
    std::vector<Detection> detections;
};

struct DetectionSequence {
    std::string video_id;
    int width = 0;
    int height = 0;
    // One entry per frame 0..num_frames-1, including frames without detections.
    std::vector<DetectionFrame> frames;
};

// Line-delimited records. Each video starts with a header line
//   {"format_version": 1, "type": "video", "video": "v0", "width": W, "height": H, "num_frames": N}
// followed by one line per detection
//   {"type": "detection", "video": "v0", "frame": f, "box": [x0, y0, x1, y1],
//    "score": s, "embedding": [256 numbers], "rle": [...]}      ("rle" optional)
// Embedding components are written with 9 significant digits.
std::string serialize_detections(std::span<const DetectionSequence> sequences);
std::vector<DetectionSequence> parse_detections(std::string_view text,
                                                std::string_view source = "<memory>",
                                                int embedding_dim = 256);
void save_detections(const std::filesystem::path& path,
                     std::span<const DetectionSequence> sequences);
std::vector<DetectionSequence> load_detections(const std::filesystem::path& path,
                                               int embedding_dim = 256);

}  // namespace hvis
