#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hvis/assignment.hpp"
#include "hvis/metrics.hpp"

namespace hvis {

struct AnnotatedFrame {
    int frame = 0;
    std::vector<InstanceAnnotation> instances;
};

struct AnnotatedSequence {
    std::string video_id;
    int width = 0;
    int height = 0;
    std::vector<AnnotatedFrame> frames;
};

// Annotation document:
//   {"format_version": 1,
//    "videos": [{"id": "v0", "width": W, "height": H,
//                "frames": [{"frame": 0,
//                            "instances": [{"id": 1, "rle": [...]},
//                                          {"id": 2, "polygon": [[x, y, ...]]}]}]}]}
// "rle" may also be a space-separated string. Instance ids must be >= 1 and
// unique within a frame (InconsistentIds otherwise).
std::vector<AnnotatedSequence> parse_annotations(std::string_view text,
                                                 std::string_view source = "<memory>");
std::vector<AnnotatedSequence> load_annotations(const std::filesystem::path& path);

// Masks are always written as RLE arrays.
std::string serialize_annotations(std::span<const AnnotatedSequence> dataset);
void save_annotations(const std::filesystem::path& path,
                      std::span<const AnnotatedSequence> dataset);

// Ground truth as evaluation frames.
std::vector<FrameResult> to_frame_results(const AnnotatedSequence& sequence);

}  // namespace hvis
