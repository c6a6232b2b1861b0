#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hvis/mask.hpp"

namespace hvis {

struct FrameItem {
    int id = 0;
    BinaryMask mask;
};

struct FrameResult {
    int frame = 0;
    std::vector<FrameItem> items;
};

struct MaskMatch {
    int pred_id = 0;
    int gt_id = 0;
    double iou = 0.0;

    friend bool operator==(const MaskMatch&, const MaskMatch&) = default;
};

inline constexpr double kMatchIou = 0.5;

// One-to-one greedy matching by descending IoU; only pairs with
// IoU > iou_threshold qualify. Equal IoUs go to the earlier prediction,
// then the earlier ground truth.
std::vector<MaskMatch> match_frame_masks(const FrameResult& pred, const FrameResult& gt,
                                         double iou_threshold = kMatchIou);

struct MotsReport {
    double smotsa = 0.0;
    double motsa = 0.0;
    double motsp = 0.0;
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t ids = 0;
    std::int64_t gt_count = 0;
    double soft_tp = 0.0;
};

// Frames are aligned by frame index; a frame present on one side only
// counts as empty on the other.
MotsReport compute_mots(std::span<const FrameResult> pred, std::span<const FrameResult> gt,
                        double iou_threshold = kMatchIou);

// Sums the raw counts of several sequence reports and recomputes the ratios.
MotsReport combine_reports(std::span<const MotsReport> reports);

struct AnnotatedSequence;  // annotations.hpp

struct ComplexityStats {
    double small_target_fraction = 0.0;
    std::int64_t instance_count = 0;
    std::int64_t overlapping_count = 0;
    std::int64_t tiny = 0;
    std::int64_t medium = 0;
    std::int64_t large = 0;
};

struct StatsConfig {
    std::int64_t tiny_area = 32 * 32;   // area < tiny_area is tiny
    std::int64_t large_area = 96 * 96;  // area > large_area is large
    double overlap_iou_min = 0.0;       // pair overlaps when IoU exceeds this
};

ComplexityStats dataset_stats(std::span<const AnnotatedSequence> dataset,
                              const StatsConfig& cfg = {});

}  // namespace hvis
