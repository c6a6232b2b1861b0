#pragma once

// Library side of the `hvis` command-line tool. Each subcommand is a
// function of its options so it can be driven from tests as well.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hvis/annotations.hpp"
#include "hvis/assignment.hpp"
#include "hvis/detections.hpp"
#include "hvis/metrics.hpp"
#include "hvis/random.hpp"
#include "hvis/results.hpp"
#include "hvis/synth.hpp"
#include "hvis/tracker.hpp"

namespace hvis::cli {

// "64,128" -> {64, 128, inf}
LevelRanges parse_level_ranges(const std::string& text);

struct InnerCenterOptions {
    std::filesystem::path annotations;
    std::size_t k = kDefaultEdgeSamples;
    std::uint64_t seed = kDefaultSeed;
};

struct CenterRow {
    std::string video;
    int frame = 0;
    int id = 0;
    Point box_center;
    bool box_center_inside = false;
    Point centroid;
    bool centroid_inside = false;
    Point inner;
    bool inner_inside = false;
};

std::vector<CenterRow> inner_center_table(const std::vector<AnnotatedSequence>& dataset,
                                          std::size_t k, std::uint64_t seed);
// Tab-separated table with a header line.
std::string format_center_table(const std::vector<CenterRow>& rows);
std::string run_inner_center(const InnerCenterOptions& opts);

struct AssignOptions {
    std::filesystem::path annotations;
    Strategy strategy = Strategy::InnerCenter;
    ResolveOptions resolve;
    int base_stride = 8;
    LevelRanges ranges;
    std::size_t k = kDefaultEdgeSamples;
    std::uint64_t seed = kDefaultSeed;
    // Mix S_C (center-box) and S_I (inner-center) positives by this percent.
    std::optional<int> mix_percent;
    bool mix_into_inner = false;  // base set is S_I instead of S_C
    std::optional<std::filesystem::path> dump;
    int jobs = 1;
};

struct StrategyCounts {
    Strategy strategy = Strategy::InnerCenter;
    std::int64_t positives = 0;
    std::int64_t inside = 0;
    std::int64_t ambiguous = 0;
    double inside_fraction() const {
        return positives > 0 ? static_cast<double>(inside) / static_cast<double>(positives) : 0.0;
    }
};

// Assign -> detect -> resolve -> count for every frame of the dataset.
StrategyCounts count_strategy(const std::vector<AnnotatedSequence>& dataset, Strategy strategy,
                              const AssignOptions& opts);
std::string run_assign(const AssignOptions& opts);

struct TrackOptions {
    std::filesystem::path detections;
    std::filesystem::path output;
    TrackerConfig tracker;
    std::size_t top_k = 100;
    double score_threshold = 0.0;
    std::optional<std::filesystem::path> overlay_dir;
    std::uint64_t palette_seed = kDefaultSeed;
    int jobs = 1;
};

std::vector<ResultSequence> track_sequences(std::vector<DetectionSequence> sequences,
                                            const TrackOptions& opts);
std::string run_track(const TrackOptions& opts);

struct EvalOptions {
    std::filesystem::path results;
    std::filesystem::path annotations;
    double iou_threshold = kMatchIou;
    std::optional<std::filesystem::path> report;
    int jobs = 1;
};

struct EvalOutcome {
    MotsReport total;
    std::vector<std::pair<std::string, MotsReport>> per_video;
};

EvalOutcome evaluate(const std::vector<ResultSequence>& results,
                     const std::vector<AnnotatedSequence>& gt, double iou_threshold, int jobs);
std::string format_report_json(const EvalOutcome& outcome);
std::string run_eval(const EvalOptions& opts);

struct StatsOptions {
    std::filesystem::path annotations;
    StatsConfig stats;
};

std::string run_stats(const StatsOptions& opts);

struct SynthOptions {
    SynthConfig config;
    std::filesystem::path ground_truth;
    std::optional<std::filesystem::path> detections;
    // Generate the occluded-people corpus instead of a tracking scene.
    bool occlusion_corpus = false;
    int scenes = 50;
};

std::string run_synth(const SynthOptions& opts);

}  // namespace hvis::cli
