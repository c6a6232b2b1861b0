#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "hvis/mask.hpp"
#include "hvis/random.hpp"

namespace hvis {

enum class Strategy { InsideBox, CenterBox, CentroidMask, InnerCenter };
enum class AmbiguityPolicy { ToNegative, SmallestArea };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);  // "inside-box", "center-box", ...
std::string_view to_string(AmbiguityPolicy p);
AmbiguityPolicy parse_policy(std::string_view name);  // "to-negative", "smallest-area"

inline constexpr int kBackgroundLabel = 0;
inline constexpr int kAmbiguousLabel = -1;

struct FeatureGrid {
    int level = 3;
    int stride = 8;
    int width = 0;
    int height = 0;
    int image_width = 0;
    int image_height = 0;

    std::size_t cell_count() const {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
    friend bool operator==(const FeatureGrid&, const FeatureGrid&) = default;
};

// Levels 3, 4, 5 with strides base, 2 base, 4 base.
std::vector<FeatureGrid> build_grids(int image_width, int image_height, int base_stride);

// Image pixel a grid cell maps to: (cx * stride + stride / 2, cy * stride + stride / 2).
Point cell_center(const FeatureGrid& grid, int cx, int cy);

struct InstanceAnnotation {
    int instance_id = 1;
    BinaryMask mask;
    BoundingBox box;
    int frame = 0;
};

// Fills the box from the mask; throws SchemaError for ids < 1.
InstanceAnnotation make_instance(int instance_id, BinaryMask mask, int frame = 0);

// Level l = 3 + i covers max box side in (upper[i-1], upper[i]].
struct LevelRanges {
    std::vector<double> upper_bounds{64.0, 128.0, std::numeric_limits<double>::infinity()};
};

int level_for_instance(const InstanceAnnotation& instance, const LevelRanges& ranges = {});

struct AssignConfig {
    Strategy strategy = Strategy::InnerCenter;
    std::size_t edge_samples = kDefaultEdgeSamples;
    std::uint64_t seed = kDefaultSeed;
    LevelRanges ranges;
};

// Per-instance bookkeeping kept alongside a grid's labels.
struct InstanceSummary {
    int id = 0;
    std::int64_t area = 0;
    // Strategy center in doubled pixel coordinates (box centers can fall on
    // half pixels). Unused for InsideBox.
    Point center_x2;
};

struct SampleAssignment {
    FeatureGrid grid;
    Strategy strategy = Strategy::InnerCenter;
    // 0 background, >= 1 instance id, -1 ambiguous/eliminated. Row-major.
    std::vector<int> labels;
    // Claimant ids per cell, ascending. Kept after resolution.
    std::vector<std::vector<int>> claims;
    std::vector<InstanceSummary> instances;

    int label(int cx, int cy) const { return labels[index(cx, cy)]; }
    std::size_t index(int cx, int cy) const {
        return static_cast<std::size_t>(cy) * static_cast<std::size_t>(grid.width) +
               static_cast<std::size_t>(cx);
    }
    const InstanceSummary* find_instance(int id) const;
    std::int64_t positive_count() const;
};

// One SampleAssignment per grid. Cells claimed by two or more instances of
// the same level are labelled -1 until resolve_ambiguous runs.
std::vector<SampleAssignment> assign(std::span<const InstanceAnnotation> instances,
                                     std::span<const FeatureGrid> grids, const AssignConfig& cfg);

struct AmbiguousCell {
    int level = 0;
    int cx = 0;
    int cy = 0;
    std::vector<int> ids;

    friend bool operator==(const AmbiguousCell&, const AmbiguousCell&) = default;
};

// Row-major list of cells with two or more claimants.
std::vector<AmbiguousCell> detect_ambiguous(const SampleAssignment& assignment);
std::vector<AmbiguousCell> detect_ambiguous(std::span<const SampleAssignment> assignments);

struct ResolveOptions {
    AmbiguityPolicy policy = AmbiguityPolicy::ToNegative;
    // ToNegative only: true marks cells -1 (excluded from losses), false
    // turns them into plain background (0).
    bool exclude_from_loss = true;
};

SampleAssignment resolve_ambiguous(SampleAssignment assignment, const ResolveOptions& opts = {});

struct PositiveCell {
    int level = 0;
    int cx = 0;
    int cy = 0;
    int id = 0;
};

struct InsideMaskReport {
    double fraction = 0.0;
    std::int64_t positives = 0;
    std::int64_t inside = 0;
    // Positives whose image center misses the owner's mask.
    std::vector<PositiveCell> outside;
};

// Counts without the NoPositives check (fraction is 0 when there are none).
InsideMaskReport count_inside_mask(std::span<const SampleAssignment> assignments,
                                   std::span<const InstanceAnnotation> instances);

InsideMaskReport inside_mask_fraction(std::span<const SampleAssignment> assignments,
                                      std::span<const InstanceAnnotation> instances);

// Adds round(percent% of other's positives), drawn uniformly with `seed`,
// to `base`. A cell whose labels disagree becomes -1.
SampleAssignment mix_positive_sets(const SampleAssignment& base, const SampleAssignment& other,
                                   int percent, std::uint64_t seed = kDefaultSeed);

}  // namespace hvis
