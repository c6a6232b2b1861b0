#include "hvis/assignment.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "hvis/error.hpp"

namespace hvis {

std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::InsideBox: return "inside-box";
        case Strategy::CenterBox: return "center-box";
        case Strategy::CentroidMask: return "centroid-mask";
        case Strategy::InnerCenter: return "inner-center";
    }
    return "unknown";
}

Strategy parse_strategy(std::string_view name) {
    for (auto s : {Strategy::InsideBox, Strategy::CenterBox, Strategy::CentroidMask,
                   Strategy::InnerCenter}) {
        if (to_string(s) == name) {
            return s;
        }
    }
    throw Error(ErrorCode::InvalidConfig, "unknown strategy '" + std::string(name) + "'");
}

std::string_view to_string(AmbiguityPolicy p) {
    return p == AmbiguityPolicy::ToNegative ? "to-negative" : "smallest-area";
}

AmbiguityPolicy parse_policy(std::string_view name) {
    if (name == "to-negative") {
        return AmbiguityPolicy::ToNegative;
    }
    if (name == "smallest-area") {
        return AmbiguityPolicy::SmallestArea;
    }
    throw Error(ErrorCode::InvalidConfig, "unknown policy '" + std::string(name) + "'");
}

std::vector<FeatureGrid> build_grids(int image_width, int image_height, int base_stride) {
    if (base_stride < 1 || image_width < base_stride || image_height < base_stride) {
        throw Error(ErrorCode::InvalidDims,
                    "need base_stride >= 1 and image dims >= base_stride (got " +
                        std::to_string(image_width) + "x" + std::to_string(image_height) +
                        ", stride " + std::to_string(base_stride) + ")");
    }
    std::vector<FeatureGrid> grids;
    for (int i = 0; i < 3; ++i) {
        const int stride = base_stride << i;
        grids.push_back({3 + i, stride, (image_width + stride - 1) / stride,
                         (image_height + stride - 1) / stride, image_width, image_height});
    }
    return grids;
}

Point cell_center(const FeatureGrid& grid, int cx, int cy) {
    if (cx < 0 || cy < 0 || cx >= grid.width || cy >= grid.height) {
        throw Error(ErrorCode::OutOfRange, "cell (" + std::to_string(cx) + "," +
                                               std::to_string(cy) + ") outside " +
                                               std::to_string(grid.width) + "x" +
                                               std::to_string(grid.height) + " grid");
    }
    return {cx * grid.stride + grid.stride / 2, cy * grid.stride + grid.stride / 2};
}

InstanceAnnotation make_instance(int instance_id, BinaryMask mask, int frame) {
    if (instance_id < 1) {
        throw Error(ErrorCode::SchemaError,
                    "instance ids start at 1, got " + std::to_string(instance_id));
    }
    InstanceAnnotation inst;
    inst.instance_id = instance_id;
    inst.box = mask_bbox(mask);
    inst.mask = std::move(mask);
    inst.frame = frame;
    return inst;
}

int level_for_instance(const InstanceAnnotation& instance, const LevelRanges& ranges) {
    const double side = std::max(instance.box.width(), instance.box.height());
    for (std::size_t i = 0; i < ranges.upper_bounds.size(); ++i) {
        if (side <= ranges.upper_bounds[i]) {
            return 3 + static_cast<int>(i);
        }
    }
    // ranges are exhaustive by contract; route leftovers to the coarsest level
    return 2 + static_cast<int>(ranges.upper_bounds.size());
}

const InstanceSummary* SampleAssignment::find_instance(int id) const {
    for (const auto& s : instances) {
        if (s.id == id) {
            return &s;
        }
    }
    return nullptr;
}

std::int64_t SampleAssignment::positive_count() const {
    return std::count_if(labels.begin(), labels.end(), [](int l) { return l >= 1; });
}

namespace {

Point strategy_center_x2(const InstanceAnnotation& inst, const AssignConfig& cfg) {
    switch (cfg.strategy) {
        case Strategy::InsideBox:
            return {};
        case Strategy::CenterBox:
            return {inst.box.x_min + inst.box.x_max - 1, inst.box.y_min + inst.box.y_max - 1};
        case Strategy::CentroidMask: {
            const Point c = mask_centroid(inst.mask);
            return {2 * c.x, 2 * c.y};
        }
        case Strategy::InnerCenter: {
            const Point c = inner_center(inst.mask, cfg.edge_samples, cfg.seed);
            return {2 * c.x, 2 * c.y};
        }
    }
    return {};
}

bool claims_cell(const InstanceAnnotation& inst, Strategy strategy, Point center_x2,
                 Point pixel, int stride) {
    if (strategy == Strategy::InsideBox) {
        return inst.box.contains(pixel);
    }
    // Chebyshev distance <= stride / 2, in doubled coordinates
    return std::abs(2 * pixel.x - center_x2.x) <= stride &&
           std::abs(2 * pixel.y - center_x2.y) <= stride;
}

}  // namespace

std::vector<SampleAssignment> assign(std::span<const InstanceAnnotation> instances,
                                     std::span<const FeatureGrid> grids, const AssignConfig& cfg) {
    std::vector<SampleAssignment> out;
    out.reserve(grids.size());
    for (const auto& g : grids) {
        SampleAssignment a;
        a.grid = g;
        a.strategy = cfg.strategy;
        a.labels.assign(g.cell_count(), kBackgroundLabel);
        a.claims.assign(g.cell_count(), {});
        out.push_back(std::move(a));
    }

    for (const auto& inst : instances) {
        if (out.empty()) {
            break;
        }
        const FeatureGrid& ref = out.front().grid;
        if (inst.mask.width() != ref.image_width || inst.mask.height() != ref.image_height) {
            throw Error(ErrorCode::MaskOutOfBounds,
                        "instance " + std::to_string(inst.instance_id) + " mask is " +
                            std::to_string(inst.mask.width()) + "x" +
                            std::to_string(inst.mask.height()) + ", image is " +
                            std::to_string(ref.image_width) + "x" +
                            std::to_string(ref.image_height));
        }
        const int level = level_for_instance(inst, cfg.ranges);
        auto it = std::find_if(out.begin(), out.end(),
                               [&](const SampleAssignment& a) { return a.grid.level == level; });
        if (it == out.end()) {
            throw Error(ErrorCode::GridMismatch,
                        "no feature grid for level " + std::to_string(level));
        }
        SampleAssignment& a = *it;
        const Point center_x2 = strategy_center_x2(inst, cfg);
        a.instances.push_back({inst.instance_id, inst.mask.area(), center_x2});

        const FeatureGrid& g = a.grid;
        for (int cy = 0; cy < g.height; ++cy) {
            for (int cx = 0; cx < g.width; ++cx) {
                const Point pixel = cell_center(g, cx, cy);
                if (!claims_cell(inst, cfg.strategy, center_x2, pixel, g.stride)) {
                    continue;
                }
                auto& claim = a.claims[a.index(cx, cy)];
                claim.insert(std::upper_bound(claim.begin(), claim.end(), inst.instance_id),
                             inst.instance_id);
            }
        }
    }

    for (auto& a : out) {
        for (std::size_t i = 0; i < a.claims.size(); ++i) {
            const auto& claim = a.claims[i];
            if (claim.size() == 1) {
                a.labels[i] = claim.front();
            } else if (claim.size() > 1) {
                a.labels[i] = kAmbiguousLabel;
            }
        }
    }
    return out;
}

std::vector<AmbiguousCell> detect_ambiguous(const SampleAssignment& assignment) {
    std::vector<AmbiguousCell> cells;
    const auto& g = assignment.grid;
    for (int cy = 0; cy < g.height; ++cy) {
        for (int cx = 0; cx < g.width; ++cx) {
            const auto& claim = assignment.claims[assignment.index(cx, cy)];
            if (claim.size() >= 2) {
                cells.push_back({g.level, cx, cy, claim});
            }
        }
    }
    return cells;
}

std::vector<AmbiguousCell> detect_ambiguous(std::span<const SampleAssignment> assignments) {
    std::vector<AmbiguousCell> cells;
    for (const auto& a : assignments) {
        auto part = detect_ambiguous(a);
        cells.insert(cells.end(), part.begin(), part.end());
    }
    return cells;
}

SampleAssignment resolve_ambiguous(SampleAssignment assignment, const ResolveOptions& opts) {
    for (std::size_t i = 0; i < assignment.claims.size(); ++i) {
        const auto& claim = assignment.claims[i];
        if (claim.size() < 2) {
            continue;
        }
        if (opts.policy == AmbiguityPolicy::ToNegative) {
            assignment.labels[i] = opts.exclude_from_loss ? kAmbiguousLabel : kBackgroundLabel;
            continue;
        }
        int winner = claim.front();
        std::int64_t best_area = std::numeric_limits<std::int64_t>::max();
        for (int id : claim) {  // ascending, so ties keep the smaller id
            const auto* s = assignment.find_instance(id);
            const std::int64_t area = s != nullptr ? s->area : 0;
            if (area < best_area) {
                best_area = area;
                winner = id;
            }
        }
        assignment.labels[i] = winner;
    }
    return assignment;
}

InsideMaskReport count_inside_mask(std::span<const SampleAssignment> assignments,
                                   std::span<const InstanceAnnotation> instances) {
    InsideMaskReport report;
    for (const auto& a : assignments) {
        const auto& g = a.grid;
        for (int cy = 0; cy < g.height; ++cy) {
            for (int cx = 0; cx < g.width; ++cx) {
                const int id = a.label(cx, cy);
                if (id < 1) {
                    continue;
                }
                ++report.positives;
                const Point pixel = cell_center(g, cx, cy);
                const auto owner =
                    std::find_if(instances.begin(), instances.end(),
                                 [&](const InstanceAnnotation& i) { return i.instance_id == id; });
                if (owner != instances.end() && owner->mask.contains(pixel)) {
                    ++report.inside;
                } else {
                    report.outside.push_back({g.level, cx, cy, id});
                }
            }
        }
    }
    if (report.positives > 0) {
        report.fraction =
            static_cast<double>(report.inside) / static_cast<double>(report.positives);
    }
    return report;
}

InsideMaskReport inside_mask_fraction(std::span<const SampleAssignment> assignments,
                                      std::span<const InstanceAnnotation> instances) {
    auto report = count_inside_mask(assignments, instances);
    if (report.positives == 0) {
        throw Error(ErrorCode::NoPositives, "assignment has no positive cells");
    }
    return report;
}

SampleAssignment mix_positive_sets(const SampleAssignment& base, const SampleAssignment& other,
                                   int percent, std::uint64_t seed) {
    if (!(base.grid == other.grid) || base.labels.size() != other.labels.size()) {
        throw Error(ErrorCode::GridMismatch, "cannot mix assignments on different grids");
    }
    if (percent < 0 || percent > 100) {
        throw Error(ErrorCode::InvalidConfig,
                    "mix percentage must be in [0, 100], got " + std::to_string(percent));
    }
    std::vector<std::size_t> donors;
    for (std::size_t i = 0; i < other.labels.size(); ++i) {
        if (other.labels[i] >= 1) {
            donors.push_back(i);
        }
    }
    // round half up of percent * n / 100
    const std::size_t take = (static_cast<std::size_t>(percent) * donors.size() + 50) / 100;

    SampleAssignment mixed = base;
    Rng rng(seed);
    for (std::size_t pick : rng.sample_indices(donors.size(), take)) {
        const std::size_t cell = donors[pick];
        const int incoming = other.labels[cell];
        int& label = mixed.labels[cell];
        auto& claim = mixed.claims[cell];
        if (std::find(claim.begin(), claim.end(), incoming) == claim.end()) {
            claim.insert(std::upper_bound(claim.begin(), claim.end(), incoming), incoming);
        }
        if (label == kBackgroundLabel) {
            label = incoming;
        } else if (label != incoming) {
            label = kAmbiguousLabel;
        }
    }
    for (const auto& s : other.instances) {
        if (mixed.find_instance(s.id) == nullptr) {
            mixed.instances.push_back(s);
        }
    }
    return mixed;
}

}  // namespace hvis
