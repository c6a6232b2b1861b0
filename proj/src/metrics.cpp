#include "hvis/metrics.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>

#include "hvis/annotations.hpp"
#include "hvis/error.hpp"
#include "hvis/kernels.hpp"

namespace hvis {

namespace {

std::vector<const BinaryMask*> mask_ptrs(const FrameResult& f) {
    std::vector<const BinaryMask*> out;
    out.reserve(f.items.size());
    for (const auto& item : f.items) {
        out.push_back(&item.mask);
    }
    return out;
}

void finish(MotsReport& r) {
    r.fn = r.gt_count - r.tp;
    if (r.gt_count > 0) {
        const double gt = static_cast<double>(r.gt_count);
        r.motsa = static_cast<double>(r.tp - r.fp - r.ids) / gt;
        r.smotsa = (r.soft_tp - static_cast<double>(r.fp + r.ids)) / gt;
    }
    r.motsp = r.tp > 0 ? r.soft_tp / static_cast<double>(r.tp) : 0.0;
}

}  // namespace

std::vector<MaskMatch> match_frame_masks(const FrameResult& pred, const FrameResult& gt,
                                         double iou_threshold) {
    const auto p = mask_ptrs(pred);
    const auto g = mask_ptrs(gt);
    const auto inter = kernels::omp::intersection_matrix(p, g);

    struct Candidate {
        double iou;
        std::size_t pi;
        std::size_t gi;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) {
            const std::int64_t in = inter(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            const std::int64_t uni = p[i]->area() + g[j]->area() - in;
            if (uni == 0) {
                continue;
            }
            const double iou = static_cast<double>(in) / static_cast<double>(uni);
            if (iou > iou_threshold) {
                candidates.push_back({iou, i, j});
            }
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.iou != b.iou) {
            return a.iou > b.iou;
        }
        return a.pi != b.pi ? a.pi < b.pi : a.gi < b.gi;
    });
    std::vector<char> pred_used(p.size(), 0);
    std::vector<char> gt_used(g.size(), 0);
    std::vector<MaskMatch> matches;
    for (const auto& c : candidates) {
        if (pred_used[c.pi] || gt_used[c.gi]) {
            continue;
        }
        pred_used[c.pi] = gt_used[c.gi] = 1;
        matches.push_back({pred.items[c.pi].id, gt.items[c.gi].id, c.iou});
    }
    return matches;
}

MotsReport compute_mots(std::span<const FrameResult> pred, std::span<const FrameResult> gt,
                        double iou_threshold) {
    std::map<int, const FrameResult*> pred_by_frame;
    std::map<int, const FrameResult*> gt_by_frame;
    for (const auto& f : pred) {
        pred_by_frame[f.frame] = &f;
    }
    for (const auto& f : gt) {
        gt_by_frame[f.frame] = &f;
    }
    std::set<int> frames;
    for (const auto& [k, v] : pred_by_frame) frames.insert(k);
    for (const auto& [k, v] : gt_by_frame) frames.insert(k);

    MotsReport r;
    std::map<int, int> last_pred_for_gt;
    const FrameResult empty;
    for (int frame : frames) {
        const auto pit = pred_by_frame.find(frame);
        const auto git = gt_by_frame.find(frame);
        const FrameResult& pf = pit != pred_by_frame.end() ? *pit->second : empty;
        const FrameResult& gf = git != gt_by_frame.end() ? *git->second : empty;
        if (!pf.items.empty() && !gf.items.empty()) {
            const auto& a = pf.items.front().mask;
            const auto& b = gf.items.front().mask;
            if (a.width() != b.width() || a.height() != b.height()) {
                throw Error(ErrorCode::DimensionMismatch,
                            "prediction and ground-truth masks differ in size at frame " +
                                std::to_string(frame));
            }
        }
        const auto matches = match_frame_masks(pf, gf, iou_threshold);
        r.gt_count += static_cast<std::int64_t>(gf.items.size());
        r.tp += static_cast<std::int64_t>(matches.size());
        r.fp += static_cast<std::int64_t>(pf.items.size() - matches.size());
        for (const auto& m : matches) {
            r.soft_tp += m.iou;
            const auto last = last_pred_for_gt.find(m.gt_id);
            if (last != last_pred_for_gt.end() && last->second != m.pred_id) {
                ++r.ids;
            }
            last_pred_for_gt[m.gt_id] = m.pred_id;
        }
    }
    if (r.gt_count == 0) {
        throw Error(ErrorCode::EmptyGroundTruth, "ground truth holds no instances");
    }
    finish(r);
    return r;
}

MotsReport combine_reports(std::span<const MotsReport> reports) {
    MotsReport r;
    for (const auto& s : reports) {
        r.tp += s.tp;
        r.fp += s.fp;
        r.ids += s.ids;
        r.gt_count += s.gt_count;
        r.soft_tp += s.soft_tp;
    }
    finish(r);
    return r;
}

ComplexityStats dataset_stats(std::span<const AnnotatedSequence> dataset, const StatsConfig& cfg) {
    ComplexityStats stats;
    std::int64_t instance_frames = 0;
    for (const auto& seq : dataset) {
        std::set<int> ids;
        std::set<std::pair<int, int>> overlapping;
        for (const auto& frame : seq.frames) {
            for (const auto& inst : frame.instances) {
                ids.insert(inst.instance_id);
                ++instance_frames;
                const std::int64_t area = inst.mask.area();
                if (area < cfg.tiny_area) {
                    ++stats.tiny;
                } else if (area > cfg.large_area) {
                    ++stats.large;
                } else {
                    ++stats.medium;
                }
            }
            const auto& inst = frame.instances;
            for (std::size_t i = 0; i < inst.size(); ++i) {
                for (std::size_t j = i + 1; j < inst.size(); ++j) {
                    const auto key = std::minmax(inst[i].instance_id, inst[j].instance_id);
                    if (overlapping.contains(key) || !inst[i].box.valid() ||
                        inst[i].box.x_max <= inst[j].box.x_min ||
                        inst[j].box.x_max <= inst[i].box.x_min ||
                        inst[i].box.y_max <= inst[j].box.y_min ||
                        inst[j].box.y_max <= inst[i].box.y_min) {
                        continue;
                    }
                    if (mask_iou(inst[i].mask, inst[j].mask) > cfg.overlap_iou_min) {
                        overlapping.insert(key);
                    }
                }
            }
        }
        stats.instance_count += static_cast<std::int64_t>(ids.size());
        stats.overlapping_count += static_cast<std::int64_t>(overlapping.size());
    }
    if (instance_frames == 0) {
        throw Error(ErrorCode::EmptyDataset, "dataset holds no annotated instances");
    }
    stats.small_target_fraction =
        static_cast<double>(stats.tiny + stats.medium) / static_cast<double>(instance_frames);
    return stats;
}

}  // namespace hvis
