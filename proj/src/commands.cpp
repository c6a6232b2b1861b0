#include "hvis/commands.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <map>
#include <sstream>

#include <omp.h>

#include "hvis/error.hpp"
#include "hvis/overlay.hpp"
#include "json_util.hpp"

namespace hvis::cli {

using io_detail::json;

namespace {

// Runs body(i) for i in [0, n) on up to `jobs` threads and rethrows the
// first failure in index order.
template <class Body>
void for_each_sequence(std::size_t n, int jobs, Body&& body) {
    std::vector<std::exception_ptr> errors(n);
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic) num_threads(jobs > 0 ? jobs : 1)
    for (std::int64_t i = 0; i < count; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

std::string fixed(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

struct FrameLevels {
    std::vector<SampleAssignment> resolved;
    std::vector<AmbiguousCell> ambiguous;
};

FrameLevels assign_frame(const AnnotatedSequence& seq, const AnnotatedFrame& frame,
                             Strategy strategy, const AssignOptions& opts) {
    const auto grids = build_grids(seq.width, seq.height, opts.base_stride);
    AssignConfig cfg{strategy, opts.k, opts.seed, opts.ranges};
    const auto raw = assign(frame.instances, grids, cfg);
    FrameLevels out;
    out.ambiguous = detect_ambiguous(raw);
    for (const auto& a : raw) {
        out.resolved.push_back(resolve_ambiguous(a, opts.resolve));
    }
    return out;
}

}  // namespace

LevelRanges parse_level_ranges(const std::string& text) {
    LevelRanges ranges;
    ranges.upper_bounds.clear();
    std::stringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(part, &used);
            if (used != part.size() || !(v > 0.0)) {
                throw std::invalid_argument(part);
            }
            if (!ranges.upper_bounds.empty() && v <= ranges.upper_bounds.back()) {
                throw Error(ErrorCode::InvalidConfig, "level ranges must increase");
            }
            ranges.upper_bounds.push_back(v);
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::InvalidConfig, "bad level range '" + part + "'");
        }
    }
    if (ranges.upper_bounds.size() != 2) {
        throw Error(ErrorCode::InvalidConfig,
                    "expected two bounds (levels 3/4 and 4/5), got '" + text + "'");
    }
    ranges.upper_bounds.push_back(std::numeric_limits<double>::infinity());
    return ranges;
}

std::vector<CenterRow> inner_center_table(const std::vector<AnnotatedSequence>& dataset,
                                          std::size_t k, std::uint64_t seed) {
    std::vector<CenterRow> rows;
    for (const auto& seq : dataset) {
        for (const auto& frame : seq.frames) {
            for (const auto& inst : frame.instances) {
                CenterRow row;
                row.video = seq.video_id;
                row.frame = frame.frame;
                row.id = inst.instance_id;
                row.box_center = box_center_point(inst.box);
                row.box_center_inside = inst.mask.contains(row.box_center);
                row.centroid = mask_centroid(inst.mask);
                row.centroid_inside = inst.mask.contains(row.centroid);
                row.inner = inner_center(inst.mask, k, seed);
                row.inner_inside = inst.mask.contains(row.inner);
                rows.push_back(row);
            }
        }
    }
    return rows;
}

std::string format_center_table(const std::vector<CenterRow>& rows) {
    std::ostringstream out;
    out << "video\tframe\tid\tbox_x\tbox_y\tbox_inside\tcentroid_x\tcentroid_y\tcentroid_inside"
           "\tinner_x\tinner_y\tinner_inside\n";
    for (const auto& r : rows) {
        out << r.video << '\t' << r.frame << '\t' << r.id << '\t' << r.box_center.x << '\t'
            << r.box_center.y << '\t' << r.box_center_inside << '\t' << r.centroid.x << '\t'
            << r.centroid.y << '\t' << r.centroid_inside << '\t' << r.inner.x << '\t' << r.inner.y
            << '\t' << r.inner_inside << '\n';
    }
    return out.str();
}

std::string run_inner_center(const InnerCenterOptions& opts) {
    return format_center_table(inner_center_table(load_annotations(opts.annotations), opts.k, opts.seed));
}

StrategyCounts count_strategy(const std::vector<AnnotatedSequence>& dataset, Strategy strategy,
                              const AssignOptions& opts) {
    std::vector<StrategyCounts> per_seq(dataset.size());
    for_each_sequence(dataset.size(), opts.jobs, [&](std::size_t s) {
        const auto& seq = dataset[s];
        StrategyCounts c{strategy, 0, 0, 0};
        for (const auto& frame : seq.frames) {
            const auto fa = assign_frame(seq, frame, strategy, opts);
            const auto report = count_inside_mask(fa.resolved, frame.instances);
            c.positives += report.positives;
            c.inside += report.inside;
            c.ambiguous += static_cast<std::int64_t>(fa.ambiguous.size());
        }
        per_seq[s] = c;
    });
    StrategyCounts total{strategy, 0, 0, 0};
    for (const auto& c : per_seq) {
        total.positives += c.positives;
        total.inside += c.inside;
        total.ambiguous += c.ambiguous;
    }
    return total;
}

std::string run_assign(const AssignOptions& opts) {
    const auto dataset = load_annotations(opts.annotations);
    std::ostringstream out;
    out << "strategy\tpositives\tinside\tambiguous\tinside_fraction\n";
    for (auto s : {Strategy::InsideBox, Strategy::CenterBox, Strategy::CentroidMask,
                   Strategy::InnerCenter}) {
        const auto c = count_strategy(dataset, s, opts);
        out << to_string(s) << '\t' << c.positives << '\t' << c.inside << '\t' << c.ambiguous
            << '\t' << fixed(c.inside_fraction()) << '\n';
    }
    out << "selected\t" << to_string(opts.strategy) << "\tpolicy\t" << to_string(opts.resolve.policy)
        << '\n';

    json videos = json::array();
    std::int64_t mix_pos = 0;
    std::int64_t mix_inside = 0;
    for (const auto& seq : dataset) {
        json frames = json::array();
        for (const auto& frame : seq.frames) {
            std::vector<SampleAssignment> chosen;
            std::vector<AmbiguousCell> ambiguous;
            if (opts.mix_percent) {
                const auto sc = assign_frame(seq, frame, Strategy::CenterBox, opts);
                const auto si = assign_frame(seq, frame, Strategy::InnerCenter, opts);
                const auto& base = opts.mix_into_inner ? si : sc;
                const auto& other = opts.mix_into_inner ? sc : si;
                for (std::size_t g = 0; g < base.resolved.size(); ++g) {
                    chosen.push_back(mix_positive_sets(base.resolved[g], other.resolved[g],
                                                       *opts.mix_percent, opts.seed));
                }
                ambiguous = detect_ambiguous(chosen);
            } else {
                auto fa = assign_frame(seq, frame, opts.strategy, opts);
                chosen = std::move(fa.resolved);
                ambiguous = std::move(fa.ambiguous);
            }
            const auto report = count_inside_mask(chosen, frame.instances);
            mix_pos += report.positives;
            mix_inside += report.inside;
            if (!opts.dump) {
                continue;
            }
            json levels = json::array();
            for (const auto& a : chosen) {
                levels.push_back({{"level", a.grid.level},
                                  {"stride", a.grid.stride},
                                  {"width", a.grid.width},
                                  {"height", a.grid.height},
                                  {"labels", a.labels}});
            }
            json amb = json::array();
            for (const auto& c : ambiguous) {
                amb.push_back({{"level", c.level}, {"cx", c.cx}, {"cy", c.cy}, {"ids", c.ids}});
            }
            json outside = json::array();
            for (const auto& c : report.outside) {
                outside.push_back({{"level", c.level}, {"cx", c.cx}, {"cy", c.cy}, {"id", c.id}});
            }
            frames.push_back({{"frame", frame.frame},
                              {"levels", std::move(levels)},
                              {"ambiguous", std::move(amb)},
                              {"positives", report.positives},
                              {"inside", report.inside},
                              {"outside", std::move(outside)}});
        }
        if (opts.dump) {
            videos.push_back({{"id", seq.video_id}, {"frames", std::move(frames)}});
        }
    }
    if (opts.mix_percent) {
        out << "mix\t" << *opts.mix_percent << "%\t" << (opts.mix_into_inner ? "S_C->S_I" : "S_I->S_C")
            << "\tpositives\t" << mix_pos << "\tinside_fraction\t"
            << fixed(mix_pos > 0 ? static_cast<double>(mix_inside) / static_cast<double>(mix_pos) : 0.0)
            << '\n';
    }
    if (opts.dump) {
        json doc = {{"format_version", io_detail::kFormatVersion},
                    {"strategy", opts.mix_percent ? "mixed" : std::string(to_string(opts.strategy))},
                    {"policy", to_string(opts.resolve.policy)},
                    {"videos", std::move(videos)}};
        io_detail::write_file(*opts.dump, doc.dump() + "\n");
    }
    return out.str();
}

std::vector<ResultSequence> track_sequences(std::vector<DetectionSequence> sequences,
                                            const TrackOptions& opts) {
    std::vector<ResultSequence> results(sequences.size());
    for_each_sequence(sequences.size(), opts.jobs, [&](std::size_t s) {
        auto& seq = sequences[s];
        ResultSequence out{seq.video_id, seq.width, seq.height, {}};
        Tracker tracker(opts.tracker);
        for (auto& frame : seq.frames) {
            std::vector<Detection> selected;
            for (std::size_t i : select_top_k_indices(frame.detections, opts.top_k, opts.score_threshold)) {
                selected.push_back(std::move(frame.detections[i]));
            }
            const auto assigned = tracker.step(selected);
            ResultFrame rf{frame.frame, {}};
            for (const auto& a : assigned) {
                Detection& d = selected[a.detection];
                rf.items.push_back({a.id, d.box, std::move(d.mask)});
            }
            if (opts.overlay_dir) {
                std::vector<OverlayItem> items;
                for (const auto& item : rf.items) {
                    items.push_back({item.id, item.mask ? &*item.mask : nullptr, item.box});
                }
                char name[64];
                std::snprintf(name, sizeof(name), "_%05d.ppm", frame.frame);
                write_ppm(*opts.overlay_dir / (seq.video_id + name),
                          render_overlay(seq.width, seq.height, items, opts.palette_seed));
            }
            out.frames.push_back(std::move(rf));
        }
        results[s] = std::move(out);
    });
    return results;
}

std::string run_track(const TrackOptions& opts) {
    auto sequences = load_detections(opts.detections);
    if (opts.overlay_dir) {
        std::filesystem::create_directories(*opts.overlay_dir);
    }
    const auto results = track_sequences(std::move(sequences), opts);
    save_results(opts.output, results);
    std::size_t frames = 0;
    std::map<std::string, int> ids;
    for (const auto& r : results) {
        frames += r.frames.size();
        int top = 0;
        for (const auto& f : r.frames) {
            for (const auto& item : f.items) {
                top = std::max(top, item.id);
            }
        }
        ids[r.video_id] = top;
    }
    std::ostringstream out;
    out << "videos\t" << results.size() << "\nframes\t" << frames << '\n';
    for (const auto& [video, top] : ids) {
        out << "ids\t" << video << '\t' << top << '\n';
    }
    return out.str();
}

EvalOutcome evaluate(const std::vector<ResultSequence>& results,
                     const std::vector<AnnotatedSequence>& gt, double iou_threshold, int jobs) {
    std::map<std::string, const ResultSequence*> by_video;
    for (const auto& r : results) {
        by_video[r.video_id] = &r;
    }
    for (const auto& r : results) {
        const bool known = std::any_of(gt.begin(), gt.end(), [&](const AnnotatedSequence& g) {
            return g.video_id == r.video_id;
        });
        if (!known) {
            throw Error(ErrorCode::SchemaError, "results mention unknown video '" + r.video_id + "'");
        }
    }
    EvalOutcome outcome;
    outcome.per_video.resize(gt.size());
    for_each_sequence(gt.size(), jobs, [&](std::size_t s) {
        const auto& g = gt[s];
        std::vector<FrameResult> pred;
        if (const auto it = by_video.find(g.video_id); it != by_video.end()) {
            if (it->second->width != g.width || it->second->height != g.height) {
                throw Error(ErrorCode::DimensionMismatch,
                            "video '" + g.video_id + "' differs in size between results and annotations");
            }
            pred = to_frame_results(*it->second);
        }
        const auto gframes = to_frame_results(g);
        outcome.per_video[s] = {g.video_id, compute_mots(pred, gframes, iou_threshold)};
    });
    std::vector<MotsReport> parts;
    for (const auto& [name, r] : outcome.per_video) {
        parts.push_back(r);
    }
    outcome.total = combine_reports(parts);
    return outcome;
}

namespace {

json report_json(const MotsReport& r) {
    return {{"smotsa", r.smotsa}, {"motsa", r.motsa}, {"motsp", r.motsp},
            {"tp", r.tp},         {"fp", r.fp},       {"fn", r.fn},
            {"ids", r.ids},       {"gt", r.gt_count}, {"soft_tp", r.soft_tp}};
}

}  // namespace

std::string format_report_json(const EvalOutcome& outcome) {
    json videos = json::array();
    for (const auto& [name, r] : outcome.per_video) {
        json j = report_json(r);
        j["video"] = name;
        videos.push_back(std::move(j));
    }
    json doc = {{"format_version", io_detail::kFormatVersion},
                {"total", report_json(outcome.total)},
                {"videos", std::move(videos)}};
    return doc.dump(2) + "\n";
}

std::string run_eval(const EvalOptions& opts) {
    const auto results = load_results(opts.results);
    const auto gt = load_annotations(opts.annotations);
    const auto outcome = evaluate(results, gt, opts.iou_threshold, opts.jobs);
    if (opts.report) {
        io_detail::write_file(*opts.report, format_report_json(outcome));
    }
    const auto& r = outcome.total;
    std::ostringstream out;
    out << "sMOTSA\t" << fixed(r.smotsa) << "\nMOTSA\t" << fixed(r.motsa) << "\nMOTSP\t"
        << fixed(r.motsp) << "\nTP\t" << r.tp << "\nFP\t" << r.fp << "\nFN\t" << r.fn << "\nIDS\t"
        << r.ids << "\nGT\t" << r.gt_count << '\n';
    return out.str();
}

std::string run_stats(const StatsOptions& opts) {
    const auto stats = dataset_stats(load_annotations(opts.annotations), opts.stats);
    std::ostringstream out;
    out << "small_target_fraction\t" << fixed(stats.small_target_fraction) << "\ninstances\t"
        << stats.instance_count << "\noverlapping\t" << stats.overlapping_count << "\ntiny\t"
        << stats.tiny << "\nmedium\t" << stats.medium << "\nlarge\t" << stats.large << '\n';
    return out.str();
}

std::string run_synth(const SynthOptions& opts) {
    std::ostringstream out;
    if (opts.occlusion_corpus) {
        OcclusionCorpusConfig cfg;
        cfg.scenes = opts.scenes;
        cfg.width = opts.config.width;
        cfg.height = opts.config.height;
        cfg.seed = opts.config.seed;
        const auto corpus = generate_occlusion_corpus(cfg);
        save_annotations(opts.ground_truth, corpus);
        out << "scenes\t" << corpus.size() << '\n';
        return out.str();
    }
    const auto scene = generate_synthetic(opts.config);
    save_annotations(opts.ground_truth, scene.ground_truth);
    if (opts.detections) {
        save_detections(*opts.detections, scene.detections);
    }
    out << "videos\t" << scene.ground_truth.size() << "\nframes\t" << opts.config.frames
        << "\ninstances\t" << opts.config.instances << '\n';
    for (std::size_t v = 0; v < scene.occlusions.size(); ++v) {
        for (const auto& e : scene.occlusions[v]) {
            out << "occlusion\t" << scene.ground_truth[v].video_id << '\t' << e.id << '\t' << e.first
                << '\t' << e.last << '\n';
        }
    }
    return out.str();
}

}  // namespace hvis::cli
