#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include <unistd.h>

#include <CLI11.hpp>

#include "hvis/commands.hpp"
#include "hvis/error.hpp"

namespace {

bool use_color() {
    const char* no_color = std::getenv("NO_COLOR");
    return (no_color == nullptr || *no_color == '\0') && isatty(STDERR_FILENO) != 0;
}

// "hvis: error: <Code>: <message>"
void report(const std::string& message) {
    const bool color = use_color();
    std::cerr << "hvis: " << (color ? "\033[31m" : "") << "error" << (color ? "\033[0m" : "") << ": "
              << message << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    using namespace hvis;
    CLI::App app{"hvis: sample assignment, tracking and MOTS evaluation"};
    app.set_config("--config", "", "INI/TOML file with option values (command-line flags win)");
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = kDefaultSeed;
    int jobs = 1;
    app.add_option("--seed", seed, "Random seed")->capture_default_str();
    app.add_option("--jobs", jobs, "Worker threads (per sequence)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    // inner-center
    cli::InnerCenterOptions ic;
    auto* ic_cmd = app.add_subcommand("inner-center", "Box center, centroid and inner center per instance");
    ic_cmd->add_option("annotations", ic.annotations, "Annotation JSON")->required()->check(CLI::ExistingFile);
    ic_cmd->add_option("--k", ic.k, "Edge samples")->capture_default_str()->check(CLI::PositiveNumber);

    // assign
    cli::AssignOptions as;
    std::string strategy = "inner-center";
    std::string policy = "to-negative";
    std::string ranges = "64,128";
    bool keep_as_background = false;
    std::string dump;
    auto* as_cmd = app.add_subcommand("assign", "Positive-sample statistics for every strategy");
    as_cmd->add_option("annotations", as.annotations, "Annotation JSON")->required()->check(CLI::ExistingFile);
    as_cmd->add_option("--strategy", strategy, "inside-box | center-box | centroid-mask | inner-center")
        ->capture_default_str();
    as_cmd->add_option("--policy", policy, "to-negative | smallest-area")->capture_default_str();
    as_cmd->add_flag("--ambiguous-background", keep_as_background,
                     "to-negative turns ambiguous cells into background instead of ignoring them");
    as_cmd->add_option("--k", as.k, "Edge samples")->capture_default_str()->check(CLI::PositiveNumber);
    as_cmd->add_option("--base-stride", as.base_stride, "Stride of level 3")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    as_cmd->add_option("--level-ranges", ranges, "Upper bounds of levels 3 and 4 (max box side)")
        ->capture_default_str();
    auto* mix_opt = as_cmd->add_option("--mix", as.mix_percent, "Mix percent of S_I into S_C")
                        ->check(CLI::Range(0, 100));
    as_cmd->add_flag("--mix-into-inner", as.mix_into_inner, "Mix S_C into S_I instead")->needs(mix_opt);
    as_cmd->add_option("--dump", dump, "Write per-cell labels as JSON");

    // track
    cli::TrackOptions tr;
    std::string overlay_dir;
    auto* tr_cmd = app.add_subcommand("track", "Associate detections into tracks");
    tr_cmd->add_option("detections", tr.detections, "Detection JSONL")->required()->check(CLI::ExistingFile);
    tr_cmd->add_option("-o,--output", tr.output, "Results JSON")->required();
    tr_cmd->add_option("--w-emb", tr.tracker.weights.w_emb, "Embedding cost weight")->capture_default_str();
    tr_cmd->add_option("--w-iou", tr.tracker.weights.w_iou, "IoU cost weight")->capture_default_str();
    tr_cmd->add_option("--gate", tr.tracker.gate, "Costs above this are forbidden")->capture_default_str();
    tr_cmd->add_option("--max-age", tr.tracker.max_age, "Frames a lost track survives")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    tr_cmd->add_option("--momentum", tr.tracker.embedding_momentum, "Embedding EMA momentum")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    tr_cmd->add_option("--spawn-score", tr.tracker.spawn_score, "Min score to start a track")
        ->capture_default_str();
    tr_cmd->add_option("--top-k", tr.top_k, "Detections kept per frame")->capture_default_str();
    tr_cmd->add_option("--score-thresh", tr.score_threshold, "Min detection score")->capture_default_str();
    tr_cmd->add_option("--overlay-dir", overlay_dir, "Write PPM overlays here");

    // eval
    cli::EvalOptions ev;
    std::string report_path;
    auto* ev_cmd = app.add_subcommand("eval", "sMOTSA / MOTSA / MOTSP");
    ev_cmd->add_option("results", ev.results, "Results JSON")->required()->check(CLI::ExistingFile);
    ev_cmd->add_option("annotations", ev.annotations, "Annotation JSON")->required()->check(CLI::ExistingFile);
    ev_cmd->add_option("--iou-thresh", ev.iou_threshold, "Match when IoU exceeds this")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    ev_cmd->add_option("--report", report_path, "Write a JSON report");

    // stats
    cli::StatsOptions st;
    auto* st_cmd = app.add_subcommand("stats", "Dataset complexity statistics");
    st_cmd->add_option("annotations", st.annotations, "Annotation JSON")->required()->check(CLI::ExistingFile);
    st_cmd->add_option("--tiny-area", st.stats.tiny_area, "Area below this is tiny")->capture_default_str();
    st_cmd->add_option("--large-area", st.stats.large_area, "Area above this is large")->capture_default_str();
    st_cmd->add_option("--overlap-iou", st.stats.overlap_iou_min, "Pairs overlap when IoU exceeds this")
        ->capture_default_str();

    // synth
    cli::SynthOptions sy;
    std::string det_out;
    auto* sy_cmd = app.add_subcommand("synth", "Generate synthetic data");
    sy_cmd->add_option("-o,--ground-truth", sy.ground_truth, "Annotation JSON")->required();
    sy_cmd->add_option("--detections", det_out, "Detection JSONL");
    sy_cmd->add_option("--videos", sy.config.videos)->capture_default_str();
    sy_cmd->add_option("--instances", sy.config.instances)->capture_default_str();
    sy_cmd->add_option("--frames", sy.config.frames)->capture_default_str();
    sy_cmd->add_option("--width", sy.config.width)->capture_default_str();
    sy_cmd->add_option("--height", sy.config.height)->capture_default_str();
    sy_cmd->add_option("--random-occlusions", sy.config.random_occlusions)->capture_default_str();
    sy_cmd->add_option("--occlusion-length", sy.config.occlusion_length)->capture_default_str();
    sy_cmd->add_option("--embedding-noise", sy.config.embedding_noise)->capture_default_str();
    sy_cmd->add_option("--detection-noise", sy.config.detection_noise)->capture_default_str();
    sy_cmd->add_flag("--occlusion-corpus", sy.occlusion_corpus, "Single-frame occluded-people scenes");
    sy_cmd->add_option("--scenes", sy.scenes, "Scene count for --occlusion-corpus")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        std::string out;
        if (*ic_cmd) {
            ic.seed = seed;
            out = cli::run_inner_center(ic);
        } else if (*as_cmd) {
            as.seed = seed;
            as.jobs = jobs;
            as.strategy = parse_strategy(strategy);
            as.resolve.policy = parse_policy(policy);
            as.resolve.exclude_from_loss = !keep_as_background;
            as.ranges = cli::parse_level_ranges(ranges);
            if (!dump.empty()) {
                as.dump = dump;
            }
            out = cli::run_assign(as);
        } else if (*tr_cmd) {
            tr.palette_seed = seed;
            tr.jobs = jobs;
            if (!overlay_dir.empty()) {
                tr.overlay_dir = overlay_dir;
            }
            out = cli::run_track(tr);
        } else if (*ev_cmd) {
            ev.jobs = jobs;
            if (!report_path.empty()) {
                ev.report = report_path;
            }
            out = cli::run_eval(ev);
        } else if (*st_cmd) {
            out = cli::run_stats(st);
        } else if (*sy_cmd) {
            sy.config.seed = seed;
            if (!det_out.empty()) {
                sy.detections = det_out;
            }
            out = cli::run_synth(sy);
        }
        std::cout << out;
    } catch (const Error& e) {
        report(e.what());
        return 2;
    } catch (const std::exception& e) {
        report(std::string("Internal: ") + e.what());
        return 3;
    }
    return 0;
}
