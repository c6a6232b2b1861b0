#include <doctest.h>

#include <set>

#include "hvis/annotations.hpp"
#include "hvis/detections.hpp"
#include "hvis/error.hpp"
#include "hvis/losses.hpp"
#include "hvis/synth.hpp"

using namespace hvis;

namespace {

bool has_detection_for(const DetectionFrame& frame, const InstanceAnnotation& inst) {
    return std::any_of(frame.detections.begin(), frame.detections.end(),
                       [&](const Detection& d) { return d.box == to_box(inst.box); });
}

}  // namespace

TEST_CASE("zero noise detections equal the ground truth") {
    SynthConfig cfg;
    cfg.instances = 1;
    cfg.frames = 40;
    const auto s = generate_synthetic(cfg);
    REQUIRE(s.ground_truth.size() == 1);
    const auto& gt = s.ground_truth[0];
    const auto& det = s.detections[0];
    REQUIRE(gt.frames.size() == 40);
    REQUIRE(det.frames.size() == 40);
    for (int f = 0; f < 40; ++f) {
        const auto& g = gt.frames[static_cast<std::size_t>(f)];
        const auto& d = det.frames[static_cast<std::size_t>(f)];
        REQUIRE(g.instances.size() == 1);
        REQUIRE(d.detections.size() == 1);
        CHECK(d.detections[0].box == to_box(g.instances[0].box));
        CHECK(*d.detections[0].mask == g.instances[0].mask);
        CHECK(d.detections[0].score >= 0.7);
    }
}

TEST_CASE("scripted occlusion window") {
    SynthConfig cfg;
    cfg.instances = 3;
    cfg.frames = 20;
    cfg.occlusions = {{2, 10, 12}};
    cfg.occlusion_hides_gt = false;
    const auto s = generate_synthetic(cfg);
    const auto& gt = s.ground_truth[0];
    const auto& det = s.detections[0];
    for (int f = 0; f < 20; ++f) {
        const auto& g = gt.frames[static_cast<std::size_t>(f)];
        const auto& d = det.frames[static_cast<std::size_t>(f)];
        REQUIRE(g.instances.size() == 3);
        const bool window = f >= 10 && f <= 12;
        CHECK(d.detections.size() == (window ? 2U : 3U));
        for (const auto& inst : g.instances) {
            CHECK(has_detection_for(d, inst) == !(window && inst.instance_id == 2));
        }
    }
    cfg.occlusion_hides_gt = true;
    const auto hidden = generate_synthetic(cfg);
    for (int f = 10; f <= 12; ++f) {
        for (const auto& inst : hidden.ground_truth[0].frames[static_cast<std::size_t>(f)].instances) {
            CHECK(inst.instance_id != 2);
        }
    }
    CHECK(hidden.occlusions[0].size() == 1);
}

TEST_CASE("same seed, same scene") {
    SynthConfig cfg;
    cfg.videos = 2;
    cfg.instances = 4;
    cfg.frames = 15;
    cfg.random_occlusions = 2;
    cfg.embedding_noise = 0.2;
    cfg.detection_noise = 1.0;
    const auto a = generate_synthetic(cfg);
    const auto b = generate_synthetic(cfg);
    CHECK(serialize_annotations(a.ground_truth) == serialize_annotations(b.ground_truth));
    CHECK(serialize_detections(a.detections) == serialize_detections(b.detections));
    cfg.seed += 1;
    CHECK(serialize_annotations(generate_synthetic(cfg).ground_truth) !=
          serialize_annotations(a.ground_truth));
}

TEST_CASE("synthetic scenes satisfy their invariants") {
    SynthConfig cfg;
    cfg.videos = 3;
    cfg.instances = 6;
    cfg.frames = 50;
    cfg.random_occlusions = 3;
    cfg.occlusion_length = 4;
    cfg.embedding_noise = 0.1;
    const auto s = generate_synthetic(cfg);
    for (std::size_t v = 0; v < s.ground_truth.size(); ++v) {
        const auto& gt = s.ground_truth[v];
        std::set<int> seen;
        for (const auto& frame : gt.frames) {
            std::set<int> ids;
            for (const auto& inst : frame.instances) {
                REQUIRE(inst.instance_id >= 1);
                REQUIRE(inst.instance_id <= cfg.instances);
                REQUIRE(ids.insert(inst.instance_id).second);
                REQUIRE(inst.mask.width() == cfg.width);
                REQUIRE(inst.mask.height() == cfg.height);
                REQUIRE(!inst.mask.empty());
                seen.insert(inst.instance_id);
            }
        }
        CHECK(static_cast<int>(seen.size()) == cfg.instances);
        for (const auto& e : s.occlusions[v]) {
            CHECK(e.first >= 1);
            CHECK(e.last < cfg.frames - 1);
            CHECK(e.last - e.first + 1 == cfg.occlusion_length);
        }
        // embeddings of different identities in the first frame stay apart
        const auto& d0 = s.detections[v].frames[0].detections;
        for (std::size_t i = 0; i < d0.size(); ++i) {
            for (std::size_t j = i + 1; j < d0.size(); ++j) {
                CHECK(cosine_distance(d0[i].embedding, d0[j].embedding) > 0.3);
            }
        }
    }
}

TEST_CASE("synthetic config validation") {
    const auto bad = [](auto edit) {
        SynthConfig cfg;
        edit(cfg);
        try {
            generate_synthetic(cfg);
        } catch (const Error& e) {
            return e.code() == ErrorCode::InvalidConfig;
        }
        return false;
    };
    CHECK(bad([](SynthConfig& c) { c.width = 16; }));
    CHECK(bad([](SynthConfig& c) { c.instances = 0; }));
    CHECK(bad([](SynthConfig& c) { c.occlusions = {{9, 1, 2}}; }));
    CHECK(bad([](SynthConfig& c) { c.occlusions = {{1, 5, 2}}; }));
    CHECK(bad([](SynthConfig& c) { c.embedding_noise = -1; }));
    CHECK(bad([](SynthConfig& c) { c.min_separation = 1.5; }));
    CHECK(bad([](SynthConfig& c) {
        c.embedding_dim = 2;
        c.instances = 8;
        c.min_separation = 1.0;
    }));
}

TEST_CASE("occlusion corpus") {
    OcclusionCorpusConfig cfg;
    cfg.scenes = 12;
    const auto a = generate_occlusion_corpus(cfg);
    const auto b = generate_occlusion_corpus(cfg);
    CHECK(serialize_annotations(a) == serialize_annotations(b));
    REQUIRE(a.size() == 12);
    int concave = 0;
    for (const auto& scene : a) {
        REQUIRE(scene.frames.size() == 1);
        const auto& inst = scene.frames[0].instances;
        REQUIRE(inst.size() >= 1);
        for (std::size_t i = 0; i < inst.size(); ++i) {
            REQUIRE(!inst[i].mask.empty());
            for (std::size_t j = i + 1; j < inst.size(); ++j) {
                REQUIRE(intersection_area(inst[i].mask, inst[j].mask) == 0);
            }
            concave += inst[i].mask.at(mask_centroid(inst[i].mask)) ? 0 : 1;
        }
    }
    CHECK(concave >= 1);
    cfg.max_people = 1;
    cfg.min_people = 2;
    CHECK_THROWS_AS(generate_occlusion_corpus(cfg), Error);
}
