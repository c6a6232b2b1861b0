#pragma once

#include <cstdint>
#include <vector>

#include "hvis/annotations.hpp"
#include "hvis/detections.hpp"
#include "hvis/random.hpp"

namespace hvis {

// Instance `id` is missing from the detections in frames [first, last].
struct OcclusionEvent {
    int id = 1;
    int first = 0;
    int last = 0;
};

struct SynthConfig {
    int videos = 1;
    int instances = 3;
    int frames = 60;
    int width = 256;
    int height = 256;
    double min_speed = 0.5;  // pixels per frame
    double max_speed = 2.5;
    int min_size = 20;
    int max_size = 48;
    std::vector<OcclusionEvent> occlusions;  // applied to every video
    int random_occlusions = 0;               // extra events per video
    int occlusion_length = 3;
    // Fully occluded instances are also absent from the ground truth.
    bool occlusion_hides_gt = true;
    int embedding_dim = 256;
    // Min pairwise cosine distance between identity base embeddings.
    double min_separation = 0.5;
    // Norm of the Gaussian perturbation added to each unit base embedding.
    double embedding_noise = 0.0;
    // Std dev (pixels) of box jitter; masks shift by the rounded center jitter.
    double detection_noise = 0.0;
    std::uint64_t seed = kDefaultSeed;
};

struct SynthScene {
    std::vector<AnnotatedSequence> ground_truth;
    std::vector<DetectionSequence> detections;
    // Occlusion windows actually scripted, per video.
    std::vector<std::vector<OcclusionEvent>> occlusions;
};

// Rectangles (odd ids) and ellipses (even ids) in constant-velocity motion
// that never leaves the frame. Throws InvalidConfig on bad settings.
SynthScene generate_synthetic(const SynthConfig& cfg);

struct OcclusionCorpusConfig {
    int scenes = 50;
    int width = 256;
    int height = 256;
    int min_people = 2;
    int max_people = 4;
    double min_height = 70.0;
    double max_height = 130.0;
    std::uint64_t seed = kDefaultSeed;
};

// Single-frame scenes of articulated stick-figure people standing close
// together. Later figures occlude earlier ones; each annotation holds the
// visible (modal) part only, so occluded people get concave masks.
std::vector<AnnotatedSequence> generate_occlusion_corpus(const OcclusionCorpusConfig& cfg = {});

}  // namespace hvis
