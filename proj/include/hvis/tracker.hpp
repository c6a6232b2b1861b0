#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "hvis/box.hpp"
#include "hvis/embedding.hpp"
#include "hvis/kalman.hpp"
#include "hvis/kernels.hpp"
#include "hvis/mask.hpp"

namespace hvis {

struct Detection {
    Box box;
    double score = 1.0;
    Embedding embedding;
    std::optional<BinaryMask> mask;
    int frame = 0;
};

// Detections with score >= threshold, the k best by score; equal scores keep
// their input order.
std::vector<Detection> select_top_k(std::span<const Detection> detections, std::size_t k,
                                    double score_threshold);
// Same selection as indices into `detections`, ascending.
std::vector<std::size_t> select_top_k_indices(std::span<const Detection> detections, std::size_t k,
                                              double score_threshold);

enum class TrackStatus { Active, Lost, Removed };

struct Track {
    int id = 0;
    KalmanState state;
    Embedding last_embedding;
    TrackStatus status = TrackStatus::Active;
    int age = 0;  // frames since the last match
};

struct TrackerConfig {
    kernels::AssociationWeights weights;
    double gate = 0.9;
    int max_age = 30;
    // Weight kept by the stored embedding when a new one is blended in.
    double embedding_momentum = 0.9;
    double spawn_score = 0.5;
    KalmanConfig kalman;
};

// cost(i, j) = w_emb * cosine_distance + w_iou * (1 - IoU(predicted track
// box, detection box)); entries above `gate` become kernels::kForbidden.
Eigen::MatrixXd cost_matrix(std::span<const Track> tracks, std::span<const Detection> detections,
                            kernels::AssociationWeights weights, double gate);

struct FrameAssignment {
    std::size_t detection = 0;
    int id = 0;

    friend bool operator==(const FrameAssignment&, const FrameAssignment&) = default;
};

// Frame-to-frame association state machine for one sequence.
class Tracker {
public:
    explicit Tracker(TrackerConfig cfg = {});

    const TrackerConfig& config() const { return cfg_; }
    bool initialized() const { return initialized_; }
    const std::vector<Track>& tracks() const { return tracks_; }
    int next_id() const { return next_id_; }

    // One Active track per detection, ids 1..n in detection order.
    std::vector<FrameAssignment> init(std::span<const Detection> detections);

    // Predict, associate, update, age and spawn. Throws NotInitialized
    // before init().
    std::vector<FrameAssignment> update(std::span<const Detection> detections);

    // init() on the first call, update() afterwards.
    std::vector<FrameAssignment> step(std::span<const Detection> detections);

private:
    void spawn(const Detection& det);

    TrackerConfig cfg_;
    KalmanFilter filter_;
    std::vector<Track> tracks_;
    int next_id_ = 1;
    bool initialized_ = false;
};

}  // namespace hvis
