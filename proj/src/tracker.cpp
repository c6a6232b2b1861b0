#include "hvis/tracker.hpp"

#include <algorithm>
#include <numeric>

#include "hvis/error.hpp"
#include "hvis/hungarian.hpp"

namespace hvis {

std::vector<std::size_t> select_top_k_indices(std::span<const Detection> detections, std::size_t k,
                                              double score_threshold) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < detections.size(); ++i) {
        if (detections[i].score >= score_threshold) {
            order.push_back(i);
        }
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return detections[a].score > detections[b].score;
    });
    if (order.size() > k) {
        order.resize(k);
    }
    // keep the survivors in input order
    std::sort(order.begin(), order.end());
    return order;
}

std::vector<Detection> select_top_k(std::span<const Detection> detections, std::size_t k,
                                    double score_threshold) {
    const auto order = select_top_k_indices(detections, k, score_threshold);
    std::vector<Detection> out;
    out.reserve(order.size());
    for (std::size_t i : order) {
        out.push_back(detections[i]);
    }
    return out;
}

Eigen::MatrixXd cost_matrix(std::span<const Track> tracks, std::span<const Detection> detections,
                            kernels::AssociationWeights weights, double gate) {
    std::vector<Embedding> track_emb;
    std::vector<Box> track_box;
    track_emb.reserve(tracks.size());
    track_box.reserve(tracks.size());
    for (const auto& t : tracks) {
        track_emb.push_back(t.last_embedding);
        track_box.push_back(t.state.box());
    }
    std::vector<Embedding> det_emb;
    std::vector<Box> det_box;
    det_emb.reserve(detections.size());
    det_box.reserve(detections.size());
    for (const auto& d : detections) {
        if (!track_emb.empty() && d.embedding.size() != track_emb.front().size()) {
            throw Error(ErrorCode::DimensionMismatch, "detection embedding size differs from tracks");
        }
        det_emb.push_back(d.embedding);
        det_box.push_back(d.box);
    }
    return kernels::omp::association_costs(track_emb, track_box, det_emb, det_box, weights, gate);
}

Tracker::Tracker(TrackerConfig cfg) : cfg_(cfg), filter_(cfg.kalman) {}

void Tracker::spawn(const Detection& det) {
    Track t;
    t.id = next_id_++;
    t.state = filter_.initiate(det.box);
    t.last_embedding = det.embedding;
    tracks_.push_back(std::move(t));
}

std::vector<FrameAssignment> Tracker::init(std::span<const Detection> detections) {
    tracks_.clear();
    next_id_ = 1;
    std::vector<FrameAssignment> out;
    for (std::size_t i = 0; i < detections.size(); ++i) {
        spawn(detections[i]);
        out.push_back({i, tracks_.back().id});
    }
    initialized_ = true;
    return out;
}

std::vector<FrameAssignment> Tracker::update(std::span<const Detection> detections) {
    if (!initialized_) {
        throw Error(ErrorCode::NotInitialized, "tracker update before init");
    }
    for (auto& t : tracks_) {
        t.state = filter_.predict(t.state);
    }

    const Eigen::MatrixXd cost = cost_matrix(tracks_, detections, cfg_.weights, cfg_.gate);
    const LinearAssignment match = hungarian(cost, kernels::kForbidden);

    std::vector<FrameAssignment> out;
    std::vector<char> det_used(detections.size(), 0);
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
        Track& t = tracks_[i];
        const int j = match.row_to_col[i];
        if (j < 0) {
            t.status = TrackStatus::Lost;
            ++t.age;
            if (t.age > cfg_.max_age) {
                t.status = TrackStatus::Removed;
            }
            continue;
        }
        const Detection& d = detections[static_cast<std::size_t>(j)];
        t.state = filter_.update(t.state, d.box);
        t.last_embedding = cfg_.embedding_momentum * t.last_embedding +
                           (1.0 - cfg_.embedding_momentum) * d.embedding;
        t.status = TrackStatus::Active;
        t.age = 0;
        det_used[static_cast<std::size_t>(j)] = 1;
        out.push_back({static_cast<std::size_t>(j), t.id});
    }
    std::erase_if(tracks_, [](const Track& t) { return t.status == TrackStatus::Removed; });

    for (std::size_t j = 0; j < detections.size(); ++j) {
        if (!det_used[j] && detections[j].score >= cfg_.spawn_score) {
            spawn(detections[j]);
            out.push_back({j, tracks_.back().id});
        }
    }
    std::sort(out.begin(), out.end(), [](const FrameAssignment& a, const FrameAssignment& b) {
        return a.detection < b.detection;
    });
    return out;
}

std::vector<FrameAssignment> Tracker::step(std::span<const Detection> detections) {
    return initialized_ ? update(detections) : init(detections);
}

}  // namespace hvis
