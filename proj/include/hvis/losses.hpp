#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "hvis/embedding.hpp"
#include "hvis/kernels.hpp"

namespace hvis {

struct TripletConfig {
    double margin_alpha = 0.3;
    // Unit-normalise the three embeddings before measuring distances.
    bool normalize = false;
};

struct TripletResult {
    double loss = 0.0;
    Embedding grad_anchor;
    Embedding grad_positive;
    Embedding grad_negative;
};

// max(|a - p|^2 - |a - n|^2 + alpha, 0) with its analytic gradients. The
// gradients are zero whenever the hinge is not strictly active.
TripletResult triplet_loss(const Embedding& anchor, const Embedding& positive,
                           const Embedding& negative, const TripletConfig& cfg = {});

// Loss value only.
double triplet_loss_value(const Embedding& anchor, const Embedding& positive,
                          const Embedding& negative, const TripletConfig& cfg = {});

struct ClassificationResult {
    double loss = 0.0;
    Embedding grad_embedding;
    Eigen::MatrixXd grad_weights;
};

// Cross-entropy of softmax(W e) against `label`. W has one row per class;
// row 0 is background.
ClassificationResult classification_loss(const Embedding& embedding,
                                         const Eigen::MatrixXd& classifier_weights, int label);

double classification_loss_value(const Embedding& embedding,
                                 const Eigen::MatrixXd& classifier_weights, int label);

using kernels::LabeledEmbedding;
using kernels::Triplet;

// Mean triplet loss plus mean classification loss.
double id_loss(std::span<const Triplet> triplets, std::span<const LabeledEmbedding> classifications,
               const Eigen::MatrixXd& classifier_weights, const TripletConfig& cfg = {});

struct TripletIndex {
    std::size_t anchor;
    std::size_t positive;
    std::size_t negative;

    friend bool operator==(const TripletIndex&, const TripletIndex&) = default;
};

// Every (anchor, positive, negative) over positive samples: anchor and
// positive share an id >= 1, negative carries a different id >= 1.
// Cells labelled 0 or -1 never participate.
std::vector<TripletIndex> mine_triplets(std::span<const int> labels);

}  // namespace hvis
