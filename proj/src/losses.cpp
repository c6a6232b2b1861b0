#include "hvis/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hvis/error.hpp"

namespace hvis {

namespace {

void require_finite(const Embedding& v, const char* what) {
    if (!v.allFinite()) {
        throw Error(ErrorCode::NonFinite, std::string(what) + " has non-finite components");
    }
}

void require_same_dims(const Embedding& a, const Embedding& b) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::DimensionMismatch, "embedding dimensions differ: " +
                                                      std::to_string(a.size()) + " vs " +
                                                      std::to_string(b.size()));
    }
}

void check_triplet(const Embedding& a, const Embedding& p, const Embedding& n) {
    require_same_dims(a, p);
    require_same_dims(a, n);
    require_finite(a, "anchor");
    require_finite(p, "positive");
    require_finite(n, "negative");
}

Embedding unit(const Embedding& v) {
    const double norm = v.norm();
    if (!(norm > 0.0)) {
        throw Error(ErrorCode::NonFinite, "cannot normalise a zero embedding");
    }
    return v / norm;
}

// Backpropagate through x -> x / |x|.
Embedding through_normalization(const Embedding& x, const Embedding& grad_unit) {
    const double norm = x.norm();
    const Embedding u = x / norm;
    return (grad_unit - u * u.dot(grad_unit)) / norm;
}

void check_classification(const Embedding& e, const Eigen::MatrixXd& w, int label) {
    if (w.cols() != e.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "classifier has " + std::to_string(w.cols()) + " columns, embedding has " +
                        std::to_string(e.size()) + " components");
    }
    if (w.rows() < 1) {
        throw Error(ErrorCode::DimensionMismatch, "classifier has no classes");
    }
    if (label < 0 || label >= w.rows()) {
        throw Error(ErrorCode::LabelOutOfRange, "label " + std::to_string(label) +
                                                    " outside [0, " + std::to_string(w.rows() - 1) +
                                                    "]");
    }
    require_finite(e, "embedding");
    if (!w.allFinite()) {
        throw Error(ErrorCode::NonFinite, "classifier weights have non-finite entries");
    }
}

double log_sum_exp(const Eigen::VectorXd& s) {
    const double top = s.maxCoeff();
    return top + std::log((s.array() - top).exp().sum());
}

}  // namespace

double embedding_distance(const Embedding& a, const Embedding& b) {
    require_same_dims(a, b);
    return (a - b).squaredNorm();
}

double cosine_distance(const Embedding& a, const Embedding& b) {
    require_same_dims(a, b);
    const double na = a.norm();
    const double nb = b.norm();
    if (!(na > 0.0) || !(nb > 0.0)) {
        return 1.0;
    }
    return std::clamp(1.0 - a.dot(b) / (na * nb), 0.0, 1.0);
}

TripletResult triplet_loss(const Embedding& anchor, const Embedding& positive,
                           const Embedding& negative, const TripletConfig& cfg) {
    check_triplet(anchor, positive, negative);
    const Embedding a = cfg.normalize ? unit(anchor) : anchor;
    const Embedding p = cfg.normalize ? unit(positive) : positive;
    const Embedding n = cfg.normalize ? unit(negative) : negative;

    const double hinge = (a - p).squaredNorm() - (a - n).squaredNorm() + cfg.margin_alpha;
    TripletResult out;
    if (hinge <= 0.0) {
        out.loss = 0.0;
        out.grad_anchor = Embedding::Zero(anchor.size());
        out.grad_positive = Embedding::Zero(anchor.size());
        out.grad_negative = Embedding::Zero(anchor.size());
        return out;
    }
    out.loss = hinge;
    out.grad_anchor = 2.0 * (n - p);
    out.grad_positive = -2.0 * (a - p);
    out.grad_negative = 2.0 * (a - n);
    if (cfg.normalize) {
        out.grad_anchor = through_normalization(anchor, out.grad_anchor);
        out.grad_positive = through_normalization(positive, out.grad_positive);
        out.grad_negative = through_normalization(negative, out.grad_negative);
    }
    return out;
}

double triplet_loss_value(const Embedding& anchor, const Embedding& positive,
                          const Embedding& negative, const TripletConfig& cfg) {
    check_triplet(anchor, positive, negative);
    double hinge = 0.0;
    if (cfg.normalize) {
        const Embedding a = unit(anchor);
        hinge = (a - unit(positive)).squaredNorm() - (a - unit(negative)).squaredNorm();
    } else {
        hinge = (anchor - positive).squaredNorm() - (anchor - negative).squaredNorm();
    }
    return std::max(hinge + cfg.margin_alpha, 0.0);
}

ClassificationResult classification_loss(const Embedding& embedding,
                                         const Eigen::MatrixXd& classifier_weights, int label) {
    check_classification(embedding, classifier_weights, label);
    const Eigen::VectorXd scores = classifier_weights * embedding;
    const double lse = log_sum_exp(scores);

    ClassificationResult out;
    out.loss = lse - scores(label);
    Eigen::VectorXd grad_scores = (scores.array() - lse).exp().matrix();
    grad_scores(label) -= 1.0;
    out.grad_embedding = classifier_weights.transpose() * grad_scores;
    out.grad_weights = grad_scores * embedding.transpose();
    return out;
}

double classification_loss_value(const Embedding& embedding,
                                 const Eigen::MatrixXd& classifier_weights, int label) {
    check_classification(embedding, classifier_weights, label);
    const Eigen::VectorXd scores = classifier_weights * embedding;
    return log_sum_exp(scores) - scores(label);
}

double id_loss(std::span<const Triplet> triplets, std::span<const LabeledEmbedding> classifications,
               const Eigen::MatrixXd& classifier_weights, const TripletConfig& cfg) {
    if (triplets.empty() || classifications.empty()) {
        throw Error(ErrorCode::EmptyBatch, "id_loss needs nonempty triplet and classification batches");
    }
    // Validate up front: the parallel kernels must not throw.
    for (const auto& t : triplets) {
        check_triplet(t.anchor, t.positive, t.negative);
        if (cfg.normalize) {
            unit(t.anchor);
            unit(t.positive);
            unit(t.negative);
        }
    }
    for (const auto& c : classifications) {
        check_classification(c.embedding, classifier_weights, c.label);
    }
    const double tri = kernels::omp::triplet_loss_sum(triplets, cfg.margin_alpha, cfg.normalize);
    const double cls = kernels::omp::classification_loss_sum(classifications, classifier_weights);
    return tri / static_cast<double>(triplets.size()) +
           cls / static_cast<double>(classifications.size());
}

std::vector<TripletIndex> mine_triplets(std::span<const int> labels) {
    std::vector<TripletIndex> out;
    for (std::size_t a = 0; a < labels.size(); ++a) {
        if (labels[a] < 1) {
            continue;
        }
        for (std::size_t p = 0; p < labels.size(); ++p) {
            if (p == a || labels[p] != labels[a]) {
                continue;
            }
            for (std::size_t n = 0; n < labels.size(); ++n) {
                if (labels[n] >= 1 && labels[n] != labels[a]) {
                    out.push_back({a, p, n});
                }
            }
        }
    }
    return out;
}

}  // namespace hvis
