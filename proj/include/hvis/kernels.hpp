#pragma once

// Data-parallel inner loops. Every kernel has a serial reference in
// kernels::serial and an OpenMP version in kernels::omp with identical
// results; the library calls the OpenMP versions. The serial ones are kept
// for the equivalence tests and the benchmark.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "hvis/box.hpp"
#include "hvis/embedding.hpp"
#include "hvis/mask.hpp"

namespace hvis::kernels {

struct AssociationWeights {
    double w_emb = 0.7;
    double w_iou = 0.3;
};

// Value returned for gated (forbidden) track/detection pairs.
inline constexpr double kForbidden = 1e18;

struct ArgminResult {
    Point point;
    std::int64_t cost = 0;  // sum of squared distances at `point`
};

struct Triplet {
    Embedding anchor;
    Embedding positive;
    Embedding negative;
};

struct LabeledEmbedding {
    Embedding embedding;
    int label = 0;
};

namespace serial {

// Literal evaluation of sum_i |p - e_i|^2 at every set pixel.
ArgminResult squared_distance_argmin(const BinaryMask& mask, std::span<const Point> edges);

// out(i, j) = |a_i intersect b_j|.
Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> intersection_matrix(
    std::span<const BinaryMask* const> a, std::span<const BinaryMask* const> b);

Eigen::MatrixXd association_costs(std::span<const Embedding> track_embeddings,
                                  std::span<const Box> track_boxes,
                                  std::span<const Embedding> det_embeddings,
                                  std::span<const Box> det_boxes, AssociationWeights weights,
                                  double gate);

// Sums of per-item losses, accumulated in item order.
double triplet_loss_sum(std::span<const Triplet> batch, double margin, bool normalize);
double classification_loss_sum(std::span<const LabeledEmbedding> batch,
                               const Eigen::MatrixXd& classifier);

}  // namespace serial

namespace omp {

// Uses the expansion m|p|^2 - 2 p.S (+ const) so each pixel costs O(1).
ArgminResult squared_distance_argmin(const BinaryMask& mask, std::span<const Point> edges);

Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> intersection_matrix(
    std::span<const BinaryMask* const> a, std::span<const BinaryMask* const> b);

Eigen::MatrixXd association_costs(std::span<const Embedding> track_embeddings,
                                  std::span<const Box> track_boxes,
                                  std::span<const Embedding> det_embeddings,
                                  std::span<const Box> det_boxes, AssociationWeights weights,
                                  double gate);

// Per-item losses computed in parallel, reduced serially in item order so
// the result is bit-identical to the serial version.
double triplet_loss_sum(std::span<const Triplet> batch, double margin, bool normalize);
double classification_loss_sum(std::span<const LabeledEmbedding> batch,
                               const Eigen::MatrixXd& classifier);

}  // namespace omp

}  // namespace hvis::kernels
