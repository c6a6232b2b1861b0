#pragma once

#include <Eigen/Core>

namespace hvis {

inline constexpr int kEmbeddingDim = 256;

using Embedding = Eigen::VectorXd;

// Squared Euclidean distance.
double embedding_distance(const Embedding& a, const Embedding& b);

// 1 - cos(a, b), clipped to [0, 1]. Zero vectors are at distance 1 from
// everything.
double cosine_distance(const Embedding& a, const Embedding& b);

}  // namespace hvis
