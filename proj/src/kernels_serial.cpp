#include <limits>

#include "hvis/kernels.hpp"
#include "hvis/losses.hpp"

namespace hvis::kernels::serial {

ArgminResult squared_distance_argmin(const BinaryMask& mask, std::span<const Point> edges) {
    ArgminResult best{{-1, -1}, std::numeric_limits<std::int64_t>::max()};
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y)) {
                continue;
            }
            std::int64_t cost = 0;
            for (const Point& e : edges) {
                const std::int64_t dx = x - e.x;
                const std::int64_t dy = y - e.y;
                cost += dx * dx + dy * dy;
            }
            if (cost < best.cost) {
                best = {{x, y}, cost};
            }
        }
    }
    return best;
}

Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> intersection_matrix(
    std::span<const BinaryMask* const> a, std::span<const BinaryMask* const> b) {
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> out(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            out(i, j) = intersection_area(*a[i], *b[j]);
        }
    }
    return out;
}

Eigen::MatrixXd association_costs(std::span<const Embedding> track_embeddings,
                                  std::span<const Box> track_boxes,
                                  std::span<const Embedding> det_embeddings,
                                  std::span<const Box> det_boxes, AssociationWeights weights,
                                  double gate) {
    const auto rows = static_cast<Eigen::Index>(track_boxes.size());
    const auto cols = static_cast<Eigen::Index>(det_boxes.size());
    Eigen::MatrixXd cost(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            const double c =
                weights.w_emb * cosine_distance(track_embeddings[i], det_embeddings[j]) +
                weights.w_iou * (1.0 - box_iou(track_boxes[i], det_boxes[j]));
            cost(i, j) = c > gate ? kForbidden : c;
        }
    }
    return cost;
}

double triplet_loss_sum(std::span<const Triplet> batch, double margin, bool normalize) {
    const TripletConfig cfg{margin, normalize};
    double sum = 0.0;
    for (const auto& t : batch) {
        sum += triplet_loss_value(t.anchor, t.positive, t.negative, cfg);
    }
    return sum;
}

double classification_loss_sum(std::span<const LabeledEmbedding> batch,
                               const Eigen::MatrixXd& classifier) {
    double sum = 0.0;
    for (const auto& item : batch) {
        sum += classification_loss_value(item.embedding, classifier, item.label);
    }
    return sum;
}

}  // namespace hvis::kernels::serial
