#include <limits>
#include <vector>

#include <omp.h>

#include "hvis/error.hpp"
#include "hvis/kernels.hpp"
#include "hvis/losses.hpp"

namespace hvis::kernels::omp {

ArgminResult squared_distance_argmin(const BinaryMask& mask, std::span<const Point> edges) {
    const std::int64_t m = static_cast<std::int64_t>(edges.size());
    std::int64_t sx = 0;
    std::int64_t sy = 0;
    std::int64_t sq = 0;
    for (const Point& e : edges) {
        sx += e.x;
        sy += e.y;
        sq += static_cast<std::int64_t>(e.x) * e.x + static_cast<std::int64_t>(e.y) * e.y;
    }

    constexpr std::int64_t kNone = std::numeric_limits<std::int64_t>::max();
    const int height = mask.height();
    const int width = mask.width();
    std::vector<ArgminResult> row_best(static_cast<std::size_t>(height),
                                       ArgminResult{{-1, -1}, kNone});

#pragma omp parallel for schedule(static)
    for (int y = 0; y < height; ++y) {
        ArgminResult best{{-1, -1}, kNone};
        const std::int64_t row_term = m * y * y - 2 * y * sy;
        for (int x = 0; x < width; ++x) {
            if (!mask.at(x, y)) {
                continue;
            }
            const std::int64_t cost = row_term + m * x * x - 2 * x * sx;
            if (cost < best.cost) {
                best = {{x, y}, cost};
            }
        }
        row_best[static_cast<std::size_t>(y)] = best;
    }

    ArgminResult best{{-1, -1}, kNone};
    for (const auto& r : row_best) {
        if (r.cost < best.cost) {
            best = r;
        }
    }
    if (best.cost != kNone) {
        best.cost += sq;
    }
    return best;
}

Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> intersection_matrix(
    std::span<const BinaryMask* const> a, std::span<const BinaryMask* const> b) {
    const auto rows = static_cast<std::int64_t>(a.size());
    const auto cols = static_cast<std::int64_t>(b.size());
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> out(rows, cols);
    // size checks happen here: nothing may throw inside the parallel region
    for (const auto* m : a) {
        for (const auto* o : b) {
            if (m->width() != o->width() || m->height() != o->height()) {
                throw Error(ErrorCode::DimensionMismatch, "masks differ in size");
            }
        }
    }
#pragma omp parallel for collapse(2) schedule(dynamic)
    for (std::int64_t i = 0; i < rows; ++i) {
        for (std::int64_t j = 0; j < cols; ++j) {
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
    // Small per-frame matrices are not worth a parallel region.
#pragma omp parallel for collapse(2) schedule(static) if (rows * cols >= 1024)
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
    const auto n = static_cast<std::int64_t>(batch.size());
    std::vector<double> losses(batch.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto& t = batch[static_cast<std::size_t>(i)];
        losses[static_cast<std::size_t>(i)] =
            triplet_loss_value(t.anchor, t.positive, t.negative, cfg);
    }
    double sum = 0.0;
    for (double l : losses) {
        sum += l;
    }
    return sum;
}

double classification_loss_sum(std::span<const LabeledEmbedding> batch,
                               const Eigen::MatrixXd& classifier) {
    const auto n = static_cast<std::int64_t>(batch.size());
    std::vector<double> losses(batch.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto& item = batch[static_cast<std::size_t>(i)];
        losses[static_cast<std::size_t>(i)] =
            classification_loss_value(item.embedding, classifier, item.label);
    }
    double sum = 0.0;
    for (double l : losses) {
        sum += l;
    }
    return sum;
}

}  // namespace hvis::kernels::omp
