#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hvis/error.hpp"
#include "hvis/losses.hpp"
#include "oracles.hpp"

using namespace hvis;

namespace {

Embedding random_embedding(Rng& rng, int dim = kEmbeddingDim) {
    Embedding e(dim);
    for (int i = 0; i < dim; ++i) {
        e(i) = rng.normal();
    }
    return e;
}

bool throws_code(ErrorCode code, const auto& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code() == code;
    }
    return false;
}

}  // namespace

TEST_CASE("triplet_loss examples") {
    Embedding a = Embedding::Zero(kEmbeddingDim);
    Embedding n = Embedding::Zero(kEmbeddingDim);
    n(0) = 1.0;
    const TripletConfig cfg{0.5};
    const auto r = triplet_loss(a, a, n, cfg);
    CHECK(r.loss == 0.0);
    CHECK(r.grad_anchor.isZero());
    CHECK(r.grad_positive.isZero());
    CHECK(r.grad_negative.isZero());
    n(0) = 0.5;
    CHECK(triplet_loss(a, a, n, cfg).loss == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(triplet_loss_value(a, a, n, cfg) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(throws_code(ErrorCode::DimensionMismatch, [&] { triplet_loss(a, a, Embedding::Zero(3)); }));
    Embedding bad = a;
    bad(3) = std::nan("");
    CHECK(throws_code(ErrorCode::NonFinite, [&] { triplet_loss(a, bad, n); }));
}

TEST_CASE("triplet_loss properties") {
    Rng rng(21);
    for (int t = 0; t < 300; ++t) {
        const Embedding a = random_embedding(rng, 8);
        const Embedding p = random_embedding(rng, 8);
        const Embedding n = random_embedding(rng, 8);
        const TripletConfig cfg{rng.uniform(0, 3)};
        const double loss = triplet_loss(a, p, n, cfg).loss;
        REQUIRE(loss >= 0.0);
        const double dp = (a - p).squaredNorm();
        const double dn = (a - n).squaredNorm();
        if (dp + cfg.margin_alpha <= dn) {
            REQUIRE(loss == 0.0);
        } else {
            REQUIRE(loss == doctest::Approx(dp - dn + cfg.margin_alpha));
        }
        REQUIRE(loss == triplet_loss_value(a, p, n, cfg));
    }
}

TEST_CASE("triplet_loss gradients match finite differences") {
    Rng rng(22);
    int active = 0;
    for (int t = 0; t < 100; ++t) {
        const Embedding a = random_embedding(rng);
        const Embedding p = random_embedding(rng);
        const Embedding n = random_embedding(rng);
        // margin chosen so the hinge is active with room to spare
        const double gap = (a - n).squaredNorm() - (a - p).squaredNorm();
        for (bool normalize : {false, true}) {
            TripletConfig cfg{std::max(0.0, gap) + 5.0, normalize};
            if (normalize) {
                cfg.margin_alpha = 5.0;
            }
            const auto r = triplet_loss(a, p, n, cfg);
            REQUIRE(r.loss > 0.0);
            ++active;
            const auto fa = [&](const Eigen::VectorXd& x) { return triplet_loss_value(x, p, n, cfg); };
            const auto fp = [&](const Eigen::VectorXd& x) { return triplet_loss_value(a, x, n, cfg); };
            const auto fn = [&](const Eigen::VectorXd& x) { return triplet_loss_value(a, p, x, cfg); };
            REQUIRE(oracle::relative_error(r.grad_anchor, oracle::numeric_gradient(fa, a)) < 1e-5);
            REQUIRE(oracle::relative_error(r.grad_positive, oracle::numeric_gradient(fp, p)) < 1e-5);
            REQUIRE(oracle::relative_error(r.grad_negative, oracle::numeric_gradient(fn, n)) < 1e-5);
        }
    }
    CHECK(active == 200);
}

TEST_CASE("classification_loss examples") {
    for (int classes : {2, 5, 11}) {
        const Eigen::MatrixXd w = Eigen::MatrixXd::Zero(classes, kEmbeddingDim);
        const Embedding e = Embedding::Ones(kEmbeddingDim);
        CHECK(classification_loss(e, w, classes - 1).loss ==
              doctest::Approx(std::log(classes)).epsilon(1e-14));
    }
    // growing margin of the correct class drives the loss down toward 0
    double previous = std::numeric_limits<double>::infinity();
    for (double margin : {0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0}) {
        Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 4);
        w(1, 0) = margin;
        Embedding e = Embedding::Zero(4);
        e(0) = 1.0;
        const double loss = classification_loss_value(e, w, 1);
        CHECK(loss < previous);
        CHECK(loss >= 0.0);
        previous = loss;
    }
    CHECK(previous < 1e-15);
    const Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 4);
    CHECK(throws_code(ErrorCode::LabelOutOfRange, [&] { classification_loss(Embedding::Zero(4), w, 3); }));
    CHECK(throws_code(ErrorCode::LabelOutOfRange, [&] { classification_loss(Embedding::Zero(4), w, -1); }));
    CHECK(throws_code(ErrorCode::DimensionMismatch, [&] { classification_loss(Embedding::Zero(5), w, 0); }));
}

TEST_CASE("classification_loss gradients match finite differences") {
    Rng rng(23);
    for (int t = 0; t < 100; ++t) {
        const int classes = 2 + static_cast<int>(rng.uniform_index(8));
        Eigen::MatrixXd w(classes, kEmbeddingDim);
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            w.data()[i] = 0.1 * rng.normal();
        }
        const Embedding e = random_embedding(rng);
        const int label = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(classes)));
        const auto r = classification_loss(e, w, label);
        const auto fe = [&](const Eigen::VectorXd& x) { return classification_loss_value(x, w, label); };
        REQUIRE(oracle::relative_error(r.grad_embedding, oracle::numeric_gradient(fe, e)) < 1e-5);
        const Eigen::VectorXd flat = Eigen::Map<const Eigen::VectorXd>(w.data(), w.size());
        const auto fw = [&](const Eigen::VectorXd& x) {
            const Eigen::MatrixXd m = Eigen::Map<const Eigen::MatrixXd>(x.data(), classes, kEmbeddingDim);
            return classification_loss_value(e, m, label);
        };
        const Eigen::VectorXd analytic = Eigen::Map<const Eigen::VectorXd>(r.grad_weights.data(), r.grad_weights.size());
        REQUIRE(oracle::relative_error(analytic, oracle::numeric_gradient(fw, flat)) < 1e-5);
    }
}

TEST_CASE("classification_loss is equivariant under class permutation") {
    Rng rng(24);
    for (int t = 0; t < 50; ++t) {
        const int classes = 6;
        Eigen::MatrixXd w(classes, 16);
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            w.data()[i] = rng.normal();
        }
        const Embedding e = random_embedding(rng, 16);
        std::vector<int> perm(classes);
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = classes - 1; i > 0; --i) {
            std::swap(perm[static_cast<std::size_t>(i)],
                      perm[rng.uniform_index(static_cast<std::size_t>(i + 1))]);
        }
        Eigen::MatrixXd permuted(classes, 16);
        for (int i = 0; i < classes; ++i) {
            permuted.row(perm[static_cast<std::size_t>(i)]) = w.row(i);
        }
        for (int label = 0; label < classes; ++label) {
            REQUIRE(classification_loss_value(e, permuted, perm[static_cast<std::size_t>(label)]) ==
                    doctest::Approx(classification_loss_value(e, w, label)).epsilon(1e-12));
        }
    }
}

TEST_CASE("id_loss") {
    const Embedding z = Embedding::Zero(4);
    Embedding far = z;
    far(0) = 10.0;
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2, 4);
    w(1, 0) = 100.0;
    // hinge inactive and a dominant correct class: both parts vanish
    const std::vector<Triplet> quiet{{z, z, far}};
    CHECK(id_loss(quiet, std::vector<LabeledEmbedding>{{far, 1}}, w) == doctest::Approx(0.0).epsilon(1e-12));

    // triplet mean 0.2 and classification mean ln 2
    Embedding n1 = z;
    n1(0) = std::sqrt(0.1);
    Embedding n2 = z;
    n2(0) = std::sqrt(0.2);
    const std::vector<Triplet> tri{{z, z, n1}, {z, z, n2}};  // 0.2 and 0.1 at alpha 0.3
    const Eigen::MatrixXd flat = Eigen::MatrixXd::Zero(2, 4);
    const std::vector<LabeledEmbedding> cls{{z, 0}, {far, 1}};
    CHECK(id_loss(tri, cls, flat) == doctest::Approx(0.15 + std::log(2.0)).epsilon(1e-12));
    CHECK(id_loss(std::vector<Triplet>{{z, z, n1}}, cls, flat) ==
          doctest::Approx(0.2 + std::log(2.0)).epsilon(1e-12));

    Rng rng(25);
    std::vector<Triplet> many;
    std::vector<LabeledEmbedding> labeled;
    Eigen::MatrixXd wr(4, 8);
    for (Eigen::Index i = 0; i < wr.size(); ++i) {
        wr.data()[i] = rng.normal();
    }
    for (int i = 0; i < 40; ++i) {
        many.push_back({random_embedding(rng, 8), random_embedding(rng, 8), random_embedding(rng, 8)});
        labeled.push_back({random_embedding(rng, 8), static_cast<int>(rng.uniform_index(4))});
    }
    const double base = id_loss(many, labeled, wr);
    std::reverse(many.begin(), many.end());
    std::rotate(labeled.begin(), labeled.begin() + 7, labeled.end());
    CHECK(id_loss(many, labeled, wr) == doctest::Approx(base).epsilon(1e-12));
    CHECK(throws_code(ErrorCode::EmptyBatch, [&] { id_loss({}, labeled, wr); }));
    CHECK(throws_code(ErrorCode::EmptyBatch, [&] { id_loss(many, {}, wr); }));
}

TEST_CASE("embedding_distance") {
    Rng rng(26);
    const Embedding a = random_embedding(rng);
    CHECK(embedding_distance(a, a) == 0.0);
    Embedding e0 = Embedding::Zero(kEmbeddingDim);
    Embedding e1 = e0;
    e0(0) = 1.0;
    e1(1) = 1.0;
    CHECK(embedding_distance(e0, e1) == 2.0);
    for (int t = 0; t < 50; ++t) {
        const Embedding x = random_embedding(rng);
        const Embedding y = random_embedding(rng);
        double sum = 0.0;
        for (int i = 0; i < kEmbeddingDim; ++i) {
            sum += (x(i) - y(i)) * (x(i) - y(i));
        }
        REQUIRE(embedding_distance(x, y) == doctest::Approx(sum).epsilon(1e-12));
        REQUIRE(embedding_distance(x, y) == embedding_distance(y, x));
        REQUIRE(embedding_distance(x, y) > 0.0);
    }
    CHECK(throws_code(ErrorCode::DimensionMismatch, [&] { embedding_distance(a, Embedding::Zero(3)); }));
}

TEST_CASE("cosine_distance") {
    Embedding e0 = Embedding::Zero(4);
    Embedding e1 = e0;
    e0(0) = 1.0;
    e1(1) = 1.0;
    CHECK(cosine_distance(e0, e1) == 1.0);
    CHECK(cosine_distance(e0, 3.0 * e0) == doctest::Approx(0.0));
    CHECK(cosine_distance(e0, -e0) == 1.0);
    CHECK(cosine_distance(Embedding::Zero(4), e0) == 1.0);
}

TEST_CASE("mine_triplets") {
    const std::vector<int> labels{1, 0, 1, 2, -1, 2};
    const auto t = mine_triplets(labels);
    std::vector<TripletIndex> expect;
    for (std::size_t a = 0; a < labels.size(); ++a) {
        for (std::size_t p = 0; p < labels.size(); ++p) {
            for (std::size_t n = 0; n < labels.size(); ++n) {
                if (labels[a] >= 1 && a != p && labels[p] == labels[a] && labels[n] >= 1 &&
                    labels[n] != labels[a]) {
                    expect.push_back({a, p, n});
                }
            }
        }
    }
    CHECK(t == expect);
    CHECK(t.size() == 8);
    CHECK(mine_triplets(std::vector<int>{1, 1, 1}).empty());
    CHECK(mine_triplets(std::vector<int>{0, -1}).empty());
}
