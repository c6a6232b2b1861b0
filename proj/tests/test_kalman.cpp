#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "hvis/error.hpp"
#include "hvis/kalman.hpp"
#include "hvis/random.hpp"

using namespace hvis;

namespace {

void require_psd(const StateMatrix& p) {
    REQUIRE((p - p.transpose()).cwiseAbs().maxCoeff() <= 1e-9);
    const Eigen::SelfAdjointEigenSolver<StateMatrix> eig(p);
    REQUIRE(eig.eigenvalues().minCoeff() >= -1e-9);
}

Box box_at(double cx, double cy, double w, double h) {
    return {cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2};
}

}  // namespace

TEST_CASE("measurement conversion") {
    const Box b{10, 20, 30, 60};
    const auto z = to_measurement(b);
    CHECK(z(0) == 20.0);
    CHECK(z(1) == 40.0);
    CHECK(z(2) == 0.5);
    CHECK(z(3) == 40.0);
    CHECK(from_measurement(z) == b);
}

TEST_CASE("initiate") {
    const KalmanFilter kf;
    const auto s = kf.initiate({0, 0, 10, 20});
    CHECK(s.mean.tail<4>().isZero());
    CHECK(s.covariance.isDiagonal());
    CHECK(s.covariance(0, 0) == doctest::Approx(std::pow(2 * 20.0 / 20, 2)));
    CHECK(s.covariance(4, 4) == doctest::Approx(std::pow(10 * 20.0 / 160, 2)));
    CHECK_THROWS_AS(kf.initiate({0, 0, 0, 5}), Error);
}

TEST_CASE("predict") {
    const KalmanFilter kf;
    auto s = kf.initiate(box_at(50, 50, 10, 20));
    auto p = kf.predict(s);
    CHECK(p.mean.head<4>() == s.mean.head<4>());
    s.mean(4) = 2.0;
    p = kf.predict(s);
    CHECK(p.mean(0) == 52.0);
    CHECK(p.mean(1) == 50.0);
    double trace = s.covariance.trace();
    for (int i = 0; i < 20; ++i) {
        s = kf.predict(s);
        CHECK(s.covariance.trace() > trace);
        trace = s.covariance.trace();
    }
}

TEST_CASE("update") {
    const KalmanFilter kf;
    const auto s = kf.predict(kf.initiate(box_at(50, 50, 10, 20)));
    const auto u = kf.update(s, s.box());
    CHECK((u.mean - s.mean).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(u.covariance.trace() < s.covariance.trace());

    KalmanConfig exact;
    exact.measurement_noise_scale = 0.0;
    const KalmanFilter trusting(exact);
    const Box z = box_at(57, 44, 12, 18);
    const auto v = trusting.update(s, z);
    CHECK(v.mean(0) == doctest::Approx(57.0).epsilon(1e-12));
    CHECK(v.mean(1) == doctest::Approx(44.0).epsilon(1e-12));
    CHECK(v.mean(3) == doctest::Approx(18.0).epsilon(1e-12));
    CHECK_THROWS_AS(kf.update(s, {0, 0, -1, 5}), Error);
}

TEST_CASE("constant velocity target is tracked exactly without noise") {
    KalmanConfig cfg;
    cfg.process_noise_scale = 0.0;
    cfg.measurement_noise_scale = 0.0;
    const KalmanFilter kf(cfg);
    const double vx = 3.5;
    const double vy = -1.25;
    auto truth = [&](int t) { return box_at(100 + vx * t, 80 + vy * t, 16, 40); };
    auto s = kf.initiate(truth(0));
    for (int t = 1; t <= 3; ++t) {
        s = kf.update(kf.predict(s), truth(t));
    }
    const auto next = kf.predict(s);
    CHECK(std::abs(next.mean(0) - truth(4).center_x()) < 1e-6);
    CHECK(std::abs(next.mean(1) - truth(4).center_y()) < 1e-6);
}

TEST_CASE("covariance stays symmetric PSD") {
    Rng rng(51);
    for (double scale : {1.0, 0.0}) {
        KalmanConfig cfg;
        cfg.process_noise_scale = scale;
        cfg.measurement_noise_scale = scale;
        const KalmanFilter kf(cfg);
        auto s = kf.initiate(box_at(100, 100, 20, 40));
        for (int i = 0; i < 1000; ++i) {
            if (rng.uniform01() < 0.5) {
                s = kf.predict(s);
            } else {
                const double h = rng.uniform(10, 80);
                s = kf.update(s, box_at(rng.uniform(0, 200), rng.uniform(0, 200), rng.uniform(0.2, 1.0) * h, h));
            }
            require_psd(s.covariance);
        }
    }
}
