#include <benchmark/benchmark.h>

#include <omp.h>

#include <vector>

#include "hvis/kernels.hpp"
#include "hvis/random.hpp"

namespace {

using namespace hvis;

BinaryMask disc_mask(int size) {
    BinaryMask m(size, size);
    const double r = 0.45 * size;
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double dx = x - 0.5 * size;
            const double dy = y - 0.5 * size;
            if (dx * dx + dy * dy <= r * r) {
                m.set(x, y);
            }
        }
    }
    return m;
}

std::vector<Point> boundary(const BinaryMask& m) {
    std::vector<Point> out;
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            if (m.at(x, y) && (!m.in_bounds(x - 1, y) || !m.at(x - 1, y) || !m.in_bounds(x + 1, y) ||
                               !m.at(x + 1, y) || !m.in_bounds(x, y - 1) || !m.at(x, y - 1) ||
                               !m.in_bounds(x, y + 1) || !m.at(x, y + 1))) {
                out.push_back({x, y});
            }
        }
    }
    return out;
}

Embedding random_embedding(Rng& rng, int dim) {
    Embedding e(dim);
    for (int i = 0; i < dim; ++i) {
        e(i) = rng.normal();
    }
    return e;
}

template <auto Kernel>
void BM_Argmin(benchmark::State& state) {
    const auto mask = disc_mask(static_cast<int>(state.range(0)));
    const auto edges = boundary(mask);
    for (auto _ : state) {
        benchmark::DoNotOptimize(Kernel(mask, edges));
    }
    state.counters["pixels"] = static_cast<double>(mask.area());
}

template <auto Kernel>
void BM_Intersection(benchmark::State& state) {
    Rng rng(3);
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<BinaryMask> masks;
    for (std::size_t i = 0; i < n; ++i) {
        BinaryMask m(256, 256);
        const int x0 = static_cast<int>(rng.uniform_index(200));
        const int y0 = static_cast<int>(rng.uniform_index(200));
        for (int y = y0; y < y0 + 50; ++y) {
            for (int x = x0; x < x0 + 40; ++x) {
                m.set(x, y);
            }
        }
        masks.push_back(std::move(m));
    }
    std::vector<const BinaryMask*> ptrs;
    for (const auto& m : masks) {
        ptrs.push_back(&m);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(Kernel(ptrs, ptrs));
    }
}

template <auto Kernel>
void BM_Association(benchmark::State& state) {
    Rng rng(4);
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<Embedding> emb;
    std::vector<Box> boxes;
    for (std::size_t i = 0; i < n; ++i) {
        emb.push_back(random_embedding(rng, kEmbeddingDim));
        const double x = rng.uniform(0, 200);
        const double y = rng.uniform(0, 200);
        boxes.push_back({x, y, x + 30, y + 60});
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(Kernel(emb, boxes, emb, boxes, {}, 0.9));
    }
}

template <auto Kernel>
void BM_Triplet(benchmark::State& state) {
    Rng rng(5);
    std::vector<kernels::Triplet> batch;
    for (int i = 0; i < state.range(0); ++i) {
        batch.push_back({random_embedding(rng, kEmbeddingDim), random_embedding(rng, kEmbeddingDim),
                         random_embedding(rng, kEmbeddingDim)});
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(Kernel(batch, 0.3, false));
    }
}

template <auto Kernel>
void BM_Classification(benchmark::State& state) {
    Rng rng(6);
    const Eigen::MatrixXd w = Eigen::MatrixXd::NullaryExpr(51, kEmbeddingDim, [&] { return 0.1 * rng.normal(); });
    std::vector<kernels::LabeledEmbedding> batch;
    for (int i = 0; i < state.range(0); ++i) {
        batch.push_back({random_embedding(rng, kEmbeddingDim), static_cast<int>(rng.uniform_index(51))});
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(Kernel(batch, w));
    }
}

}  // namespace

BENCHMARK(BM_Argmin<kernels::serial::squared_distance_argmin>)->Name("argmin/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_Argmin<kernels::omp::squared_distance_argmin>)->Name("argmin/omp")->Arg(64)->Arg(256);
BENCHMARK(BM_Intersection<kernels::serial::intersection_matrix>)->Name("intersection/serial")->Arg(10)->Arg(40);
BENCHMARK(BM_Intersection<kernels::omp::intersection_matrix>)->Name("intersection/omp")->Arg(10)->Arg(40);
BENCHMARK(BM_Association<kernels::serial::association_costs>)->Name("association/serial")->Arg(10)->Arg(100);
BENCHMARK(BM_Association<kernels::omp::association_costs>)->Name("association/omp")->Arg(10)->Arg(100);
BENCHMARK(BM_Triplet<kernels::serial::triplet_loss_sum>)->Name("triplet/serial")->Arg(1000);
BENCHMARK(BM_Triplet<kernels::omp::triplet_loss_sum>)->Name("triplet/omp")->Arg(1000);
BENCHMARK(BM_Classification<kernels::serial::classification_loss_sum>)->Name("classification/serial")->Arg(1000);
BENCHMARK(BM_Classification<kernels::omp::classification_loss_sum>)->Name("classification/omp")->Arg(1000);

int main(int argc, char** argv) {
    benchmark::Initialize(&argc, argv);
    benchmark::AddCustomContext("omp_max_threads", std::to_string(omp_get_max_threads()));
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
