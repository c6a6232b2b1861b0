#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace hvis {

inline constexpr std::uint64_t kDefaultSeed = 20220214;

// Seeded generator whose derived draws are identical across standard
// libraries: only the mt19937_64 engine (fully specified) is taken from
// <random>; the distributions are implemented here.
class Rng {
public:
    explicit Rng(std::uint64_t seed = kDefaultSeed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform integer in [0, n). n must be > 0.
    std::size_t uniform_index(std::size_t n);

    // Uniform real in [0, 1) with 53 random bits.
    double uniform01();

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal via Box-Muller.
    double normal();

    // k distinct indices drawn uniformly from [0, n), returned ascending.
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

private:
    std::mt19937_64 engine_;
};

}  // namespace hvis
