#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace fairpr {

/// Seedable generator used by every stochastic routine in the library.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. All derived quantities (uniform reals, bounded integers,
/// normals) are computed here from raw engine output rather than through
/// <random> distributions, whose algorithms are implementation-defined, so a
/// given seed reproduces the same stream on every standard library.
///
/// Stream splitting: independent tasks of a sweep use
/// `Rng(derive_seed(base, task_index))`.
class Rng {
public:
    static constexpr int kVersion = 1;

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound). Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t bound);

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via Box-Muller (one value per call, the pair's
    /// second half is cached).
    double normal();

private:
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

/// SplitMix64 finalizer applied to (base, stream); used to derive per-task
/// seeds that are decorrelated from each other and from `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

} // namespace fairpr
