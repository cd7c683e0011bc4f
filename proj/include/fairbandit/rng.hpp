#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fairbandit {

/// SplitMix64 finalizer; used to turn (seed, label) pairs into independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for a named sub-stream of `master`. Same inputs give the same seed on every platform.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index = 0) noexcept;

/// Random stream backed by std::mt19937_64, whose output sequence is fixed by the C++ standard.
/// Distributions are computed here rather than through <random> adaptors, whose algorithms
/// are implementation-defined, so draws are reproducible across standard libraries.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

    /// Uniform double in [0,1) with 53 random bits.
    double uniform01();
    /// Exponential with the given mean, by inversion.
    double exponential(double mean);
    bool bernoulli(double p) { return uniform01() < p; }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    Rng split(std::string_view label, std::uint64_t index = 0);

private:
    std::mt19937_64 engine_;
};

}  // namespace fairbandit
