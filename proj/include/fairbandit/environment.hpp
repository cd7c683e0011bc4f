#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "fairbandit/core.hpp"
#include "fairbandit/rng.hpp"

namespace fairbandit {

/// Mean of the exponential shortfall 1 - mu* used when generating instances.
inline constexpr double kShortfallMean = 0.04;
/// Lowest mean a generated instance may contain.
inline constexpr double kMinGeneratedMean = 0.1;

struct BanditInstance {
    RewardMatrix mu_star;
    Policy opt_policy;
    double opt_nsw;
    std::uint64_t seed;

    /// Builds an instance around a given matrix, solving for its optimal policy.
    static BanditInstance from_matrix(RewardMatrix mu_star, std::uint64_t seed = 0);
};

/// mu*_ja = max(0.1, 1 - X) with X ~ Exp(mean 0.04), i.i.d.; optimum from a tight solve.
BanditInstance generate_instance(std::size_t n_agents, std::size_t n_arms, std::uint64_t seed);

/// One Bernoulli(mu*_{j,arm}) draw per agent, written into `out`.
void sample_rewards_into(const RewardMatrix& mu_star, std::size_t arm, Rng& rng, std::span<double> out);
std::vector<double> sample_rewards(const RewardMatrix& mu_star, std::size_t arm, Rng& rng);

/// Plain-text form: header "N K seed", then one agent per row, space-separated.
void write_instance(const BanditInstance& instance, const std::filesystem::path& path);
BanditInstance read_instance(const std::filesystem::path& path);

}  // namespace fairbandit
