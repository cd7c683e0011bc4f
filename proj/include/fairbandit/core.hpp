#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fairbandit/error.hpp"

namespace fairbandit {

/// Tolerance on |sum(pi) - 1| accepted by Policy.
inline constexpr double kSimplexTolerance = 1e-9;

/// Gap allowed between a numerically computed optimum and the true one, in NSW units.
/// Regret increments may dip below zero by at most this much.
inline constexpr double kOptimizerGap = 1e-3;

/// Floor applied to every mean entering an NSW solve so log-gradients stay finite.
inline constexpr double kMeanFloor = 1e-3;

/// N x K matrix of mean rewards in [0,1], row-major with one row per agent.
class RewardMatrix {
public:
    RewardMatrix(std::size_t n_agents, std::size_t n_arms, double fill);
    RewardMatrix(std::size_t n_agents, std::size_t n_arms, std::vector<double> values);

    static RewardMatrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t n_agents() const noexcept { return n_agents_; }
    std::size_t n_arms() const noexcept { return n_arms_; }

    double operator()(std::size_t agent, std::size_t arm) const noexcept {
        return values_[agent * n_arms_ + arm];
    }
    std::span<const double> row(std::size_t agent) const noexcept {
        return {values_.data() + agent * n_arms_, n_arms_};
    }
    std::span<const double> values() const noexcept { return values_; }

    /// Copy with every entry raised to at least `floor`.
    RewardMatrix clamped_below(double floor) const;

    friend bool operator==(const RewardMatrix&, const RewardMatrix&) = default;

private:
    std::size_t n_agents_;
    std::size_t n_arms_;
    std::vector<double> values_;
};

/// Point on the probability simplex over arms.
class Policy {
public:
    explicit Policy(std::vector<double> probs);

    static Policy uniform(std::size_t n_arms);
    static Policy vertex(std::size_t n_arms, std::size_t arm);

    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](std::size_t arm) const noexcept { return probs_[arm]; }
    std::span<const double> probs() const noexcept { return probs_; }

    friend bool operator==(const Policy&, const Policy&) = default;

private:
    std::vector<double> probs_;
};

/// Sufficient statistics of the rounds played so far.
class BanditState {
public:
    BanditState(std::size_t n_agents, std::size_t n_arms);

    std::size_t n_agents() const noexcept { return n_agents_; }
    std::size_t n_arms() const noexcept { return n_arms_; }
    /// Number of completed rounds.
    std::uint64_t round() const noexcept { return round_; }
    std::uint64_t count(std::size_t arm) const noexcept { return counts_[arm]; }
    std::span<const std::uint64_t> counts() const noexcept { return counts_; }
    double reward_sum(std::size_t agent, std::size_t arm) const noexcept {
        return reward_sums_[agent * n_arms_ + arm];
    }

    /// Empirical mean of (agent, arm); zero for an arm never pulled.
    double empirical_mean(std::size_t agent, std::size_t arm) const noexcept;
    RewardMatrix empirical_means() const;

    /// Adds one pull of `arm` with a reward in [0,1] for every agent.
    void record(std::size_t arm, std::span<const double> rewards);

private:
    std::size_t n_agents_;
    std::size_t n_arms_;
    std::uint64_t round_ = 0;
    std::vector<std::uint64_t> counts_;
    std::vector<double> reward_sums_;
};

struct RegretRecord {
    std::uint64_t t;
    std::size_t arm;
    double nsw;
    double cum_regret;
};

/// Per-round history of an episode. Policies are stored flattened, K values per round.
class RegretTrace {
public:
    RegretTrace(double opt_nsw, std::size_t n_arms) : opt_nsw_(opt_nsw), n_arms_(n_arms) {}

    double opt_nsw() const noexcept { return opt_nsw_; }
    std::size_t n_arms() const noexcept { return n_arms_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }

    const RegretRecord& operator[](std::size_t i) const noexcept { return records_[i]; }
    const std::vector<RegretRecord>& records() const noexcept { return records_; }
    std::span<const double> policy(std::size_t i) const noexcept {
        return {policies_.data() + i * n_arms_, n_arms_};
    }
    double final_regret() const noexcept { return records_.empty() ? 0.0 : records_.back().cum_regret; }
    /// Cumulative regret after round t (1-based); 0 for t = 0.
    double regret_at(std::uint64_t t) const;

    void append(std::size_t arm, const Policy& policy, double nsw);

private:
    double opt_nsw_;
    std::size_t n_arms_;
    std::vector<RegretRecord> records_;
    std::vector<double> policies_;
};

/// Nash social welfare: product over agents of their expected reward under `policy`.
double nsw(std::span<const double> policy, const RewardMatrix& mu);
inline double nsw(const Policy& policy, const RewardMatrix& mu) { return nsw(policy.probs(), mu); }

/// Gradient of log nsw with respect to the policy.
/// Throws ZeroReward when some agent has zero expected reward.
std::vector<double> log_nsw_gradient(std::span<const double> policy, const RewardMatrix& mu);
inline std::vector<double> log_nsw_gradient(const Policy& policy, const RewardMatrix& mu) {
    return log_nsw_gradient(policy.probs(), mu);
}

double instantaneous_regret(double opt_nsw, const Policy& policy, const RewardMatrix& mu_star);

struct LipschitzCheck {
    double gap;
    double bound;
};

/// |nsw(pi, mu1) - nsw(pi, mu2)| next to sum_j sum_a pi_a |mu1 - mu2|; gap <= bound always.
LipschitzCheck lipschitz_gap_bound(const Policy& policy, const RewardMatrix& mu1, const RewardMatrix& mu2);

}  // namespace fairbandit
