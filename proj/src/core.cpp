#include "fairbandit/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace fairbandit {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::DimensionMismatch: return "dimension mismatch";
        case ErrorCode::InvalidArgument: return "invalid argument";
        case ErrorCode::ZeroCount: return "zero count";
        case ErrorCode::ZeroReward: return "zero expected reward";
        case ErrorCode::NonFinite: return "non-finite value";
        case ErrorCode::Infeasible: return "infeasible";
        case ErrorCode::GridTooLarge: return "grid too large";
        case ErrorCode::Config: return "config error";
        case ErrorCode::Io: return "i/o error";
    }
    return "unknown error";
}

namespace {

void check_policy_dims(std::span<const double> policy, const RewardMatrix& mu) {
    if (policy.size() != mu.n_arms()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "policy has " + std::to_string(policy.size()) + " arms, reward matrix has " +
                        std::to_string(mu.n_arms()));
    }
}

void check_same_shape(const RewardMatrix& a, const RewardMatrix& b) {
    if (a.n_agents() != b.n_agents() || a.n_arms() != b.n_arms()) {
        throw Error(ErrorCode::DimensionMismatch, "reward matrices differ in shape");
    }
}

}  // namespace

RewardMatrix::RewardMatrix(std::size_t n_agents, std::size_t n_arms, double fill)
    : RewardMatrix(n_agents, n_arms, std::vector<double>(n_agents * n_arms, fill)) {}

RewardMatrix::RewardMatrix(std::size_t n_agents, std::size_t n_arms, std::vector<double> values)
    : n_agents_(n_agents), n_arms_(n_arms), values_(std::move(values)) {
    if (n_agents_ == 0 || n_arms_ == 0) {
        throw Error(ErrorCode::InvalidArgument, "reward matrix needs at least one agent and one arm");
    }
    if (values_.size() != n_agents_ * n_arms_) {
        throw Error(ErrorCode::DimensionMismatch, "reward matrix value count does not match N*K");
    }
    for (double v : values_) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw Error(ErrorCode::InvalidArgument, "reward matrix entry outside [0,1]: " + std::to_string(v));
        }
    }
}

RewardMatrix RewardMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw Error(ErrorCode::InvalidArgument, "reward matrix needs at least one row");
    const std::size_t k = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * k);
    for (const auto& r : rows) {
        if (r.size() != k) throw Error(ErrorCode::DimensionMismatch, "ragged reward matrix rows");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return RewardMatrix(rows.size(), k, std::move(flat));
}

RewardMatrix RewardMatrix::clamped_below(double floor) const {
    std::vector<double> v = values_;
    for (double& x : v) x = std::max(x, floor);
    return RewardMatrix(n_agents_, n_arms_, std::move(v));
}

Policy::Policy(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw Error(ErrorCode::InvalidArgument, "policy needs at least one arm");
    double sum = 0.0;
    for (double p : probs_) {
        if (!(p >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative or NaN policy entry");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kSimplexTolerance) {
        throw Error(ErrorCode::InvalidArgument, "policy sums to " + std::to_string(sum));
    }
}

Policy Policy::uniform(std::size_t n_arms) {
    if (n_arms == 0) throw Error(ErrorCode::InvalidArgument, "policy needs at least one arm");
    return Policy(std::vector<double>(n_arms, 1.0 / static_cast<double>(n_arms)));
}

Policy Policy::vertex(std::size_t n_arms, std::size_t arm) {
    if (arm >= n_arms) throw Error(ErrorCode::InvalidArgument, "vertex arm out of range");
    std::vector<double> p(n_arms, 0.0);
    p[arm] = 1.0;
    return Policy(std::move(p));
}

BanditState::BanditState(std::size_t n_agents, std::size_t n_arms)
    : n_agents_(n_agents), n_arms_(n_arms), counts_(n_arms, 0), reward_sums_(n_agents * n_arms, 0.0) {
    if (n_agents == 0 || n_arms == 0) {
        throw Error(ErrorCode::InvalidArgument, "bandit state needs at least one agent and one arm");
    }
}

double BanditState::empirical_mean(std::size_t agent, std::size_t arm) const noexcept {
    const auto n = counts_[arm];
    if (n == 0) return 0.0;
    return std::min(1.0, reward_sums_[agent * n_arms_ + arm] / static_cast<double>(n));
}

RewardMatrix BanditState::empirical_means() const {
    std::vector<double> v(n_agents_ * n_arms_);
    for (std::size_t j = 0; j < n_agents_; ++j) {
        for (std::size_t a = 0; a < n_arms_; ++a) v[j * n_arms_ + a] = empirical_mean(j, a);
    }
    return RewardMatrix(n_agents_, n_arms_, std::move(v));
}

void BanditState::record(std::size_t arm, std::span<const double> rewards) {
    if (arm >= n_arms_) throw Error(ErrorCode::InvalidArgument, "arm out of range");
    if (rewards.size() != n_agents_) {
        throw Error(ErrorCode::DimensionMismatch, "reward vector length differs from agent count");
    }
    for (std::size_t j = 0; j < n_agents_; ++j) {
        const double r = rewards[j];
        if (!(r >= 0.0 && r <= 1.0)) throw Error(ErrorCode::InvalidArgument, "reward outside [0,1]");
        reward_sums_[j * n_arms_ + arm] += r;
    }
    ++counts_[arm];
    ++round_;
}

double RegretTrace::regret_at(std::uint64_t t) const {
    if (t == 0) return 0.0;
    if (t > records_.size()) throw Error(ErrorCode::InvalidArgument, "round beyond trace length");
    return records_[t - 1].cum_regret;
}

void RegretTrace::append(std::size_t arm, const Policy& policy, double nsw_t) {
    if (policy.size() != n_arms_) throw Error(ErrorCode::DimensionMismatch, "policy width differs from trace");
    const double prev = records_.empty() ? 0.0 : records_.back().cum_regret;
    records_.push_back({records_.size() + 1, arm, nsw_t, prev + (opt_nsw_ - nsw_t)});
    policies_.insert(policies_.end(), policy.probs().begin(), policy.probs().end());
}

double nsw(std::span<const double> policy, const RewardMatrix& mu) {
    check_policy_dims(policy, mu);
    double product = 1.0;
    for (std::size_t j = 0; j < mu.n_agents(); ++j) {
        const auto row = mu.row(j);
        product *= std::inner_product(row.begin(), row.end(), policy.begin(), 0.0);
    }
    return product;
}

std::vector<double> log_nsw_gradient(std::span<const double> policy, const RewardMatrix& mu) {
    check_policy_dims(policy, mu);
    std::vector<double> grad(mu.n_arms(), 0.0);
    for (std::size_t j = 0; j < mu.n_agents(); ++j) {
        const auto row = mu.row(j);
        const double expected = std::inner_product(row.begin(), row.end(), policy.begin(), 0.0);
        if (!(expected > 0.0)) {
            throw Error(ErrorCode::ZeroReward, "agent " + std::to_string(j) + " has zero expected reward");
        }
        for (std::size_t a = 0; a < mu.n_arms(); ++a) grad[a] += row[a] / expected;
    }
    return grad;
}

double instantaneous_regret(double opt_nsw, const Policy& policy, const RewardMatrix& mu_star) {
    return opt_nsw - nsw(policy, mu_star);
}

LipschitzCheck lipschitz_gap_bound(const Policy& policy, const RewardMatrix& mu1, const RewardMatrix& mu2) {
    check_same_shape(mu1, mu2);
    check_policy_dims(policy.probs(), mu1);
    double bound = 0.0;
    for (std::size_t j = 0; j < mu1.n_agents(); ++j) {
        for (std::size_t a = 0; a < mu1.n_arms(); ++a) bound += policy[a] * std::abs(mu1(j, a) - mu2(j, a));
    }
    return {std::abs(nsw(policy, mu1) - nsw(policy, mu2)), bound};
}

}  // namespace fairbandit
