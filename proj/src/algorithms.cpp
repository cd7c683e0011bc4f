#include "fairbandit/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fairbandit/environment.hpp"

namespace fairbandit {

void ConfidenceSpec::validate() const {
    if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::InvalidArgument, "delta must lie in (0,1)");
    if (horizon < 1) throw Error(ErrorCode::InvalidArgument, "horizon must be >= 1");
    if (!(width_scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "width_scale must be > 0");
}

double confidence_log_term(const ConfidenceSpec& spec, std::size_t n_agents, std::size_t n_arms, std::uint64_t t) {
    const double nk = static_cast<double>(n_agents) * static_cast<double>(n_arms);
    if (spec.anytime) {
        const double td = static_cast<double>(t);
        return std::log(8.0 * nk * td * td / spec.delta);
    }
    return std::log(4.0 * nk * static_cast<double>(spec.horizon) / spec.delta);
}

double width_for_log_term(double mu_hat, std::uint64_t count, double log_term) {
    if (count == 0) throw Error(ErrorCode::ZeroCount, "confidence width queried for an unpulled arm");
    const double n = static_cast<double>(count);
    return std::sqrt(12.0 * std::max(0.0, 1.0 - mu_hat) * log_term / n) + 12.0 * log_term / n;
}

double confidence_width(double mu_hat, std::uint64_t count, const ConfidenceSpec& spec, std::size_t n_agents,
                        std::size_t n_arms, std::uint64_t t) {
    return spec.width_scale * width_for_log_term(mu_hat, count, confidence_log_term(spec, n_agents, n_arms, t));
}

RewardMatrix ucb_matrix(const BanditState& state, const ConfidenceSpec& spec) {
    const std::size_t n = state.n_agents();
    const std::size_t k = state.n_arms();
    const double log_term = confidence_log_term(spec, n, k, state.round() + 1);
    std::vector<double> u(n * k);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t a = 0; a < k; ++a) {
            const double mean = state.empirical_mean(j, a);
            const double w = spec.width_scale * width_for_log_term(mean, state.count(a), log_term);
            u[j * k + a] = std::min(mean + w, 1.0);
        }
    }
    return RewardMatrix(n, k, std::move(u));
}

std::size_t sample_arm(const Policy& policy, Rng& rng) {
    const double u = rng.uniform01();
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t a = 0; a < policy.size(); ++a) {
        if (policy[a] <= 0.0) continue;
        last_positive = a;
        cumulative += policy[a];
        if (u < cumulative) return a;
    }
    // Cumulative mass fell short of 1 by rounding.
    return last_positive;
}

namespace {

StepResult sweep_step(std::size_t n_arms, std::uint64_t t) {
    const std::size_t arm = static_cast<std::size_t>(t - 1);
    return {Policy::vertex(n_arms, arm), arm};
}

void require_all_pulled(const BanditState& state) {
    for (std::size_t a = 0; a < state.n_arms(); ++a) {
        if (state.count(a) == 0) {
            throw Error(ErrorCode::ZeroCount, "arm " + std::to_string(a) + " has not been pulled yet");
        }
    }
}

}  // namespace

StepResult fair_ucb_step(const BanditState& state, const ConfidenceSpec& spec, const TerminationRule& rule,
                         Rng& rng) {
    const std::uint64_t t = state.round() + 1;
    if (t <= state.n_arms()) return sweep_step(state.n_arms(), t);
    require_all_pulled(state);
    SolveResult solved = maximize_log_nsw(ucb_matrix(state, spec), rule);
    const std::size_t arm = sample_arm(solved.policy, rng);
    return {std::move(solved.policy), arm};
}

double warmup_block_length(std::size_t n_agents, std::size_t n_arms, std::uint64_t horizon, double delta,
                           double warmup_multiplier) {
    const double n = static_cast<double>(n_agents);
    const double k = static_cast<double>(n_arms);
    const double t = static_cast<double>(horizon);
    const double block = warmup_multiplier * n * n * std::log(6.0 * n * t * k / delta) * std::log(t);
    return std::max(1.0, block);
}

std::optional<std::size_t> warmup_arm(std::uint64_t t, std::size_t n_arms, double block_length) {
    const double td = static_cast<double>(t);
    if (td > static_cast<double>(n_arms) * block_length) return std::nullopt;
    const auto arm = static_cast<std::size_t>(std::ceil(td / block_length));
    return std::min(std::max<std::size_t>(arm, 1), n_arms) - 1;
}

std::vector<double> high_startup_widths(const BanditState& state, std::uint64_t horizon, double delta) {
    const std::size_t n = state.n_agents();
    const std::size_t k = state.n_arms();
    const double log_term = std::log(6.0 * static_cast<double>(n) * static_cast<double>(k) *
                                     static_cast<double>(horizon) / delta);
    std::vector<double> w(n * k);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t a = 0; a < k; ++a) {
            w[j * k + a] = width_for_log_term(state.empirical_mean(j, a), state.count(a), log_term);
        }
    }
    return w;
}

std::vector<double> eta_vector(const BanditState& state, std::span<const double> widths, std::size_t n_agents,
                               std::size_t n_arms, std::uint64_t horizon, double delta) {
    if (state.n_agents() != n_agents || state.n_arms() != n_arms || widths.size() != n_agents * n_arms) {
        throw Error(ErrorCode::DimensionMismatch, "eta inputs disagree on N and K");
    }
    require_all_pulled(state);

    const double n = static_cast<double>(n_agents);
    const double k = static_cast<double>(n_arms);
    const double t = static_cast<double>(horizon);
    const double log_nkt = std::log(6.0 * n * k * t / delta);
    const double sqrt_log_kt = std::sqrt(std::log(6.0 * k * t / delta));
    const double sqrt_two_two_log_t = std::sqrt(2.0 + 2.0 * std::log(t));

    const double shortfall_coef =
        (4.0 * sqrt_log_kt + 6.0 * std::sqrt(2.0) * log_nkt * sqrt_two_two_log_t) * std::sqrt(k / t);
    const double inverse_count_coef = (4.0 * sqrt_log_kt + std::sqrt(1.0 + std::log(t))) * std::sqrt(t / k) +
                                      12.0 * std::sqrt(2.0) * std::sqrt(n) * log_nkt * sqrt_two_two_log_t;
    const double width_coef = 1.0 / (20.0 * std::sqrt(n) / 19.0 - 1.0);

    std::vector<double> eta(n_arms);
    for (std::size_t a = 0; a < n_arms; ++a) {
        double shortfall = 0.0;
        double width_sum = 0.0;
        for (std::size_t j = 0; j < n_agents; ++j) {
            shortfall += 1.0 - state.empirical_mean(j, a);
            width_sum += widths[j * n_arms + a];
        }
        eta[a] = shortfall_coef * shortfall + inverse_count_coef / static_cast<double>(state.count(a)) +
                 width_coef * width_sum;
    }
    return eta;
}

HalfSpace shortfall_constraint(const BanditState& state, std::uint64_t horizon) {
    HalfSpace h{std::vector<double>(state.n_arms(), 0.0), 1.0 + 2.0 * std::log(static_cast<double>(horizon))};
    for (std::size_t a = 0; a < state.n_arms(); ++a) {
        for (std::size_t j = 0; j < state.n_agents(); ++j) h.normal[a] += 1.0 - state.empirical_mean(j, a);
    }
    return h;
}

StepResult high_startup_step(const BanditState& state, const ConfidenceSpec& spec, const TerminationRule& rule,
                             const HighStartupParams& params, Rng& rng) {
    const std::size_t n = state.n_agents();
    const std::size_t k = state.n_arms();
    const std::uint64_t t = state.round() + 1;
    const double block = warmup_block_length(n, k, spec.horizon, spec.delta, params.warmup_multiplier);
    if (const auto arm = warmup_arm(t, k, block)) return {Policy::vertex(k, *arm), *arm};

    HalfSpace constraint = shortfall_constraint(state, spec.horizon);
    if (!constraint.meets_simplex()) {
        const auto arm = static_cast<std::size_t>(rng.below(k));
        return {Policy::vertex(k, arm), arm};
    }
    const auto widths = high_startup_widths(state, spec.horizon, spec.delta);
    const auto eta = eta_vector(state, widths, n, k, spec.horizon, spec.delta);
    SolveResult solved =
        maximize_nsw_plus_linear(state.empirical_means(), eta, constraint, rule, kInitialStep, params.restarts);
    const std::size_t arm = sample_arm(solved.policy, rng);
    return {std::move(solved.policy), arm};
}

std::vector<double> baseline_bonus(const BanditState& state, double bonus_scale) {
    require_all_pulled(state);
    const double n = static_cast<double>(state.n_agents());
    const double t = static_cast<double>(state.round() + 1);
    const double log_term = std::log(n * static_cast<double>(state.n_arms()) * t);
    const double alpha = n;
    std::vector<double> bonus(state.n_arms());
    for (std::size_t a = 0; a < state.n_arms(); ++a) {
        bonus[a] = bonus_scale * alpha * std::sqrt(log_term / static_cast<double>(state.count(a)));
    }
    return bonus;
}

StepResult baseline_ucb_step(const BanditState& state, const TerminationRule& rule, const BaselineParams& params,
                             Rng& rng) {
    const auto bonus = baseline_bonus(state, params.bonus_scale);
    SolveResult solved =
        maximize_nsw_plus_linear(state.empirical_means(), bonus, std::nullopt, rule, kInitialStep, params.restarts);
    const std::size_t arm = sample_arm(solved.policy, rng);
    return {std::move(solved.policy), arm};
}

std::string_view algorithm_name(AlgorithmKind kind) noexcept {
    switch (kind) {
        case AlgorithmKind::FairUcb: return "fair-ucb";
        case AlgorithmKind::HighStartupUcb: return "high-startup";
        case AlgorithmKind::BaselineUcb: return "baseline-ucb";
    }
    return "unknown";
}

AlgorithmKind parse_algorithm(std::string_view name) {
    for (auto kind : {AlgorithmKind::FairUcb, AlgorithmKind::HighStartupUcb, AlgorithmKind::BaselineUcb}) {
        if (algorithm_name(kind) == name) return kind;
    }
    throw Error(ErrorCode::Config, "unknown algorithm '" + std::string(name) + "'");
}

AlgorithmConfig AlgorithmConfig::defaults(AlgorithmKind kind) {
    AlgorithmConfig config;
    config.kind = kind;
    config.rule = kind == AlgorithmKind::FairUcb ? TerminationRule::fair_ucb() : TerminationRule::baseline();
    return config;
}

RegretTrace run_episode(const AlgorithmConfig& config, const BanditInstance& instance, std::uint64_t horizon,
                        ConfidenceSpec spec, std::uint64_t seed, const RoundObserver& observer) {
    spec.horizon = horizon;
    spec.validate();
    config.rule.validate();

    const RewardMatrix& mu = instance.mu_star;
    const std::size_t n = mu.n_agents();
    const std::size_t k = mu.n_arms();
    BanditState state(n, k);
    RegretTrace trace(instance.opt_nsw, k);
    Rng policy_rng(derive_seed(seed, "policy"));
    Rng reward_rng(derive_seed(seed, "reward"));
    std::vector<double> rewards(n);

    for (std::uint64_t t = 1; t <= horizon; ++t) {
        StepResult step = [&]() -> StepResult {
            switch (config.kind) {
                case AlgorithmKind::FairUcb: return fair_ucb_step(state, spec, config.rule, policy_rng);
                case AlgorithmKind::HighStartupUcb:
                    return high_startup_step(state, spec, config.rule, config.high_startup, policy_rng);
                case AlgorithmKind::BaselineUcb:
                    if (t <= k) return sweep_step(k, t);
                    return baseline_ucb_step(state, config.rule, config.baseline, policy_rng);
            }
            throw Error(ErrorCode::InvalidArgument, "unknown algorithm kind");
        }();
        if (observer) observer(RoundView{t, state, step.policy, step.arm});
        trace.append(step.arm, step.policy, nsw(step.policy, mu));
        sample_rewards_into(mu, step.arm, reward_rng, rewards);
        state.record(step.arm, rewards);
    }
    return trace;
}

}  // namespace fairbandit
