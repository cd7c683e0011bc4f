#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairbandit/core.hpp"
#include "fairbandit/optimizer.hpp"
#include "fairbandit/rng.hpp"

namespace fairbandit {

struct BanditInstance;

/// Parameters of the confidence width
///   w = width_scale * ( sqrt(12 (1 - mu_hat) L / n) + 12 L / n )
/// with L = ln(4NKT/delta), or ln(8NKt^2/delta) in the anytime variant.
struct ConfidenceSpec {
    double delta = 0.01;
    std::uint64_t horizon = 1;
    bool anytime = false;
    double width_scale = 0.5;

    void validate() const;
};

/// Log term L for round t (1-based).
double confidence_log_term(const ConfidenceSpec& spec, std::size_t n_agents, std::size_t n_arms, std::uint64_t t);

/// Unscaled width sqrt(12 (1 - mu_hat) L / n) + 12 L / n.
double width_for_log_term(double mu_hat, std::uint64_t count, double log_term);

double confidence_width(double mu_hat, std::uint64_t count, const ConfidenceSpec& spec, std::size_t n_agents,
                        std::size_t n_arms, std::uint64_t t);

/// Optimistic matrix U = min(mu_hat + w, 1) for the round after `state`. Every count must be >= 1.
RewardMatrix ucb_matrix(const BanditState& state, const ConfidenceSpec& spec);

struct StepResult {
    Policy policy;
    std::size_t arm;
};

/// Inverse-CDF draw from `policy` using a single uniform; the lowest arm wins ties.
std::size_t sample_arm(const Policy& policy, Rng& rng);

/// Fair multi-agent UCB: one sweep over the arms, then maximize NSW of the optimistic matrix.
StepResult fair_ucb_step(const BanditState& state, const ConfidenceSpec& spec, const TerminationRule& rule, Rng& rng);

// ---------------------------------------------------------------------------
// High start-up cost variant
// ---------------------------------------------------------------------------

struct HighStartupParams {
    /// Constant in front of N^2 ln(6NTK/delta) ln T; 180 is the full-strength schedule.
    double warmup_multiplier = 180.0;
    std::size_t restarts = 1;
};

/// Rounds each arm is pulled during warm-up: max(1, m N^2 ln(6NTK/delta) ln T).
double warmup_block_length(std::size_t n_agents, std::size_t n_arms, std::uint64_t horizon, double delta,
                           double warmup_multiplier);

/// Arm (0-based) pulled at round t (1-based) during warm-up, or nullopt once warm-up is over.
std::optional<std::size_t> warmup_arm(std::uint64_t t, std::size_t n_arms, double block_length);

/// Widths with L = ln(6NKT/delta), unscaled.
std::vector<double> high_startup_widths(const BanditState& state, std::uint64_t horizon, double delta);

/// Exploration bonus eta_a: coefficient groups on sum_j (1 - mu_hat_ja), on 1/N_a and on sum_j w_ja.
/// `widths` is N x K row-major. Throws ZeroCount if some arm was never pulled.
std::vector<double> eta_vector(const BanditState& state, std::span<const double> widths, std::size_t n_agents,
                               std::size_t n_arms, std::uint64_t horizon, double delta);

/// Feasible policies satisfy sum_a pi_a sum_j (1 - mu_hat_ja) <= 1 + 2 ln T.
HalfSpace shortfall_constraint(const BanditState& state, std::uint64_t horizon);

StepResult high_startup_step(const BanditState& state, const ConfidenceSpec& spec, const TerminationRule& rule,
                             const HighStartupParams& params, Rng& rng);

// ---------------------------------------------------------------------------
// Additive-bonus baseline
// ---------------------------------------------------------------------------

struct BaselineParams {
    double bonus_scale = 0.8;
    std::size_t restarts = 1;
};

/// bonus_a = bonus_scale * N * sqrt(ln(N K t) / N_a) for round t.
std::vector<double> baseline_bonus(const BanditState& state, double bonus_scale);

/// argmax nsw(pi, mu_hat) + bonus . pi. Every arm must have been pulled.
StepResult baseline_ucb_step(const BanditState& state, const TerminationRule& rule, const BaselineParams& params,
                             Rng& rng);

// ---------------------------------------------------------------------------
// Episodes
// ---------------------------------------------------------------------------

enum class AlgorithmKind { FairUcb, HighStartupUcb, BaselineUcb };

std::string_view algorithm_name(AlgorithmKind kind) noexcept;
/// Accepts fair-ucb, high-startup, baseline-ucb.
AlgorithmKind parse_algorithm(std::string_view name);

struct AlgorithmConfig {
    AlgorithmKind kind = AlgorithmKind::FairUcb;
    TerminationRule rule = TerminationRule::fair_ucb();
    HighStartupParams high_startup{};
    BaselineParams baseline{};

    static AlgorithmConfig defaults(AlgorithmKind kind);
    std::string_view name() const noexcept { return algorithm_name(kind); }
};

/// Seen once per round before the state is updated with that round's rewards.
struct RoundView {
    std::uint64_t t;
    const BanditState& state;
    const Policy& policy;
    std::size_t arm;
};
using RoundObserver = std::function<void(const RoundView&)>;

/// Plays `horizon` rounds of `config` against `instance`; deterministic in `seed`.
RegretTrace run_episode(const AlgorithmConfig& config, const BanditInstance& instance, std::uint64_t horizon,
                        ConfidenceSpec spec, std::uint64_t seed, const RoundObserver& observer = {});

}  // namespace fairbandit
