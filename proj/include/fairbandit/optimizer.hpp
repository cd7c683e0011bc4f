#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fairbandit/core.hpp"

namespace fairbandit {

/// Stop when the objective gains less than `min_improvement` over the last `window`
/// iterations, or after `max_iters` iterations.
struct TerminationRule {
    double min_improvement;
    std::size_t window;
    std::size_t max_iters;

    void validate() const;

    /// Setting used for the concave solve in Fair UCB.
    static TerminationRule fair_ucb() { return {2e-4, 20, 10000}; }
    /// Longer run used for the non-concave baseline objective.
    static TerminationRule baseline() { return {1e-6, 30, 10000}; }
    /// Near-exact solves, e.g. for the reference optimum of an instance.
    static TerminationRule tight() { return {1e-13, 50, 200000}; }
};

/// The half-space {pi : normal . pi <= offset}.
struct HalfSpace {
    std::vector<double> normal;
    double offset;

    bool contains(std::span<const double> pi, double tol = 1e-9) const;
    /// True when the half-space meets the simplex, i.e. min_a normal_a <= offset.
    bool meets_simplex() const;
};

/// Initial step of the backtracking line search; halved until the objective does not decrease.
inline constexpr double kInitialStep = 0.1;

struct SolveResult {
    Policy policy;
    double objective;
    std::size_t iterations;
};

/// Euclidean projection onto the probability simplex (sort-and-threshold).
Policy project_to_simplex(std::span<const double> v);

/// Euclidean projection onto the simplex intersected with `h`.
/// Throws Infeasible when the two sets do not meet.
Policy project_to_simplex_halfspace(std::span<const double> v, const HalfSpace& h);

/// Maximizes log nsw(pi, mu) over the simplex by projected gradient ascent from the uniform
/// policy. `mu` is floored at kMeanFloor internally; `objective` is nsw on the input matrix.
SolveResult maximize_log_nsw(const RewardMatrix& mu, const TerminationRule& rule = TerminationRule::fair_ucb(),
                             double step = kInitialStep);

/// Maximizes nsw(pi, mu) + bonus . pi over the simplex (optionally intersected with
/// `constraint`). The objective is not concave, so the ascent is restarted from the uniform
/// policy plus `restarts - 1` pseudo-random simplex points and the best local optimum wins.
/// `objective` is evaluated on the floored matrix the ascent used.
SolveResult maximize_nsw_plus_linear(const RewardMatrix& mu, std::span<const double> bonus,
                                     const std::optional<HalfSpace>& constraint,
                                     const TerminationRule& rule = TerminationRule::baseline(),
                                     double step = kInitialStep, std::size_t restarts = 1);

}  // namespace fairbandit
