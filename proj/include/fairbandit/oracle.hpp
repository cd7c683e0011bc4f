#pragma once

#include <optional>
#include <span>

#include "fairbandit/core.hpp"
#include "fairbandit/optimizer.hpp"

namespace fairbandit::oracle {

/// Lattice points allowed in a single search.
inline constexpr double kMaxGridPoints = 1e7;

struct GridResult {
    Policy policy;
    double value;
};

/// Exhaustive search of nsw over the simplex lattice with the given spacing.
/// Ties go to the lexicographically smallest lattice point. Throws GridTooLarge.
GridResult grid_optimal_policy(const RewardMatrix& mu, double resolution);

/// Exhaustive search of nsw + bonus . pi over lattice points inside `constraint`
/// (if any). Returns nullopt when no lattice point is feasible.
std::optional<GridResult> grid_optimal_constrained(const RewardMatrix& mu, std::span<const double> bonus,
                                                   const std::optional<HalfSpace>& constraint, double resolution);

}  // namespace fairbandit::oracle
