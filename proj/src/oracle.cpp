#include "fairbandit/oracle.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace fairbandit::oracle {

namespace {

// Number of lattice points with `steps` units spread over `arms` coordinates: C(steps+arms-1, arms-1).
double lattice_size(long long steps, std::size_t arms) {
    double count = 1.0;
    for (std::size_t i = 1; i < arms; ++i) {
        count *= static_cast<double>(steps + static_cast<long long>(i)) / static_cast<double>(i);
    }
    return count;
}

// Evaluated from scratch so the oracle shares no code with the solvers it checks.
double product_of_expected_rewards(const RewardMatrix& mu, const std::vector<double>& pi) {
    double product = 1.0;
    for (std::size_t j = 0; j < mu.n_agents(); ++j) {
        double expected = 0.0;
        for (std::size_t a = 0; a < pi.size(); ++a) expected += pi[a] * mu(j, a);
        product *= expected;
    }
    return product;
}

// Visits lattice points in lexicographic order of their integer coordinates.
template <class Visit>
void for_each_lattice_point(std::size_t arms, long long steps, Visit&& visit) {
    std::vector<long long> units(arms, 0);
    std::vector<double> pi(arms, 0.0);
    auto recurse = [&](auto&& self, std::size_t index, long long remaining) -> void {
        if (index + 1 == arms) {
            units[index] = remaining;
            for (std::size_t a = 0; a < arms; ++a) {
                pi[a] = static_cast<double>(units[a]) / static_cast<double>(steps);
            }
            visit(pi);
            return;
        }
        for (long long u = 0; u <= remaining; ++u) {
            units[index] = u;
            self(self, index + 1, remaining - u);
        }
    };
    recurse(recurse, 0, steps);
}

long long steps_for(double resolution, std::size_t arms) {
    if (!(resolution > 0.0 && resolution <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "resolution must lie in (0,1]");
    }
    const long long steps = std::llround(1.0 / resolution);
    if (lattice_size(steps, arms) > kMaxGridPoints) {
        throw Error(ErrorCode::GridTooLarge,
                    "lattice with spacing " + std::to_string(resolution) + " over " + std::to_string(arms) +
                        " arms exceeds the point budget");
    }
    return steps;
}

}  // namespace

GridResult grid_optimal_policy(const RewardMatrix& mu, double resolution) {
    auto result = grid_optimal_constrained(mu, std::vector<double>(mu.n_arms(), 0.0), std::nullopt, resolution);
    return std::move(*result);
}

std::optional<GridResult> grid_optimal_constrained(const RewardMatrix& mu, std::span<const double> bonus,
                                                   const std::optional<HalfSpace>& constraint, double resolution) {
    const std::size_t k = mu.n_arms();
    if (bonus.size() != k) throw Error(ErrorCode::DimensionMismatch, "bonus length differs from arm count");
    if (constraint && constraint->normal.size() != k) {
        throw Error(ErrorCode::DimensionMismatch, "constraint normal length differs from arm count");
    }
    const long long steps = steps_for(resolution, k);

    bool found = false;
    double best_value = 0.0;
    std::vector<double> best_point;
    for_each_lattice_point(k, steps, [&](const std::vector<double>& pi) {
        if (constraint) {
            double lhs = 0.0;
            for (std::size_t a = 0; a < k; ++a) lhs += constraint->normal[a] * pi[a];
            if (lhs > constraint->offset + 1e-12) return;
        }
        double value = product_of_expected_rewards(mu, pi);
        for (std::size_t a = 0; a < k; ++a) value += bonus[a] * pi[a];
        if (!found || value > best_value) {
            found = true;
            best_value = value;
            best_point = pi;
        }
    });
    if (!found) return std::nullopt;
    return GridResult{Policy(std::move(best_point)), best_value};
}

}  // namespace fairbandit::oracle
