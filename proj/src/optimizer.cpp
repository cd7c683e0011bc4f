#include "fairbandit/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "fairbandit/rng.hpp"

namespace fairbandit {

void TerminationRule::validate() const {
    if (!(min_improvement > 0.0)) throw Error(ErrorCode::InvalidArgument, "min_improvement must be > 0");
    if (window < 1) throw Error(ErrorCode::InvalidArgument, "window must be >= 1");
    if (max_iters < window) throw Error(ErrorCode::InvalidArgument, "max_iters must be >= window");
}

bool HalfSpace::contains(std::span<const double> pi, double tol) const {
    return std::inner_product(normal.begin(), normal.end(), pi.begin(), 0.0) <= offset + tol;
}

bool HalfSpace::meets_simplex() const {
    return !normal.empty() && *std::min_element(normal.begin(), normal.end()) <= offset;
}

namespace {

// Projection into caller-provided storage; `sorted` is scratch of the same length.
void simplex_project_into(std::span<const double> v, std::span<double> out, std::vector<double>& sorted) {
    sorted.assign(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumsum = 0.0;
    double threshold = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        cumsum += sorted[i];
        const double candidate = (cumsum - 1.0) / static_cast<double>(i + 1);
        if (sorted[i] - candidate > 0.0) threshold = candidate;
    }
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - threshold, 0.0);
}

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Projection onto simplex ∩ {c.pi <= b}. When the half-space constraint is active the
// solution is the simplex projection of v - theta*c for the multiplier theta >= 0 at which
// c.pi = b; c.P(v - theta*c) is nonincreasing in theta, so theta is found by bisection.
class HalfSpaceProjector {
public:
    explicit HalfSpaceProjector(const HalfSpace& h) : h_(h) {
        if (!h_.meets_simplex()) {
            throw Error(ErrorCode::Infeasible, "half-space does not intersect the simplex");
        }
    }

    void operator()(std::span<const double> v, std::span<double> out) {
        simplex_project_into(v, out, sorted_);
        const double tol = 1e-12 * std::max(1.0, std::abs(h_.offset));
        if (dot(h_.normal, out) <= h_.offset + tol) return;

        shifted_.resize(v.size());
        auto value_at = [&](double theta) {
            for (std::size_t i = 0; i < v.size(); ++i) shifted_[i] = v[i] - theta * h_.normal[i];
            simplex_project_into(shifted_, out, sorted_);
            return dot(h_.normal, out);
        };

        double lo = 0.0;
        double hi = 1.0;
        int doublings = 0;
        while (value_at(hi) > h_.offset + tol) {
            lo = hi;
            hi *= 2.0;
            if (++doublings > 1100) throw Error(ErrorCode::NonFinite, "half-space multiplier diverged");
        }
        for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (value_at(mid) > h_.offset + tol) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        value_at(hi);
    }

private:
    const HalfSpace& h_;
    std::vector<double> sorted_;
    std::vector<double> shifted_;
};

class SimplexProjector {
public:
    void operator()(std::span<const double> v, std::span<double> out) { simplex_project_into(v, out, sorted_); }

private:
    std::vector<double> sorted_;
};

// Smooth objective over the simplex: value and gradient on a policy vector.
struct LogNswObjective {
    const RewardMatrix& mu;

    double value(std::span<const double> x) const {
        double total = 0.0;
        for (std::size_t j = 0; j < mu.n_agents(); ++j) total += std::log(dot(mu.row(j), x));
        return total;
    }
    void gradient(std::span<const double> x, std::span<double> g) const {
        std::fill(g.begin(), g.end(), 0.0);
        for (std::size_t j = 0; j < mu.n_agents(); ++j) {
            const auto row = mu.row(j);
            const double inv = 1.0 / dot(row, x);
            for (std::size_t a = 0; a < g.size(); ++a) g[a] += row[a] * inv;
        }
    }
};

struct NswPlusLinearObjective {
    const RewardMatrix& mu;
    std::span<const double> bonus;

    double value(std::span<const double> x) const {
        double product = 1.0;
        for (std::size_t j = 0; j < mu.n_agents(); ++j) product *= dot(mu.row(j), x);
        return product + dot(bonus, x);
    }
    void gradient(std::span<const double> x, std::span<double> g) const {
        // d/dpi_a prod_j s_j = prod_j s_j * sum_j mu_ja / s_j
        double product = 1.0;
        std::fill(g.begin(), g.end(), 0.0);
        for (std::size_t j = 0; j < mu.n_agents(); ++j) {
            const auto row = mu.row(j);
            const double s = dot(row, x);
            product *= s;
            const double inv = 1.0 / s;
            for (std::size_t a = 0; a < g.size(); ++a) g[a] += row[a] * inv;
        }
        for (std::size_t a = 0; a < g.size(); ++a) g[a] = product * g[a] + bonus[a];
    }
};

// Armijo fraction: a step must realize this share of the first-order predicted gain.
// Projected-gradient steps have a nonnegative predicted gain, so accepted steps never decrease f.
constexpr double kSufficientIncrease = 1e-4;
constexpr double kMaxStepGrowth = 1e6;

struct AscentResult {
    std::vector<double> x;
    double value;
    std::size_t iterations;
};

template <class Objective, class Projector>
AscentResult projected_ascent(std::vector<double> x, const Objective& f, Projector& project,
                              const TerminationRule& rule, double initial_step) {
    const std::size_t k = x.size();
    std::vector<double> grad(k), moved(k), candidate(k);
    double fx = f.value(x);
    if (!std::isfinite(fx)) throw Error(ErrorCode::NonFinite, "objective is not finite at the start point");

    std::vector<double> history;
    history.reserve(std::min<std::size_t>(rule.max_iters + 1, 4096));
    history.push_back(fx);

    // Each iteration first tries twice the last accepted step, so the ascent can leave
    // flat regions quickly while backtracking still guards against overshooting.
    const double max_step = initial_step * kMaxStepGrowth;
    double trial_step = initial_step;
    std::size_t it = 0;
    while (it < rule.max_iters) {
        f.gradient(x, grad);
        bool accepted = false;
        double step = trial_step;
        double fc = fx;
        for (int halvings = 0; halvings < 60; ++halvings, step *= 0.5) {
            for (std::size_t a = 0; a < k; ++a) moved[a] = x[a] + step * grad[a];
            project(moved, candidate);
            fc = f.value(candidate);
            double predicted = 0.0;
            for (std::size_t a = 0; a < k; ++a) predicted += grad[a] * (candidate[a] - x[a]);
            if (fc >= fx + kSufficientIncrease * predicted) {
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        trial_step = std::min(max_step, 2.0 * step);
        if (!std::isfinite(fc)) throw Error(ErrorCode::NonFinite, "objective became non-finite");
        x.swap(candidate);
        fx = fc;
        history.push_back(fx);
        ++it;
        if (it >= rule.window && fx - history[it - rule.window] < rule.min_improvement) break;
    }
    return {std::move(x), fx, it};
}

void check_finite_matrix(const RewardMatrix& mu) {
    for (double v : mu.values()) {
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "reward matrix entry is not finite");
    }
}

// With a single agent both objectives are linear in pi, so the optimum is the vertex
// of the best-scoring arm; ties go to the lowest index.
Policy lowest_argmax_vertex(std::span<const double> scores) {
    const auto best = std::max_element(scores.begin(), scores.end());
    return Policy::vertex(scores.size(), static_cast<std::size_t>(best - scores.begin()));
}

}  // namespace

Policy project_to_simplex(std::span<const double> v) {
    if (v.empty()) throw Error(ErrorCode::InvalidArgument, "cannot project an empty vector");
    std::vector<double> out(v.size()), scratch;
    simplex_project_into(v, out, scratch);
    return Policy(std::move(out));
}

Policy project_to_simplex_halfspace(std::span<const double> v, const HalfSpace& h) {
    if (v.empty()) throw Error(ErrorCode::InvalidArgument, "cannot project an empty vector");
    if (h.normal.size() != v.size()) throw Error(ErrorCode::DimensionMismatch, "half-space normal length");
    HalfSpaceProjector project(h);
    std::vector<double> out(v.size());
    project(v, out);
    return Policy(std::move(out));
}

SolveResult maximize_log_nsw(const RewardMatrix& mu, const TerminationRule& rule, double step) {
    rule.validate();
    if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "step must be > 0");
    const RewardMatrix floored = mu.clamped_below(kMeanFloor);
    if (mu.n_agents() == 1) {
        Policy policy = lowest_argmax_vertex(floored.row(0));
        const double value = nsw(policy, mu);
        return {std::move(policy), value, 0};
    }
    const LogNswObjective objective{floored};
    SimplexProjector project;
    const std::size_t k = mu.n_arms();
    auto result = projected_ascent(std::vector<double>(k, 1.0 / static_cast<double>(k)), objective, project,
                                   rule, step);
    Policy policy(std::move(result.x));
    const double value = nsw(policy, mu);
    return {std::move(policy), value, result.iterations};
}

SolveResult maximize_nsw_plus_linear(const RewardMatrix& mu, std::span<const double> bonus,
                                     const std::optional<HalfSpace>& constraint, const TerminationRule& rule,
                                     double step, std::size_t restarts) {
    rule.validate();
    const std::size_t k = mu.n_arms();
    if (bonus.size() != k) throw Error(ErrorCode::DimensionMismatch, "bonus length differs from arm count");
    for (double b : bonus) {
        if (!std::isfinite(b)) throw Error(ErrorCode::NonFinite, "bonus entry is not finite");
        if (b < 0.0) throw Error(ErrorCode::InvalidArgument, "bonus entries must be >= 0");
    }
    if (constraint && constraint->normal.size() != k) {
        throw Error(ErrorCode::DimensionMismatch, "constraint normal length differs from arm count");
    }
    if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "step must be > 0");
    if (restarts < 1) throw Error(ErrorCode::InvalidArgument, "restarts must be >= 1");
    check_finite_matrix(mu);

    const RewardMatrix floored = mu.clamped_below(kMeanFloor);
    if (mu.n_agents() == 1 && !constraint) {
        std::vector<double> scores(k);
        for (std::size_t a = 0; a < k; ++a) scores[a] = floored(0, a) + bonus[a];
        Policy policy = lowest_argmax_vertex(scores);
        const double value = *std::max_element(scores.begin(), scores.end());
        return {std::move(policy), value, 0};
    }
    const NswPlusLinearObjective objective{floored, bonus};

    auto solve_from = [&](auto& project, std::vector<double> start) {
        std::vector<double> feasible(k);
        project(start, feasible);
        return projected_ascent(std::move(feasible), objective, project, rule, step);
    };

    Rng restart_rng(derive_seed(0x6e73772b6c696eULL, "restart"));
    auto run = [&](auto& project) {
        AscentResult best = solve_from(project, std::vector<double>(k, 1.0 / static_cast<double>(k)));
        std::size_t total_iters = best.iterations;
        for (std::size_t r = 1; r < restarts; ++r) {
            std::vector<double> start(k);
            double sum = 0.0;
            for (double& s : start) sum += (s = restart_rng.exponential(1.0));
            for (double& s : start) s /= sum;
            AscentResult local = solve_from(project, std::move(start));
            total_iters += local.iterations;
            if (local.value > best.value) best = std::move(local);
        }
        best.iterations = total_iters;
        return best;
    };

    AscentResult best = [&] {
        if (constraint) {
            HalfSpaceProjector project(*constraint);
            return run(project);
        }
        SimplexProjector project;
        return run(project);
    }();
    return {Policy(std::move(best.x)), best.value, best.iterations};
}

}  // namespace fairbandit
