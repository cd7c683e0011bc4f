#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fairbandit/optimizer.hpp"
#include "fairbandit/oracle.hpp"
#include "test_support.hpp"

using namespace fairbandit;
using fairbandit::testing::random_matrix;
using fairbandit::testing::random_size;

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Optimality of a simplex projection p of v: with r = v - p, there is a threshold tau such that
// r_i = tau wherever p_i > 0 and r_i <= tau wherever p_i = 0.
void check_simplex_kkt(std::span<const double> v, const Policy& p) {
    double tau = -1e300;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (p[i] > 0) tau = std::max(tau, v[i] - p[i]);
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (p[i] > 0) {
            REQUIRE(std::abs(v[i] - p[i] - tau) <= 1e-9);
        } else {
            REQUIRE(v[i] <= tau + 1e-9);
        }
    }
}

}  // namespace

TEST_CASE("simplex projection examples") {
    auto p = project_to_simplex(std::vector<double>{0.6, 0.6});
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(0.5));
    p = project_to_simplex(std::vector<double>{2, 0});
    CHECK(p[0] == doctest::Approx(1.0));
    CHECK(p[1] == 0.0);
    p = project_to_simplex(std::vector<double>{0.3, 0.2, 0.1});
    CHECK(p[0] == doctest::Approx(0.43333333333333335));
    CHECK(p[1] == doctest::Approx(0.33333333333333337));
    CHECK(p[2] == doctest::Approx(0.23333333333333334));
    CHECK_THROWS_AS(project_to_simplex(std::vector<double>{}), Error);
}

TEST_CASE("simplex projection satisfies KKT on random vectors") {
    std::mt19937_64 gen(21);
    std::normal_distribution<double> normal(0.0, 2.0);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> v(random_size(gen, 1, 10));
        for (double& x : v) x = normal(gen);
        check_simplex_kkt(v, project_to_simplex(v));
    }
}

TEST_CASE("half-space projection examples") {
    const HalfSpace slack{{1.0, 1.0, 1.0}, 5.0};
    const std::vector<double> v{0.3, 0.9, -0.2};
    CHECK(project_to_simplex_halfspace(v, slack) == project_to_simplex(v));

    const auto p = project_to_simplex_halfspace(std::vector<double>{1, 0}, HalfSpace{{1.0, 0.0}, 0.3});
    CHECK(p[0] == doctest::Approx(0.3));
    CHECK(p[1] == doctest::Approx(0.7));

    try {
        project_to_simplex_halfspace(std::vector<double>{1, 0}, HalfSpace{{1.0, 2.0}, 0.5});
        FAIL("expected infeasible");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Infeasible);
    }
}

TEST_CASE("half-space projection: dominated constraint and random feasibility") {
    std::mt19937_64 gen(22);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int trial = 0; trial < 500; ++trial) {
        const auto k = random_size(gen, 1, 6);
        std::vector<double> v(k);
        for (double& x : v) x = normal(gen);
        HalfSpace h{std::vector<double>(k), 0.0};
        for (double& c : h.normal) c = u(gen);
        const double lo = *std::min_element(h.normal.begin(), h.normal.end());
        const double hi = *std::max_element(h.normal.begin(), h.normal.end());

        h.offset = hi;
        const auto dominated = project_to_simplex_halfspace(v, h);
        const auto plain = project_to_simplex(v);
        for (std::size_t a = 0; a < k; ++a) REQUIRE(dominated[a] == doctest::Approx(plain[a]));

        h.offset = lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(gen);
        const auto p = project_to_simplex_halfspace(v, h);
        REQUIRE(h.contains(p.probs()));

        // No feasible point is closer to v than p: compare against random feasible candidates.
        const double dist = std::inner_product(v.begin(), v.end(), p.probs().begin(), 0.0,
                                               std::plus<>(), [](double a, double b) { return (a - b) * (a - b); });
        for (int c = 0; c < 20; ++c) {
            const auto q = fairbandit::testing::random_simplex_point(gen, k);
            if (dot(h.normal, q) > h.offset) continue;
            double dq = 0.0;
            for (std::size_t a = 0; a < k; ++a) dq += (v[a] - q[a]) * (v[a] - q[a]);
            REQUIRE(dist <= dq + 1e-9);
        }
    }
}

TEST_CASE("termination rule validation") {
    CHECK_THROWS_AS((TerminationRule{0.0, 10, 100}.validate()), Error);
    CHECK_THROWS_AS((TerminationRule{1e-3, 0, 100}.validate()), Error);
    CHECK_THROWS_AS((TerminationRule{1e-3, 20, 10}.validate()), Error);
    CHECK_NOTHROW(TerminationRule::fair_ucb().validate());
    CHECK_NOTHROW(TerminationRule::baseline().validate());
}

TEST_CASE("maximize_log_nsw examples") {
    auto r = maximize_log_nsw(RewardMatrix::from_rows({{1, 0}, {0, 1}}));
    CHECK(r.policy[0] == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(r.objective == doctest::Approx(0.25).epsilon(1e-3));

    r = maximize_log_nsw(RewardMatrix::from_rows({{0.9, 0.1}, {0.8, 0.2}}));
    CHECK(r.policy[0] == doctest::Approx(1.0));
    CHECK(r.objective == doctest::Approx(0.72));

    r = maximize_log_nsw(RewardMatrix::from_rows({{0.3, 0.7, 0.5}}));
    CHECK(r.policy[1] == doctest::Approx(1.0));
    CHECK(r.objective == doctest::Approx(0.7));
}

TEST_CASE("maximize_log_nsw is deterministic and lands on the simplex") {
    std::mt19937_64 gen(23);
    for (int trial = 0; trial < 50; ++trial) {
        const auto mu = random_matrix(gen, random_size(gen, 1, 8), random_size(gen, 1, 6));
        const auto a = maximize_log_nsw(mu);
        const auto b = maximize_log_nsw(mu);
        REQUIRE(a.policy == b.policy);
        REQUIRE(a.objective == b.objective);
    }
}

TEST_CASE("maximize_log_nsw agrees with the grid oracle for K = 2") {
    std::mt19937_64 gen(24);
    for (int trial = 0; trial < 100; ++trial) {
        const auto mu = random_matrix(gen, random_size(gen, 1, 5), 2, kMeanFloor, 1.0);
        const auto solved = maximize_log_nsw(mu);
        const auto grid = oracle::grid_optimal_policy(mu, 1e-3);
        REQUIRE(std::abs(solved.objective - grid.value) <= kOptimizerGap);
    }
}

TEST_CASE("ascent is monotone: more iterations never lower the objective") {
    std::mt19937_64 gen(25);
    for (int trial = 0; trial < 30; ++trial) {
        const auto mu = random_matrix(gen, 4, 3, 0.01, 1.0);
        double previous = -1.0;
        for (std::size_t iters : {1, 2, 4, 8, 16, 32}) {
            const auto r = maximize_log_nsw(mu, TerminationRule{1e-300, 1, iters});
            REQUIRE(r.objective >= previous - 1e-15);
            previous = r.objective;
        }
    }
}

TEST_CASE("maximize_nsw_plus_linear examples") {
    const RewardMatrix mu = RewardMatrix::from_rows({{0.9, 0.3, 0.4}, {0.2, 0.8, 0.5}});
    const auto plain = maximize_log_nsw(mu, TerminationRule::tight());
    const auto zero = maximize_nsw_plus_linear(mu, std::vector<double>(3, 0.0), std::nullopt);
    CHECK(zero.objective == doctest::Approx(plain.objective).epsilon(kOptimizerGap));

    const auto linear = maximize_nsw_plus_linear(RewardMatrix::from_rows({{0.5, 0.5}}), std::vector<double>{0.2, 0.0},
                                                 std::nullopt);
    CHECK(linear.policy[0] == doctest::Approx(1.0));
    CHECK(linear.objective == doctest::Approx(0.7));

    CHECK_THROWS_AS(maximize_nsw_plus_linear(mu, std::vector<double>{-0.1, 0, 0}, std::nullopt), Error);
    CHECK_THROWS_AS(maximize_nsw_plus_linear(mu, std::vector<double>{0, 0, 0}, HalfSpace{{1, 1, 1}, 0.5}), Error);
}

TEST_CASE("constrained results satisfy the half-space and beat their start points") {
    std::mt19937_64 gen(26);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = random_size(gen, 1, 4);
        const auto k = random_size(gen, 2, 4);
        const auto mu = random_matrix(gen, n, k);
        std::vector<double> bonus(k);
        for (double& b : bonus) b = 0.3 * u(gen);
        HalfSpace h{std::vector<double>(k), 0.0};
        for (double& c : h.normal) c = u(gen);
        h.offset = *std::min_element(h.normal.begin(), h.normal.end()) + 0.3 * u(gen);

        const auto r = maximize_nsw_plus_linear(mu, bonus, h, TerminationRule::baseline(), kInitialStep, 3);
        REQUIRE(h.contains(r.policy.probs()));
        const auto start = project_to_simplex_halfspace(std::vector<double>(k, 1.0 / static_cast<double>(k)), h);
        const RewardMatrix floored = mu.clamped_below(kMeanFloor);
        REQUIRE(r.objective >= nsw(start, floored) + dot(bonus, start.probs()) - 1e-12);
    }
}

TEST_CASE("non-concave solver agrees with the constrained grid oracle (K <= 3)") {
    std::mt19937_64 gen(27);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int hits = 0;
    const int trials = 100;
    for (int trial = 0; trial < trials; ++trial) {
        const auto n = random_size(gen, 1, 3);
        const auto k = random_size(gen, 2, 3);
        const auto mu = random_matrix(gen, n, k, kMeanFloor, 1.0);
        std::vector<double> bonus(k);
        for (double& b : bonus) b = 0.5 * u(gen);
        HalfSpace h{std::vector<double>(k), 0.0};
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t j = 0; j < n; ++j) h.normal[a] += 1.0 - mu(j, a);
        }
        const double lo = *std::min_element(h.normal.begin(), h.normal.end());
        const double hi = *std::max_element(h.normal.begin(), h.normal.end());
        h.offset = lo + (hi - lo) * u(gen);

        const auto solved = maximize_nsw_plus_linear(mu, bonus, h, TerminationRule::baseline(), kInitialStep, 5);
        const auto grid = oracle::grid_optimal_constrained(mu, bonus, h, k == 2 ? 1e-5 : 1e-3);
        REQUIRE(grid.has_value());
        if (solved.objective >= grid->value - kOptimizerGap) ++hits;
    }
    CHECK(hits >= 95);
}

TEST_CASE("single agent solves pick the best arm, lowest index on ties") {
    const auto tied = RewardMatrix::from_rows({{0.3, 0.7, 0.7}});
    const auto solved = maximize_log_nsw(tied);
    CHECK(solved.policy == Policy::vertex(3, 1));
    CHECK(solved.objective == doctest::Approx(0.7));

    const auto flat = RewardMatrix::from_rows({{0.5, 0.5}});
    const auto linear = maximize_nsw_plus_linear(flat, std::vector<double>{0.0, 0.0}, std::nullopt);
    CHECK(linear.policy == Policy::vertex(2, 0));
    const auto pushed = maximize_nsw_plus_linear(flat, std::vector<double>{0.0, 0.2}, std::nullopt);
    CHECK(pushed.policy == Policy::vertex(2, 1));
    CHECK(pushed.objective == doctest::Approx(0.7));
}
