#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fairbandit/core.hpp"
#include "test_support.hpp"

using namespace fairbandit;
using fairbandit::testing::random_matrix;
using fairbandit::testing::random_policy;
using fairbandit::testing::random_size;

TEST_CASE("reward matrix and policy validate their invariants") {
    CHECK_THROWS_AS(RewardMatrix(0, 2, 0.5), Error);
    CHECK_THROWS_AS(RewardMatrix::from_rows({{0.5, 1.2}}), Error);
    CHECK_THROWS_AS(RewardMatrix::from_rows({{0.5, -0.1}}), Error);
    CHECK_THROWS_AS(RewardMatrix::from_rows({{0.5, 0.1}, {0.2}}), Error);
    CHECK_THROWS_AS(Policy({0.5, 0.6}), Error);
    CHECK_THROWS_AS(Policy({1.5, -0.5}), Error);
    CHECK_NOTHROW(Policy({0.5, 0.5 + 5e-10}));
    CHECK(Policy::vertex(3, 2).probs()[2] == 1.0);
}

TEST_CASE("nsw examples") {
    CHECK(nsw(Policy({0.5, 0.5}), RewardMatrix::from_rows({{1, 0}, {0, 1}})) == doctest::Approx(0.25));
    CHECK(nsw(Policy({1, 0}), RewardMatrix::from_rows({{0.9, 0.2}, {0.8, 0.1}})) == doctest::Approx(0.72));
    CHECK(nsw(Policy({0.25, 0.75}), RewardMatrix::from_rows({{0.4, 0.8}, {1.0, 0.2}})) == doctest::Approx(0.28));
}

TEST_CASE("nsw rejects dimension mismatch") {
    try {
        nsw(Policy({1.0}), RewardMatrix::from_rows({{0.5, 0.5}}));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DimensionMismatch);
    }
}

TEST_CASE("log nsw gradient examples") {
    auto g = log_nsw_gradient(Policy({0.5, 0.5}), RewardMatrix::from_rows({{0.5, 1.0}}));
    CHECK(g[0] == doctest::Approx(0.5 / 0.75));
    CHECK(g[1] == doctest::Approx(1.0 / 0.75));

    // Constant c: every agent's expected reward is c, so each component is sum_j c / c = N.
    const RewardMatrix constant(3, 4, 0.4);
    for (double x : log_nsw_gradient(Policy({0.1, 0.2, 0.3, 0.4}), constant)) CHECK(x == doctest::Approx(3.0));

    // log(pi1 pi2) has gradient (1/pi1, 1/pi2) = (2, 2) at the centre.
    g = log_nsw_gradient(Policy({0.5, 0.5}), RewardMatrix::from_rows({{1, 0}, {0, 1}}));
    CHECK(g[0] == doctest::Approx(2.0));
    CHECK(g[1] == doctest::Approx(2.0));

    try {
        log_nsw_gradient(Policy({1, 0}), RewardMatrix::from_rows({{0, 1}}));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ZeroReward);
    }
}

TEST_CASE("instantaneous regret examples") {
    const RewardMatrix diag = RewardMatrix::from_rows({{1, 0}, {0, 1}});
    CHECK(instantaneous_regret(0.25, Policy({1, 0}), diag) == doctest::Approx(0.25));
    CHECK(instantaneous_regret(0.25, Policy({0.5, 0.5}), diag) == doctest::Approx(0.0));
    const RewardMatrix mu = RewardMatrix::from_rows({{0.9, 0.1}, {0.8, 0.2}});
    CHECK(instantaneous_regret(0.72, Policy({0.5, 0.5}), mu) == doctest::Approx(0.47));
}

TEST_CASE("lipschitz gap bound examples") {
    const RewardMatrix mu = RewardMatrix::from_rows({{0.3, 0.6}, {0.9, 0.2}});
    auto same = lipschitz_gap_bound(Policy({0.4, 0.6}), mu, mu);
    CHECK(same.gap == 0.0);
    CHECK(same.bound == 0.0);

    auto single = lipschitz_gap_bound(Policy({1, 0}), RewardMatrix::from_rows({{0.7, 0.5}}),
                                      RewardMatrix::from_rows({{0.4, 0.5}}));
    CHECK(single.gap == doctest::Approx(0.3));
    CHECK(single.bound == doctest::Approx(0.3));
    CHECK_THROWS_AS(lipschitz_gap_bound(Policy({1, 0}), mu, RewardMatrix(1, 2, 0.5)), Error);
}

TEST_CASE("lipschitz property on random triples") {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto n = random_size(gen, 1, 8);
        const auto k = random_size(gen, 1, 8);
        const auto pi = random_policy(gen, k);
        const auto check = lipschitz_gap_bound(pi, random_matrix(gen, n, k), random_matrix(gen, n, k));
        REQUIRE(check.gap <= check.bound + 1e-15);
    }
}

TEST_CASE("nsw is bounded, monotone and permutation invariant") {
    std::mt19937_64 gen(12);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto n = random_size(gen, 1, 6);
        const auto k = random_size(gen, 1, 6);
        const auto pi = random_policy(gen, k);
        const auto lower = random_matrix(gen, n, k);
        std::vector<double> raised(lower.values().begin(), lower.values().end());
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (double& x : raised) x += u(gen) * (1.0 - x);
        const RewardMatrix upper(n, k, raised);

        const double value = nsw(pi, lower);
        REQUIRE(value >= 0.0);
        REQUIRE(value <= 1.0);
        REQUIRE(value <= nsw(pi, upper) + 1e-15);

        std::vector<std::size_t> perm(k);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), gen);
        std::vector<double> pp(k), mp(n * k);
        for (std::size_t a = 0; a < k; ++a) {
            pp[a] = pi[perm[a]];
            for (std::size_t j = 0; j < n; ++j) mp[j * k + a] = lower(j, perm[a]);
        }
        REQUIRE(nsw(Policy(pp), RewardMatrix(n, k, mp)) == doctest::Approx(value).epsilon(1e-12));
    }
}

TEST_CASE("log nsw gradient matches central finite differences") {
    std::mt19937_64 gen(13);
    const double h = 1e-6;
    for (int trial = 0; trial < 300; ++trial) {
        const auto n = random_size(gen, 1, 6);
        const auto k = random_size(gen, 2, 6);
        const auto mu = random_matrix(gen, n, k, 0.05, 1.0);
        const auto pi = random_policy(gen, k);
        const auto grad = log_nsw_gradient(pi, mu);
        // Differences taken in the ambient space; log nsw extends smoothly off the simplex.
        for (std::size_t a = 0; a < k; ++a) {
            std::vector<double> plus(pi.probs().begin(), pi.probs().end()), minus = plus;
            plus[a] += h;
            minus[a] -= h;
            const double fd = (std::log(nsw(std::span<const double>(plus), mu)) -
                               std::log(nsw(std::span<const double>(minus), mu))) /
                              (2 * h);
            REQUIRE(std::abs(fd - grad[a]) <= 1e-5 * std::max(1.0, std::abs(grad[a])));
        }
    }
}

TEST_CASE("bandit state bookkeeping") {
    BanditState state(2, 3);
    state.record(1, std::vector<double>{1.0, 0.0});
    state.record(1, std::vector<double>{0.0, 0.0});
    state.record(2, std::vector<double>{1.0, 1.0});
    CHECK(state.round() == 3);
    CHECK(std::accumulate(state.counts().begin(), state.counts().end(), std::uint64_t{0}) == state.round());
    CHECK(state.empirical_mean(0, 1) == doctest::Approx(0.5));
    CHECK(state.empirical_mean(1, 2) == doctest::Approx(1.0));
    CHECK(state.empirical_mean(0, 0) == 0.0);
    CHECK_THROWS_AS(state.record(3, std::vector<double>{1.0, 1.0}), Error);
    CHECK_THROWS_AS(state.record(0, std::vector<double>{1.0}), Error);
    CHECK_THROWS_AS(state.record(0, std::vector<double>{1.5, 0.0}), Error);
}

TEST_CASE("regret trace accumulates") {
    RegretTrace trace(0.5, 2);
    trace.append(0, Policy({1, 0}), 0.3);
    trace.append(1, Policy({0, 1}), 0.5);
    CHECK(trace.size() == 2);
    CHECK(trace[0].t == 1);
    CHECK(trace.regret_at(1) == doctest::Approx(0.2));
    CHECK(trace.final_regret() == doctest::Approx(0.2));
    CHECK(trace.regret_at(0) == 0.0);
    CHECK(trace.policy(1)[1] == 1.0);
    CHECK_THROWS_AS(trace.regret_at(3), Error);
}
