#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "fairbandit/environment.hpp"
#include "fairbandit/optimizer.hpp"
#include "test_support.hpp"

using namespace fairbandit;

TEST_CASE("generated instances respect the clamp range and their optimum") {
    std::mt19937_64 gen(41);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto instance = generate_instance(5, 3, seed);
        for (double v : instance.mu_star.values()) REQUIRE((v >= kMinGeneratedMean && v <= 1.0));
        REQUIRE(instance.opt_nsw == doctest::Approx(nsw(instance.opt_policy, instance.mu_star)).epsilon(1e-9));
        for (int i = 0; i < 1000; ++i) {
            const auto pi = fairbandit::testing::random_policy(gen, 3);
            REQUIRE(instance.opt_nsw >= nsw(pi, instance.mu_star) - kOptimizerGap);
        }
    }
}

TEST_CASE("generate_instance is reproducible from its seed") {
    const auto a = generate_instance(4, 2, 99);
    const auto b = generate_instance(4, 2, 99);
    CHECK(a.mu_star == b.mu_star);
    CHECK(a.opt_policy == b.opt_policy);
    CHECK(a.opt_nsw == b.opt_nsw);
    CHECK_FALSE(generate_instance(4, 2, 100).mu_star == a.mu_star);
}

TEST_CASE("generated means follow 1 - Exp(0.04)") {
    // E[1 - X] = 0.96; the floor at 0.1 binds with probability e^{-22.5} ~ 1.7e-10.
    double sum = 0.0;
    std::size_t count = 0, floored = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto instance = generate_instance(10, 5, seed);
        for (double v : instance.mu_star.values()) {
            sum += v;
            ++count;
            if (v == kMinGeneratedMean) ++floored;
        }
    }
    // Standard error of the mean: 0.04 / sqrt(10000) = 4e-4.
    CHECK(sum / static_cast<double>(count) == doctest::Approx(0.96).epsilon(0.0015));
    CHECK(floored == 0);
}

TEST_CASE("bernoulli rewards") {
    Rng rng(42);
    const RewardMatrix mu = RewardMatrix::from_rows({{1.0, 0.1}, {0.0, 0.1}});
    for (int i = 0; i < 1000; ++i) {
        const auto r = sample_rewards(mu, 0, rng);
        REQUIRE(r[0] == 1.0);
        REQUIRE(r[1] == 0.0);
    }
    // mean of 1e5 Bernoulli(0.1) draws lies within 3 standard errors (0.00095 each).
    double sum0 = 0.0, sum1 = 0.0, sum01 = 0.0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const auto r = sample_rewards(mu, 1, rng);
        sum0 += r[0];
        sum1 += r[1];
        sum01 += r[0] * r[1];
    }
    CHECK(std::abs(sum0 / draws - 0.1) <= 0.003);
    CHECK(std::abs(sum1 / draws - 0.1) <= 0.003);
    CHECK_THROWS_AS(sample_rewards(mu, 2, rng), Error);
}

TEST_CASE("rewards of different agents are independent") {
    Rng rng(43);
    const RewardMatrix mu = RewardMatrix::from_rows({{0.6}, {0.6}});
    const int draws = 10000;
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (int i = 0; i < draws; ++i) {
        const auto r = sample_rewards(mu, 0, rng);
        sx += r[0];
        sy += r[1];
        sxx += r[0] * r[0];
        syy += r[1] * r[1];
        sxy += r[0] * r[1];
    }
    const double n = draws;
    const double corr = (sxy / n - sx / n * sy / n) /
                        std::sqrt((sxx / n - sx / n * sx / n) * (syy / n - sy / n * sy / n));
    CHECK(std::abs(corr) <= 0.03);
}

TEST_CASE("instance files round-trip") {
    const auto path = std::filesystem::temp_directory_path() / "fairbandit_instance_test.txt";
    const auto instance = generate_instance(3, 4, 7);
    write_instance(instance, path);
    const auto loaded = read_instance(path);
    CHECK(loaded.mu_star == instance.mu_star);
    CHECK(loaded.seed == 7);
    CHECK(loaded.opt_nsw == instance.opt_nsw);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_instance(path), Error);
}
