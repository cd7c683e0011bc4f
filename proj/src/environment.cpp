#include "fairbandit/environment.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "fairbandit/optimizer.hpp"

namespace fairbandit {

BanditInstance BanditInstance::from_matrix(RewardMatrix mu_star, std::uint64_t seed) {
    SolveResult best = maximize_log_nsw(mu_star, TerminationRule::tight());
    return {std::move(mu_star), std::move(best.policy), best.objective, seed};
}

BanditInstance generate_instance(std::size_t n_agents, std::size_t n_arms, std::uint64_t seed) {
    if (n_agents == 0 || n_arms == 0) throw Error(ErrorCode::InvalidArgument, "N and K must be >= 1");
    Rng rng(derive_seed(seed, "instance"));
    std::vector<double> values(n_agents * n_arms);
    for (double& v : values) v = std::max(kMinGeneratedMean, 1.0 - rng.exponential(kShortfallMean));
    return BanditInstance::from_matrix(RewardMatrix(n_agents, n_arms, std::move(values)), seed);
}

void sample_rewards_into(const RewardMatrix& mu_star, std::size_t arm, Rng& rng, std::span<double> out) {
    if (arm >= mu_star.n_arms()) throw Error(ErrorCode::InvalidArgument, "arm out of range");
    if (out.size() != mu_star.n_agents()) throw Error(ErrorCode::DimensionMismatch, "reward buffer length");
    for (std::size_t j = 0; j < mu_star.n_agents(); ++j) out[j] = rng.bernoulli(mu_star(j, arm)) ? 1.0 : 0.0;
}

std::vector<double> sample_rewards(const RewardMatrix& mu_star, std::size_t arm, Rng& rng) {
    std::vector<double> out(mu_star.n_agents());
    sample_rewards_into(mu_star, arm, rng, out);
    return out;
}

void write_instance(const BanditInstance& instance, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    const auto& mu = instance.mu_star;
    out << mu.n_agents() << ' ' << mu.n_arms() << ' ' << instance.seed << '\n';
    out << std::setprecision(17);
    for (std::size_t j = 0; j < mu.n_agents(); ++j) {
        for (std::size_t a = 0; a < mu.n_arms(); ++a) out << (a ? " " : "") << mu(j, a);
        out << '\n';
    }
    if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

BanditInstance read_instance(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::size_t n = 0, k = 0;
    std::uint64_t seed = 0;
    if (!(in >> n >> k >> seed)) throw Error(ErrorCode::Io, "malformed instance header in " + path.string());
    std::vector<double> values(n * k);
    for (double& v : values) {
        if (!(in >> v)) throw Error(ErrorCode::Io, "truncated instance matrix in " + path.string());
    }
    return BanditInstance::from_matrix(RewardMatrix(n, k, std::move(values)), seed);
}

}  // namespace fairbandit
