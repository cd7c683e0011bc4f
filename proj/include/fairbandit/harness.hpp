#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fairbandit/algorithms.hpp"
#include "fairbandit/core.hpp"
#include "fairbandit/optimizer.hpp"

namespace fairbandit {

struct ProblemSize {
    std::size_t n_agents;
    std::size_t n_arms;
    friend bool operator==(const ProblemSize&, const ProblemSize&) = default;
};

struct ExperimentConfig {
    std::vector<ProblemSize> sizes{{4, 2}};
    std::uint64_t horizon = 20000;
    std::size_t instance_count = 10;
    std::vector<AlgorithmKind> algorithms{AlgorithmKind::FairUcb, AlgorithmKind::BaselineUcb};
    double delta = 0.01;
    double width_scale = 0.5;
    bool anytime = false;
    double bonus_scale = 0.8;
    double warmup_multiplier = 180.0;
    std::size_t restarts = 1;
    std::map<AlgorithmKind, TerminationRule> rules{
        {AlgorithmKind::FairUcb, TerminationRule::fair_ucb()},
        {AlgorithmKind::HighStartupUcb, TerminationRule::baseline()},
        {AlgorithmKind::BaselineUcb, TerminationRule::baseline()},
    };
    std::uint64_t master_seed = 1;
    std::filesystem::path output_dir = "results";
    /// Stride between persisted trace rows.
    std::uint64_t checkpoint_every = 100;
    /// Rounds at which the summary reports regret; empty means just the horizon.
    std::vector<std::uint64_t> checkpoints;
    std::size_t workers = 1;
    bool write_charts = true;

    /// Throws Error(Config) naming the offending field.
    void validate() const;
    AlgorithmConfig algorithm(AlgorithmKind kind) const;
    ConfidenceSpec confidence() const;
    std::vector<std::uint64_t> summary_checkpoints() const;
};

/// Applies the keys present in a JSON config file on top of `base`.
ExperimentConfig load_config_file(const std::filesystem::path& path, ExperimentConfig base);

/// Seeds are keyed by (size, instance index, algorithm), never by scheduling order.
std::uint64_t instance_seed(std::uint64_t master, ProblemSize size, std::size_t index);
std::uint64_t episode_seed(std::uint64_t master, ProblemSize size, std::size_t index, AlgorithmKind kind);

struct SummaryRow {
    std::size_t n_agents;
    std::size_t n_arms;
    std::string algorithm;
    std::uint64_t checkpoint_t;
    double mean_regret;
    double std_regret;
    double mean_opt_nsw;
    double std_opt_nsw;
    std::size_t instances;
};

/// Outcome of one episode, reduced to what the summary needs.
struct RunOutcome {
    ProblemSize size;
    AlgorithmKind algorithm;
    std::size_t instance_index;
    double opt_nsw;
    std::vector<double> regret_at_checkpoints;
};

/// Mean and sample standard deviation (n - 1 denominator; 0 for one value).
std::pair<double, double> mean_and_std(const std::vector<double>& values);

/// Aggregates outcomes per (size, algorithm, checkpoint). Independent of outcome order.
std::vector<SummaryRow> summarize(std::vector<RunOutcome> outcomes, const std::vector<std::uint64_t>& checkpoints);

inline constexpr const char* kTraceHeader = "t,arm,nsw_t,cum_regret";
inline constexpr const char* kSummaryHeader =
    "n_agents,n_arms,algorithm,checkpoint_t,mean_regret,std_regret,mean_opt_nsw,std_opt_nsw,instances";

struct TraceRow {
    std::uint64_t t;
    std::size_t arm;
    double nsw;
    double cum_regret;
};

/// Persists rows at every `stride`-th round plus the listed extra rounds and the last round.
void write_trace_csv(const RegretTrace& trace, const std::filesystem::path& path, std::uint64_t stride,
                     const std::vector<std::uint64_t>& extra_rounds = {});
std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path);

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path);
std::vector<SummaryRow> read_summary_csv(const std::filesystem::path& path);

/// Layout of files under the output directory.
std::filesystem::path size_directory(const std::filesystem::path& root, ProblemSize size);
std::filesystem::path trace_path(const std::filesystem::path& root, ProblemSize size, AlgorithmKind kind,
                                 std::size_t index);
std::filesystem::path instance_path(const std::filesystem::path& root, ProblemSize size, std::size_t index);

struct BatchResult {
    std::vector<SummaryRow> summary;
    std::vector<RunOutcome> outcomes;
};

/// Generates instances, runs every algorithm on each, and writes traces, instances,
/// charts, and summary.csv under config.output_dir.
BatchResult run_batch(const ExperimentConfig& config);

}  // namespace fairbandit
