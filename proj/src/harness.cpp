#include "fairbandit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "fairbandit/chart.hpp"
#include "fairbandit/environment.hpp"

namespace fairbandit {

namespace {

[[noreturn]] void config_error(const std::string& field, const std::string& message) {
    throw Error(ErrorCode::Config, field + ": " + message);
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string size_label(ProblemSize size) {
    return std::to_string(size.n_agents) + ":" + std::to_string(size.n_arms);
}

// Runs task(i) for i in [0, count) on up to `workers` threads; rethrows the first failure.
template <class Task>
void parallel_for(std::size_t count, std::size_t workers, Task&& task) {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = count;
            }
        }
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min(workers, count));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

template <class T>
T get_field(const nlohmann::json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        config_error(key, e.what());
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    if (sizes.empty()) config_error("sizes", "at least one (N,K) pair is required");
    for (const auto& s : sizes) {
        if (s.n_agents < 1 || s.n_arms < 1) config_error("sizes", "N and K must be >= 1");
    }
    if (horizon < 1) config_error("horizon", "must be >= 1");
    if (instance_count < 1) config_error("instances", "must be >= 1");
    if (algorithms.empty()) config_error("algorithms", "at least one algorithm is required");
    if (!(delta > 0.0 && delta < 1.0)) config_error("delta", "must lie in (0,1)");
    if (!(width_scale > 0.0)) config_error("width_scale", "must be > 0");
    if (!(bonus_scale >= 0.0)) config_error("bonus_scale", "must be >= 0");
    if (!(warmup_multiplier > 0.0)) config_error("warmup_multiplier", "must be > 0");
    if (restarts < 1) config_error("restarts", "must be >= 1");
    if (checkpoint_every < 1) config_error("stride", "must be >= 1");
    if (workers < 1) config_error("workers", "must be >= 1");
    for (auto c : checkpoints) {
        if (c < 1 || c > horizon) config_error("checkpoints", "each checkpoint must lie in [1, horizon]");
    }
    for (auto kind : algorithms) {
        try {
            algorithm(kind).rule.validate();
        } catch (const Error& e) {
            config_error("termination." + std::string(algorithm_name(kind)), e.what());
        }
    }
    if (output_dir.empty()) config_error("out", "output directory must be set");
}

AlgorithmConfig ExperimentConfig::algorithm(AlgorithmKind kind) const {
    AlgorithmConfig config = AlgorithmConfig::defaults(kind);
    if (auto it = rules.find(kind); it != rules.end()) config.rule = it->second;
    config.baseline.bonus_scale = bonus_scale;
    config.baseline.restarts = restarts;
    config.high_startup.warmup_multiplier = warmup_multiplier;
    config.high_startup.restarts = restarts;
    return config;
}

ConfidenceSpec ExperimentConfig::confidence() const {
    return {delta, horizon, anytime, width_scale};
}

std::vector<std::uint64_t> ExperimentConfig::summary_checkpoints() const {
    std::vector<std::uint64_t> out = checkpoints.empty() ? std::vector<std::uint64_t>{horizon} : checkpoints;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

ExperimentConfig load_config_file(const std::filesystem::path& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) config_error("config", "cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        config_error("config", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) config_error("config", "top level must be an object");

    for (const auto& [key, value] : j.items()) {
        if (key == "sizes") {
            base.sizes.clear();
            if (!value.is_array()) config_error(key, "expected a list of [N, K] pairs");
            for (const auto& pair : value) {
                if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_unsigned() ||
                    !pair[1].is_number_unsigned()) {
                    config_error(key, "expected a list of [N, K] pairs");
                }
                base.sizes.push_back({pair[0].get<std::size_t>(), pair[1].get<std::size_t>()});
            }
        } else if (key == "horizon") {
            base.horizon = get_field<std::uint64_t>(j, "horizon");
        } else if (key == "instances") {
            base.instance_count = get_field<std::size_t>(j, "instances");
        } else if (key == "algorithms") {
            base.algorithms.clear();
            for (const auto& name : get_field<std::vector<std::string>>(j, "algorithms")) {
                try {
                    base.algorithms.push_back(parse_algorithm(name));
                } catch (const Error&) {
                    config_error(key, "unknown algorithm '" + name + "'");
                }
            }
        } else if (key == "delta") {
            base.delta = get_field<double>(j, "delta");
        } else if (key == "width_scale") {
            base.width_scale = get_field<double>(j, "width_scale");
        } else if (key == "anytime") {
            base.anytime = get_field<bool>(j, "anytime");
        } else if (key == "bonus_scale") {
            base.bonus_scale = get_field<double>(j, "bonus_scale");
        } else if (key == "warmup_multiplier") {
            base.warmup_multiplier = get_field<double>(j, "warmup_multiplier");
        } else if (key == "restarts") {
            base.restarts = get_field<std::size_t>(j, "restarts");
        } else if (key == "termination") {
            if (!value.is_object()) config_error(key, "expected an object keyed by algorithm name");
            for (const auto& [algo, rule] : value.items()) {
                const std::string field = "termination." + algo;
                AlgorithmKind kind;
                try {
                    kind = parse_algorithm(algo);
                } catch (const Error&) {
                    config_error(field, "unknown algorithm");
                }
                TerminationRule r = base.algorithm(kind).rule;
                try {
                    if (rule.contains("min_improvement")) r.min_improvement = rule.at("min_improvement").get<double>();
                    if (rule.contains("window")) r.window = rule.at("window").get<std::size_t>();
                    if (rule.contains("max_iters")) r.max_iters = rule.at("max_iters").get<std::size_t>();
                } catch (const nlohmann::json::exception& e) {
                    config_error(field, e.what());
                }
                base.rules[kind] = r;
            }
        } else if (key == "seed") {
            base.master_seed = get_field<std::uint64_t>(j, "seed");
        } else if (key == "out") {
            base.output_dir = get_field<std::string>(j, "out");
        } else if (key == "workers") {
            base.workers = get_field<std::size_t>(j, "workers");
        } else if (key == "stride") {
            base.checkpoint_every = get_field<std::uint64_t>(j, "stride");
        } else if (key == "checkpoints") {
            base.checkpoints = get_field<std::vector<std::uint64_t>>(j, "checkpoints");
        } else if (key == "charts") {
            base.write_charts = get_field<bool>(j, "charts");
        } else {
            config_error(key, "unknown config key");
        }
    }
    return base;
}

std::uint64_t instance_seed(std::uint64_t master, ProblemSize size, std::size_t index) {
    return derive_seed(master, "instance:" + size_label(size), index);
}

std::uint64_t episode_seed(std::uint64_t master, ProblemSize size, std::size_t index, AlgorithmKind kind) {
    return derive_seed(master, "episode:" + size_label(size) + ":" + std::string(algorithm_name(kind)), index);
}

std::pair<double, double> mean_and_std(const std::vector<double>& values) {
    if (values.empty()) return {0.0, 0.0};
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() == 1) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n - 1.0))};
}

std::vector<SummaryRow> summarize(std::vector<RunOutcome> outcomes, const std::vector<std::uint64_t>& checkpoints) {
    // Canonical order so floating-point sums do not depend on scheduling.
    std::sort(outcomes.begin(), outcomes.end(), [](const RunOutcome& a, const RunOutcome& b) {
        return std::tie(a.size.n_agents, a.size.n_arms, a.algorithm, a.instance_index) <
               std::tie(b.size.n_agents, b.size.n_arms, b.algorithm, b.instance_index);
    });
    std::vector<SummaryRow> rows;
    std::size_t begin = 0;
    while (begin < outcomes.size()) {
        std::size_t end = begin;
        while (end < outcomes.size() && outcomes[end].size == outcomes[begin].size &&
               outcomes[end].algorithm == outcomes[begin].algorithm) {
            ++end;
        }
        std::vector<double> opt;
        for (std::size_t i = begin; i < end; ++i) opt.push_back(outcomes[i].opt_nsw);
        const auto [mean_opt, std_opt] = mean_and_std(opt);
        for (std::size_t c = 0; c < checkpoints.size(); ++c) {
            std::vector<double> regrets;
            for (std::size_t i = begin; i < end; ++i) regrets.push_back(outcomes[i].regret_at_checkpoints.at(c));
            const auto [mean_r, std_r] = mean_and_std(regrets);
            rows.push_back({outcomes[begin].size.n_agents, outcomes[begin].size.n_arms,
                            std::string(algorithm_name(outcomes[begin].algorithm)), checkpoints[c], mean_r, std_r,
                            mean_opt, std_opt, end - begin});
        }
        begin = end;
    }
    return rows;
}

void write_trace_csv(const RegretTrace& trace, const std::filesystem::path& path, std::uint64_t stride,
                     const std::vector<std::uint64_t>& extra_rounds) {
    if (stride < 1) throw Error(ErrorCode::InvalidArgument, "stride must be >= 1");
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    out << kTraceHeader << '\n';
    std::size_t extra = 0;
    std::vector<std::uint64_t> extras = extra_rounds;
    std::sort(extras.begin(), extras.end());
    for (const auto& r : trace.records()) {
        while (extra < extras.size() && extras[extra] < r.t) ++extra;
        const bool is_extra = extra < extras.size() && extras[extra] == r.t;
        if (r.t % stride == 0 || r.t == trace.size() || is_extra) {
            out << r.t << ',' << r.arm << ',' << format_real(r.nsw) << ',' << format_real(r.cum_regret) << '\n';
        }
    }
    if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kTraceHeader) {
        throw Error(ErrorCode::Io, path.string() + ": unexpected trace header");
    }
    std::vector<TraceRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 4) throw Error(ErrorCode::Io, path.string() + ": malformed row '" + line + "'");
        try {
            rows.push_back({std::stoull(f[0]), static_cast<std::size_t>(std::stoull(f[1])), std::stod(f[2]),
                            std::stod(f[3])});
        } catch (const std::exception&) {
            throw Error(ErrorCode::Io, path.string() + ": malformed row '" + line + "'");
        }
    }
    return rows;
}

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    out << kSummaryHeader << '\n';
    for (const auto& r : rows) {
        out << r.n_agents << ',' << r.n_arms << ',' << r.algorithm << ',' << r.checkpoint_t << ','
            << format_real(r.mean_regret) << ',' << format_real(r.std_regret) << ',' << format_real(r.mean_opt_nsw)
            << ',' << format_real(r.std_opt_nsw) << ',' << r.instances << '\n';
    }
    if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

std::vector<SummaryRow> read_summary_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kSummaryHeader) {
        throw Error(ErrorCode::Io, path.string() + ": unexpected summary header");
    }
    std::vector<SummaryRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 9) throw Error(ErrorCode::Io, path.string() + ": malformed row '" + line + "'");
        try {
            rows.push_back({std::stoull(f[0]), std::stoull(f[1]), f[2], std::stoull(f[3]), std::stod(f[4]),
                            std::stod(f[5]), std::stod(f[6]), std::stod(f[7]), std::stoull(f[8])});
        } catch (const std::exception&) {
            throw Error(ErrorCode::Io, path.string() + ": malformed row '" + line + "'");
        }
    }
    return rows;
}

std::filesystem::path size_directory(const std::filesystem::path& root, ProblemSize size) {
    return root / ("n" + std::to_string(size.n_agents) + "_k" + std::to_string(size.n_arms));
}

std::filesystem::path trace_path(const std::filesystem::path& root, ProblemSize size, AlgorithmKind kind,
                                 std::size_t index) {
    return size_directory(root, size) /
           (std::string(algorithm_name(kind)) + "_instance_" + std::to_string(index) + ".csv");
}

std::filesystem::path instance_path(const std::filesystem::path& root, ProblemSize size, std::size_t index) {
    return size_directory(root, size) / ("instance_" + std::to_string(index) + ".txt");
}

BatchResult run_batch(const ExperimentConfig& config) {
    config.validate();
    const auto checkpoints = config.summary_checkpoints();
    const auto& root = config.output_dir;

    std::error_code ec;
    for (const auto& size : config.sizes) {
        std::filesystem::create_directories(size_directory(root, size), ec);
        if (ec) throw Error(ErrorCode::Io, "cannot create " + size_directory(root, size).string() + ": " + ec.message());
    }

    struct InstanceSlot {
        ProblemSize size;
        std::size_t index;
        std::optional<BanditInstance> instance;
    };
    std::vector<InstanceSlot> instances;
    for (const auto& size : config.sizes) {
        for (std::size_t i = 0; i < config.instance_count; ++i) instances.push_back({size, i, std::nullopt});
    }
    parallel_for(instances.size(), config.workers, [&](std::size_t i) {
        auto& slot = instances[i];
        slot.instance = generate_instance(slot.size.n_agents, slot.size.n_arms,
                                          instance_seed(config.master_seed, slot.size, slot.index));
        write_instance(*slot.instance, instance_path(root, slot.size, slot.index));
    });

    struct EpisodeSlot {
        std::size_t instance_slot;
        AlgorithmKind kind;
        std::optional<RunOutcome> outcome;
        std::optional<ChartSeries> series;
    };
    std::vector<EpisodeSlot> episodes;
    for (std::size_t s = 0; s < instances.size(); ++s) {
        for (auto kind : config.algorithms) episodes.push_back({s, kind, std::nullopt, std::nullopt});
    }
    parallel_for(episodes.size(), config.workers, [&](std::size_t e) {
        auto& ep = episodes[e];
        const auto& slot = instances[ep.instance_slot];
        const RegretTrace trace =
            run_episode(config.algorithm(ep.kind), *slot.instance, config.horizon, config.confidence(),
                        episode_seed(config.master_seed, slot.size, slot.index, ep.kind));
        write_trace_csv(trace, trace_path(root, slot.size, ep.kind, slot.index), config.checkpoint_every,
                        checkpoints);
        RunOutcome outcome{slot.size, ep.kind, slot.index, slot.instance->opt_nsw, {}};
        for (auto c : checkpoints) outcome.regret_at_checkpoints.push_back(trace.regret_at(c));
        ep.outcome = std::move(outcome);
        if (config.write_charts) ep.series = downsample(series_from_trace(trace, std::string(algorithm_name(ep.kind))));
    });

    if (config.write_charts) {
        for (std::size_t s = 0; s < instances.size(); ++s) {
            std::vector<ChartSeries> series;
            for (auto& ep : episodes) {
                if (ep.instance_slot == s) series.push_back(std::move(*ep.series));
            }
            const auto& slot = instances[s];
            const std::string title = "N=" + std::to_string(slot.size.n_agents) +
                                      ", K=" + std::to_string(slot.size.n_arms) + ", instance " +
                                      std::to_string(slot.index);
            emit_regret_chart(series, size_directory(root, slot.size) / ("regret_instance_" +
                                                                          std::to_string(slot.index) + ".svg"),
                              title);
        }
    }

    BatchResult result;
    for (auto& ep : episodes) result.outcomes.push_back(std::move(*ep.outcome));
    result.summary = summarize(result.outcomes, checkpoints);
    write_summary_csv(result.summary, root / "summary.csv");
    return result;
}

}  // namespace fairbandit
