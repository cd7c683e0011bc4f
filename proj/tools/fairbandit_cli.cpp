// fairbandit: run fair multi-agent bandit experiments and chart their regret.
//
//   fairbandit run --agents 4 --arms 2 --horizon 200000 --instances 10 --out results
//   fairbandit chart --out regret.svg results/n4_k2/fair-ucb_instance_0.csv ...
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fairbandit/chart.hpp"
#include "fairbandit/harness.hpp"

namespace fb = fairbandit;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

struct RunFlags {
    std::vector<std::size_t> agents;
    std::vector<std::size_t> arms;
    std::uint64_t horizon = 0;
    std::size_t instances = 0;
    std::string algos;
    double delta = 0;
    double width_scale = 0;
    double bonus_scale = 0;
    double warmup_multiplier = 0;
    std::size_t restarts = 0;
    bool anytime = false;
    std::uint64_t seed = 0;
    std::string out;
    std::size_t workers = 0;
    std::uint64_t stride = 0;
    std::vector<std::uint64_t> checkpoints;
    bool no_charts = false;
    std::string config;
};

fb::ExperimentConfig build_config(const CLI::App& cmd, const RunFlags& f) {
    fb::ExperimentConfig config;
    auto given = [&](const char* name) { return cmd.get_option(name)->count() > 0; };
    if (given("--agents") || given("--arms")) {
        const auto& n = given("--agents") ? f.agents : std::vector<std::size_t>{config.sizes.front().n_agents};
        const auto& k = given("--arms") ? f.arms : std::vector<std::size_t>{config.sizes.front().n_arms};
        if (n.size() != k.size()) {
            throw fb::Error(fb::ErrorCode::Config, "sizes: --agents and --arms need the same number of values");
        }
        config.sizes.clear();
        for (std::size_t i = 0; i < n.size(); ++i) config.sizes.push_back({n[i], k[i]});
    }
    if (given("--horizon")) config.horizon = f.horizon;
    if (given("--instances")) config.instance_count = f.instances;
    if (given("--algos")) {
        config.algorithms.clear();
        for (const auto& name : split_list(f.algos)) config.algorithms.push_back(fb::parse_algorithm(name));
    }
    if (given("--delta")) config.delta = f.delta;
    if (given("--width-scale")) config.width_scale = f.width_scale;
    if (given("--bonus-scale")) config.bonus_scale = f.bonus_scale;
    if (given("--warmup-multiplier")) config.warmup_multiplier = f.warmup_multiplier;
    if (given("--restarts")) config.restarts = f.restarts;
    if (given("--anytime")) config.anytime = f.anytime;
    if (given("--seed")) config.master_seed = f.seed;
    if (given("--out")) config.output_dir = f.out;
    if (given("--workers")) config.workers = f.workers;
    if (given("--stride")) config.checkpoint_every = f.stride;
    if (given("--checkpoints")) config.checkpoints = f.checkpoints;
    if (given("--no-charts")) config.write_charts = false;
    // Keys present in the config file take precedence over flags.
    if (!f.config.empty()) config = fb::load_config_file(f.config, config);
    config.validate();
    return config;
}

int run_command(const CLI::App& cmd, const RunFlags& flags) {
    fb::ExperimentConfig config;
    try {
        config = build_config(cmd, flags);
    } catch (const fb::Error& e) {
        std::cerr << "fairbandit: " << e.what() << '\n';
        return kExitConfig;
    }
    try {
        const auto result = fb::run_batch(config);
        std::printf("%-8s %-6s %-14s %10s %14s %12s %12s\n", "agents", "arms", "algorithm", "t", "mean_regret",
                    "std_regret", "opt_nsw");
        for (const auto& r : result.summary) {
            std::printf("%-8zu %-6zu %-14s %10llu %14.2f %12.2f %12.4f\n", r.n_agents, r.n_arms,
                        r.algorithm.c_str(), static_cast<unsigned long long>(r.checkpoint_t), r.mean_regret,
                        r.std_regret, r.mean_opt_nsw);
        }
        std::printf("wrote %s\n", (config.output_dir / "summary.csv").string().c_str());
    } catch (const fb::Error& e) {
        std::cerr << "fairbandit: " << e.what() << '\n';
        return e.code() == fb::ErrorCode::Config ? kExitConfig : kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "fairbandit: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}

int chart_command(const std::vector<std::string>& traces, const std::string& out, const std::string& title) {
    try {
        std::vector<fb::ChartSeries> series;
        for (const auto& path : traces) {
            fb::ChartSeries s{std::filesystem::path(path).stem().string(), {0.0}, {0.0}};
            for (const auto& row : fb::read_trace_csv(path)) {
                s.rounds.push_back(static_cast<double>(row.t));
                s.regret.push_back(row.cum_regret);
            }
            series.push_back(std::move(s));
        }
        fb::emit_regret_chart(series, out, title);
        std::printf("wrote %s\n", out.c_str());
    } catch (const std::exception& e) {
        std::cerr << "fairbandit: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fair multi-agent multi-armed bandits: Nash social welfare regret experiments"};
    app.require_subcommand(1);

    RunFlags flags;
    auto* run = app.add_subcommand("run", "Run a batch of experiments and write traces and a summary");
    run->add_option("--agents", flags.agents, "Number of agents N (comma list for several sizes)")->delimiter(',');
    run->add_option("--arms", flags.arms, "Number of arms K (comma list, paired with --agents)")->delimiter(',');
    run->add_option("--horizon", flags.horizon, "Rounds per episode T");
    run->add_option("--instances", flags.instances, "Random instances per size");
    run->add_option("--algos", flags.algos, "Comma list of fair-ucb, high-startup, baseline-ucb");
    run->add_option("--delta", flags.delta, "Confidence parameter delta in (0,1)");
    run->add_option("--width-scale", flags.width_scale, "Multiplier on the Fair UCB confidence width");
    run->add_option("--bonus-scale", flags.bonus_scale, "Multiplier on the baseline additive bonus");
    run->add_option("--warmup-multiplier", flags.warmup_multiplier,
                    "Constant of the high start-up warm-up length (180 in the original schedule)");
    run->add_option("--restarts", flags.restarts, "Ascent restarts for the non-concave objectives");
    run->add_flag("--anytime", flags.anytime, "Use the horizon-free confidence width");
    run->add_option("--seed", flags.seed, "Master seed");
    run->add_option("--out", flags.out, "Output directory");
    run->add_option("--workers", flags.workers, "Parallel episodes");
    run->add_option("--stride", flags.stride, "Rounds between persisted trace rows");
    run->add_option("--checkpoints", flags.checkpoints, "Rounds reported in summary.csv")->delimiter(',');
    run->add_flag("--no-charts", flags.no_charts, "Skip SVG charts");
    run->add_option("--config", flags.config, "JSON config file; its keys override flags");

    std::vector<std::string> traces;
    std::string chart_out = "regret.svg";
    std::string chart_title;
    auto* chart = app.add_subcommand("chart", "Draw an SVG regret chart from trace CSVs");
    chart->add_option("traces", traces, "Trace CSV files")->required();
    chart->add_option("--out", chart_out, "Output SVG path");
    chart->add_option("--title", chart_title, "Chart title");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    if (run->parsed()) return run_command(*run, flags);
    return chart_command(traces, chart_out, chart_title);
}
