#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ingarch/errors.hpp"
#include "ingarch/experiment.hpp"
#include "ingarch/format.hpp"

namespace fs = std::filesystem;
using namespace ingarch;

namespace {

constexpr const char* kOutDirEnv = "INGARCH_OUT_DIR";
constexpr std::size_t kSurfacePoints = 41;

// Options shared by every subcommand.
struct Common {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("-c,--config", c.config, "experiment config file")->check(CLI::ExistingFile);
    cmd->add_option("-o,--out", c.out, std::string("output directory (default $") + kOutDirEnv + " or .)");
    cmd->add_option("--seed", c.seed, "sets the simulation, GA and evaluation seeds");
}

ExperimentSpec load_spec(const Common& c, const ExperimentSpec& fallback) {
    ExperimentSpec spec = fallback;
    if (!c.config.empty()) {
        std::ifstream in(c.config);
        if (!in) throw ConfigError("cannot read config file " + c.config);
        spec = parse_spec(in);
    }
    if (c.seed) {
        spec.simulation.seed = *c.seed;
        spec.ga.seed = *c.seed;
        spec.eval.seed = *c.seed;
    }
    spec.validate();
    return spec;
}

fs::path out_dir(const Common& c) {
    fs::path dir = ".";
    if (!c.out.empty()) {
        dir = c.out;
    } else if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') {
        dir = env;
    }
    fs::create_directories(dir);
    return dir;
}

template <typename Writer>
void write_file(const fs::path& path, Writer&& writer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    writer(out);
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    return in;
}

void echo_config(const fs::path& dir, const std::string& command, const ExperimentSpec& spec) {
    write_file(dir / (command + ".config"), [&](std::ostream& o) { write_spec(spec, o); });
}

std::string run_tag(std::size_t run) { return "_run" + std::to_string(run); }

void write_estimate(const fs::path& dir, std::size_t run, const EstimationResult& est) {
    const auto tag = run_tag(run);
    write_file(dir / ("spline" + tag + ".csv"), [&](std::ostream& o) { write_spline_csv(est.best, o); });
    write_file(dir / ("spline" + tag + ".meta"), [&](std::ostream& o) { write_sieve_meta(est.best.config(), o); });
    write_file(dir / ("trace" + tag + ".csv"), [&](std::ostream& o) { write_trace_csv(est.trace, o); });
}

void write_evaluation(const fs::path& dir, std::size_t run, const ExperimentSpec& spec, const SplineLink& link,
                      const LossEstimate& loss) {
    const auto tag = run_tag(run);
    const std::vector<LossEstimate> rows{loss};
    write_file(dir / ("loss" + tag + ".csv"), [&](std::ostream& o) { write_loss_csv(rows, o); });
    write_file(dir / ("surface" + tag + ".csv"),
               [&](std::ostream& o) { write_surface_csv(spec.truth, link, kSurfacePoints, o); });
}

std::vector<std::size_t> parse_sizes(const std::string& list) {
    std::vector<std::size_t> sizes;
    for (const auto& part : split(list, ',')) {
        long long n = 0;
        try {
            n = parse_int(part);
        } catch (const std::invalid_argument&) {
            throw ConfigError("--n: not an integer: " + std::string(part));
        }
        if (n < 2) throw ConfigError("--n: sample sizes must be at least 2");
        sizes.push_back(static_cast<std::size_t>(n));
    }
    if (sizes.empty()) throw ConfigError("--n: empty list");
    return sizes;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"INGARCH(1,1) simulation and sieved spline link estimation"};
    app.require_subcommand(1);

    Common simulate_opts, estimate_opts, evaluate_opts, rate_opts, fig_opts;
    std::optional<std::size_t> sim_n;
    std::string data_file, spline_file, meta_file;
    std::size_t estimate_run = 0, evaluate_run = 0;
    std::string rate_sizes = "250,500,1000,2000,4000";
    std::optional<std::size_t> rate_seeds;

    auto* simulate_cmd = app.add_subcommand("simulate", "simulate a path from the configured truth -> path.csv");
    add_common(simulate_cmd, simulate_opts);
    simulate_cmd->add_option("-n,--n", sim_n, "path length (overrides simulation.n)");

    auto* estimate_cmd = app.add_subcommand("estimate", "fit a spline link to a path -> spline/trace csv");
    add_common(estimate_cmd, estimate_opts);
    estimate_cmd->add_option("-d,--data", data_file, "path csv (t,lambda,y)")->required();
    estimate_cmd->add_option("--run", estimate_run, "GA run index, selects the GA seed stream");

    auto* evaluate_cmd = app.add_subcommand("evaluate", "L2 loss of a fitted spline against the truth");
    add_common(evaluate_cmd, evaluate_opts);
    evaluate_cmd->add_option("-s,--spline", spline_file, "spline csv (p,y,alpha)")->required();
    evaluate_cmd->add_option("-m,--meta", meta_file, "sieve sidecar (default: spline path with .meta)");
    evaluate_cmd->add_option("--run", evaluate_run, "run index used in output names");

    auto* rate_cmd = app.add_subcommand("rate", "median loss against sample size -> rate.csv");
    add_common(rate_cmd, rate_opts);
    rate_cmd->add_option("--n", rate_sizes, "comma separated sample sizes");
    rate_cmd->add_option("--seeds", rate_seeds, "replicates per sample size (default eval.seeds)");

    auto* fig_cmd = app.add_subcommand("reproduce-fig2", "simulate, fit eval.seeds GA runs and evaluate each");
    add_common(fig_cmd, fig_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (simulate_cmd->parsed()) {
            auto spec = load_spec(simulate_opts, ExperimentSpec{});
            if (sim_n) {
                spec.simulation.n = *sim_n;
                spec.validate();
            }
            const auto dir = out_dir(simulate_opts);
            const auto path = simulate_data(spec);
            echo_config(dir, "simulate", spec.resolved(spec.simulation.n));
            write_file(dir / "path.csv", [&](std::ostream& o) { write_path_csv(path, o); });
        } else if (estimate_cmd->parsed()) {
            const auto spec = load_spec(estimate_opts, ExperimentSpec{});
            auto in = open_input(data_file);
            const auto path = read_path_csv(in);
            const auto dir = out_dir(estimate_opts);
            const auto est = estimate_link(spec, path.counts, estimate_run);
            echo_config(dir, "estimate", spec.resolved(path.size() - 1, est.best.config().ycap));
            write_estimate(dir, estimate_run, est);
        } else if (evaluate_cmd->parsed()) {
            const auto spec = load_spec(evaluate_opts, ExperimentSpec{});
            if (meta_file.empty()) meta_file = fs::path(spline_file).replace_extension(".meta").string();
            auto meta_in = open_input(meta_file);
            const auto sieve = read_sieve_meta(meta_in);
            auto csv_in = open_input(spline_file);
            const auto link = read_spline(csv_in, sieve);
            if (link.bound() != spec.truth.M) throw ConfigError("spline M differs from truth.M");
            const auto dir = out_dir(evaluate_opts);
            const auto loss = evaluate_estimate(spec, link);
            echo_config(dir, "evaluate", spec);
            write_evaluation(dir, evaluate_run, spec, link, loss);
        } else if (rate_cmd->parsed()) {
            auto spec = load_spec(rate_opts, ExperimentSpec::rate_probe());
            const auto sizes = parse_sizes(rate_sizes);
            const std::size_t seeds = rate_seeds.value_or(spec.eval.seeds);
            if (seeds < 1) throw ConfigError("--seeds must be at least 1");
            spec.eval.seeds = seeds;
            const auto dir = out_dir(rate_opts);
            const auto table = rate_experiment(sizes, seeds, spec);
            echo_config(dir, "rate", spec);
            write_file(dir / "rate.csv", [&](std::ostream& o) { write_rate_csv(table, o); });
            write_file(dir / "rate_fit.txt", [&](std::ostream& o) {
                o << "slope=" << format_double(table.fitted_slope) << '\n'
                  << "ci_low=" << format_double(table.slope_ci.first) << '\n'
                  << "ci_high=" << format_double(table.slope_ci.second) << '\n';
            });
        } else if (fig_cmd->parsed()) {
            const auto spec = load_spec(fig_opts, ExperimentSpec{});
            const auto dir = out_dir(fig_opts);
            const auto rep = reproduce(spec);
            const auto ycap = rep.runs.front().estimate.best.config().ycap;
            echo_config(dir, "reproduce-fig2", spec.resolved(spec.simulation.n, ycap));
            write_file(dir / "path.csv", [&](std::ostream& o) { write_path_csv(rep.path, o); });
            std::vector<LossEstimate> losses;
            for (std::size_t r = 0; r < rep.runs.size(); ++r) {
                const auto& run = rep.runs[r];
                write_estimate(dir, r, run.estimate);
                write_evaluation(dir, r, spec, run.estimate.best, run.loss);
                losses.push_back(run.loss);
            }
            write_file(dir / "losses.csv", [&](std::ostream& o) { write_loss_csv(losses, o); });
        }
    } catch (const ConfigError& e) {
        std::cerr << "ingarch: config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "ingarch: error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
