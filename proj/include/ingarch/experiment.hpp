#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ingarch/eval.hpp"
#include "ingarch/ga.hpp"
#include "ingarch/link.hpp"
#include "ingarch/process.hpp"
#include "ingarch/sieve.hpp"
#include "ingarch/spline_link.hpp"

namespace ingarch {

struct SimulationSpec {
    std::size_t n = 1000;
    std::size_t burn_in = 50;
    std::optional<double> lambda0;  ///< unset: M / 2
    std::uint64_t seed = 7;

    bool operator==(const SimulationSpec&) const = default;
};

struct SieveSpec {
    double M = 2.0;
    std::optional<double> delta;             ///< unset: build_sieve_config rule
    double kappa = 2.0;
    std::optional<std::size_t> grid_points = 11;  ///< unset: 2 l + 1
    bool strict = false;
    double L1 = 0.62;
    double L2 = 0.50;

    bool operator==(const SieveSpec&) const = default;
};

struct EvalSpec {
    std::size_t n_eval = 100000;
    std::size_t burn_in = 1000;
    std::size_t seeds = 4;
    std::uint64_t seed = 7;

    bool operator==(const EvalSpec&) const = default;
};

/// Everything needed to rerun one experiment. Defaults reproduce the n = 1000
/// reference run: 11-point coefficient grid, knot spacing 0.2, four GA runs.
struct ExperimentSpec {
    ParametricLink truth{};
    SimulationSpec simulation{};
    SieveSpec sieve{};
    GAConfig ga{};
    EvalSpec eval{};

    /// Preset for the convergence-rate probe: the coefficient grid refines with
    /// the knots (2 l + 1 points) so lambda-slopes stay representable.
    static ExperimentSpec rate_probe();

    /// Copy with `auto` fields replaced by their values for sample size n. The
    /// GA mutation rate depends on the count cap and stays `auto` without one.
    ExperimentSpec resolved(std::size_t n, std::optional<Count> ycap = std::nullopt) const;

    void validate() const;
    bool operator==(const ExperimentSpec&) const = default;
};

/// Flat `key = value` text under `[truth]`, `[simulation]`, `[sieve]`, `[ga]`,
/// `[eval]` headers; `#` starts a comment; `auto` resets an optional field.
/// Unknown sections or keys and malformed values throw ConfigError naming the line.
ExperimentSpec parse_spec(std::istream& in);
void write_spec(const ExperimentSpec& spec, std::ostream& out);

/// Sieve for a contrast over n terms (ycap left at 0; see cap_at_max_count).
SieveConfig sieve_for(const ExperimentSpec& spec, std::size_t n);
ContractionBounds bounds_for(const ExperimentSpec& spec);

/// Data path from the truth: stream 0 of simulation.seed.
ProcessPath simulate_data(const ExperimentSpec& spec);

/// GA estimate from observed counts; run r uses GA seed derive_seed(ga.seed, r).
EstimationResult estimate_link(const ExperimentSpec& spec, std::span<const Count> counts,
                               std::size_t run = 0);

/// L2(pi) loss of an estimate against the spec's truth.
LossEstimate evaluate_estimate(const ExperimentSpec& spec, const SplineLink& estimate);

struct ReproductionRun {
    EstimationResult estimate;
    LossEstimate loss;
};

struct Reproduction {
    ProcessPath path;
    std::vector<ReproductionRun> runs;
};

/// One data path, eval.seeds independent GA runs, one loss per run.
Reproduction reproduce(const ExperimentSpec& spec);

/// `lambda,y,m_true,m_hat` on lambda_points equidistant values of [0, M] and
/// levels 0 ... estimate ycap.
void write_surface_csv(const ParametricLink& truth, const SplineLink& estimate,
                       std::size_t lambda_points, std::ostream& out);

struct RateRow {
    std::size_t n = 0;
    double median_loss = 0.0;
    double iqr_low = 0.0;
    double iqr_high = 0.0;
    std::size_t seeds_used = 0;
    std::vector<double> losses;
};

struct RateTable {
    std::vector<RateRow> rows;
    double fitted_slope = 0.0;
    std::pair<double, double> slope_ci{0.0, 0.0};  ///< 95%, Student t
};

/// Spec used for replicate `replicate` at sample size n: every seed is
/// derived from (base seed, n, replicate), so tables do not depend on the
/// order or repetition of n values.
ExperimentSpec replicate_spec(const ExperimentSpec& base, std::size_t n, std::size_t replicate);

/// simulate -> ga_minimize -> l2_loss_mc per (n, replicate); median loss per n
/// and the least-squares slope of log(median) against log(n).
RateTable rate_experiment(std::span<const std::size_t> n_values, std::size_t seeds_per_n,
                          const ExperimentSpec& base);

/// `n,median_loss,iqr_low,iqr_high,seeds`
void write_rate_csv(const RateTable& table, std::ostream& out);

}  // namespace ingarch
