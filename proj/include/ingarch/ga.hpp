#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ingarch/link.hpp"
#include "ingarch/sieve.hpp"
#include "ingarch/spline_link.hpp"

namespace ingarch {

enum class ConstraintMode {
    penalty,  ///< infeasible individuals pay penalty_weight * excess
    repair,   ///< every offspring is repaired into the feasible set
    reject,   ///< infeasible individuals get infinite fitness
};

std::string_view to_string(ConstraintMode mode);
ConstraintMode parse_constraint_mode(std::string_view text);

struct GAConfig {
    std::size_t population = 200;
    std::size_t generations = 500;
    std::size_t tournament_size = 3;
    double crossover_rate = 0.5;
    std::optional<double> mutation_rate;   ///< unset: 1 / #genes
    std::size_t elitism = 2;
    std::optional<double> penalty_weight;  ///< unset: 100 M^2
    std::uint64_t seed = 7;
    ConstraintMode constraint_mode = ConstraintMode::repair;
    bool memoize = true;

    void validate() const;
    double effective_mutation_rate(std::size_t genes) const;
    double effective_penalty_weight(double M) const;

    bool operator==(const GAConfig&) const = default;
};

/// Grid indices into SieveConfig::grid, laid out like SplineLink coefficients.
struct Chromosome {
    std::vector<std::uint16_t> genes;

    bool operator==(const Chromosome&) const = default;
};

SplineLink decode(const Chromosome& chromosome, const SieveConfig& sieve);

/// Largest index steps between neighbours (along lambda, along y) that keep
/// check_contractive passing on this grid.
struct StepLimits {
    int lambda_steps = 0;
    int level_steps = 0;
};
StepLimits step_limits(const SieveConfig& sieve, const ContractionBounds& bounds);

/// Sweeps p ascending on each level clamping a_p into a_{p-1} +- lambda_steps,
/// then sweeps levels ascending clamping a_p(y) into a_p(y-1) +- level_steps.
/// The second sweep preserves the first (a clamp of Lipschitz sequences between
/// Lipschitz bounds is Lipschitz). The result depends on the sweep order and
/// can move genes further than strictly necessary.
Chromosome repair(Chromosome chromosome, const SieveConfig& sieve, const ContractionBounds& bounds);

/// Phi_n of the decoded spline plus penalty_weight * (slope excess + gap excess).
double penalized_fitness(const Chromosome& chromosome, const SieveConfig& sieve,
                         std::span<const Count> counts, const ContractionBounds& bounds,
                         double penalty_weight);

struct TraceRow {
    std::size_t generation = 0;
    double best_fitness = 0.0;  ///< best seen so far
    double mean_fitness = 0.0;  ///< over finite fitness values of the generation
    double feasible_fraction = 0.0;
};

struct EstimationResult {
    SplineLink best;
    Chromosome chromosome;
    double phi = 0.0;
    ConstraintReport constraint;
    std::vector<TraceRow> trace;
    std::size_t evaluations = 0;  ///< contrast evaluations actually performed
    std::uint64_t seed = 0;
    bool repaired = false;  ///< no feasible individual was seen; best was repaired
};

/// Copy of `sieve` capped at the largest count among counts[0 .. n-1], the
/// values the contrast feeds into the link.
SieveConfig cap_at_max_count(const SieveConfig& sieve, std::span<const Count> counts);

/// Tournament GA with uniform crossover, +-1 grid-step mutation and elitism.
/// Deterministic in ga.seed. The returned individual always passes
/// check_contractive.
EstimationResult ga_minimize(const SieveConfig& sieve, std::span<const Count> counts,
                             const ContractionBounds& bounds, const GAConfig& ga);

/// `generation,best_fitness,mean_fitness,feasible_fraction`
void write_trace_csv(std::span<const TraceRow> trace, std::ostream& out);

}  // namespace ingarch
