#include "ingarch/ga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <unordered_map>

#include "ingarch/contrast.hpp"
#include "ingarch/errors.hpp"
#include "ingarch/format.hpp"
#include "ingarch/rng.hpp"

namespace ingarch {

std::string_view to_string(ConstraintMode mode) {
    switch (mode) {
        case ConstraintMode::penalty: return "penalty";
        case ConstraintMode::repair: return "repair";
        case ConstraintMode::reject: return "reject";
    }
    return "?";
}

ConstraintMode parse_constraint_mode(std::string_view text) {
    if (text == "penalty") return ConstraintMode::penalty;
    if (text == "repair") return ConstraintMode::repair;
    if (text == "reject") return ConstraintMode::reject;
    throw ConfigError("unknown constraint mode '" + std::string(text) + "'");
}

void GAConfig::validate() const {
    if (population < 2) throw ConfigError("ga: population must be at least 2");
    if (elitism >= population) throw ConfigError("ga: elitism must be below population");
    if (tournament_size < 1) throw ConfigError("ga: tournament size must be positive");
    auto is_prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!is_prob(crossover_rate)) throw ConfigError("ga: crossover rate must lie in [0, 1]");
    if (mutation_rate && !is_prob(*mutation_rate)) throw ConfigError("ga: mutation rate must lie in [0, 1]");
    if (penalty_weight && !(*penalty_weight >= 0.0)) throw ConfigError("ga: penalty weight must be non-negative");
}

double GAConfig::effective_mutation_rate(std::size_t genes) const {
    return mutation_rate.value_or(1.0 / static_cast<double>(std::max<std::size_t>(genes, 1)));
}

double GAConfig::effective_penalty_weight(double M) const {
    return penalty_weight.value_or(100.0 * M * M);
}

SplineLink decode(const Chromosome& chromosome, const SieveConfig& sieve) {
    std::vector<double> coeffs(chromosome.genes.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        coeffs[i] = sieve.grid.at(chromosome.genes[i]);
    }
    return SplineLink(sieve, std::move(coeffs));
}

StepLimits step_limits(const SieveConfig& sieve, const ContractionBounds& bounds) {
    const int top = static_cast<int>(sieve.grid_points()) - 1;
    // Half the checker's slack is left for rounding in grid differences.
    auto fits = [&](int k, double limit, double scale) {
        return (sieve.grid[static_cast<std::size_t>(k)] - sieve.grid[0]) / scale <=
               limit + 0.5 * kConstraintTolerance;
    };
    auto largest = [&](double limit, double scale) {
        int k = 0;
        while (k < top && fits(k + 1, limit, scale)) ++k;
        return k;
    };
    return StepLimits{largest(bounds.L1, sieve.delta), largest(bounds.L2, 1.0)};
}

Chromosome repair(Chromosome chromosome, const SieveConfig& sieve, const ContractionBounds& bounds) {
    const auto [ks, kg] = step_limits(sieve, bounds);
    const std::size_t width = sieve.basis_count();
    auto& g = chromosome.genes;
    auto clamp_to = [](std::uint16_t value, std::uint16_t anchor, int steps) {
        const int lo = static_cast<int>(anchor) - steps;
        const int hi = static_cast<int>(anchor) + steps;
        return static_cast<std::uint16_t>(std::clamp(static_cast<int>(value), lo, hi));
    };
    for (std::size_t y = 0; y < sieve.levels(); ++y) {
        for (std::size_t p = 1; p < width; ++p) {
            g[y * width + p] = clamp_to(g[y * width + p], g[y * width + p - 1], ks);
        }
    }
    for (std::size_t y = 1; y < sieve.levels(); ++y) {
        for (std::size_t p = 0; p < width; ++p) {
            g[y * width + p] = clamp_to(g[y * width + p], g[(y - 1) * width + p], kg);
        }
    }
    return chromosome;
}

double penalized_fitness(const Chromosome& chromosome, const SieveConfig& sieve,
                         std::span<const Count> counts, const ContractionBounds& bounds,
                         double penalty_weight) {
    const auto spline = decode(chromosome, sieve);
    const auto report = check_contractive(spline, bounds);
    const double phi = contrast_phi(spline, counts).phi;
    if (report.passes) return phi;
    return phi + penalty_weight * (report.slope_excess(bounds.L1) + report.gap_excess(bounds.L2));
}

SieveConfig cap_at_max_count(const SieveConfig& sieve, std::span<const Count> counts) {
    if (counts.size() < 2) throw ArityError("cap_at_max_count: need at least 2 observations");
    const auto predictors = counts.first(counts.size() - 1);
    return sieve.with_ycap(*std::max_element(predictors.begin(), predictors.end()));
}

namespace {

struct Evaluation {
    double fitness = 0.0;
    double phi = 0.0;
    bool feasible = false;
};

std::string key_of(const Chromosome& c) {
    return std::string(reinterpret_cast<const char*>(c.genes.data()),
                       c.genes.size() * sizeof(std::uint16_t));
}

class Evaluator {
public:
    Evaluator(const SieveConfig& sieve, std::span<const Count> counts, const ContractionBounds& bounds,
              const GAConfig& ga)
        : sieve_(sieve), counts_(counts), bounds_(bounds), ga_(ga),
          penalty_(ga.effective_penalty_weight(sieve.M)) {}

    /// Evaluates a whole generation. Cache misses are collected first so the
    /// parallel section only fills indexed slots.
    std::vector<Evaluation> evaluate(const std::vector<Chromosome>& population) {
        std::vector<Evaluation> out(population.size());
        std::vector<std::size_t> pending;
        std::vector<std::string> keys(population.size());
        std::unordered_map<std::string, std::size_t> first_seen;
        for (std::size_t i = 0; i < population.size(); ++i) {
            if (!ga_.memoize) {
                pending.push_back(i);
                continue;
            }
            keys[i] = key_of(population[i]);
            if (cache_.contains(keys[i])) continue;
            if (first_seen.emplace(keys[i], i).second) pending.push_back(i);
        }

        std::vector<Evaluation> fresh(pending.size());
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(pending.size()); ++j) {
            fresh[static_cast<std::size_t>(j)] = evaluate_one(population[pending[static_cast<std::size_t>(j)]]);
        }
        count_ += pending.size();

        if (!ga_.memoize) {
            for (std::size_t j = 0; j < pending.size(); ++j) out[pending[j]] = fresh[j];
            return out;
        }
        for (std::size_t j = 0; j < pending.size(); ++j) cache_.emplace(keys[pending[j]], fresh[j]);
        for (std::size_t i = 0; i < population.size(); ++i) out[i] = cache_.at(keys[i]);
        return out;
    }

    Evaluation evaluate_one(const Chromosome& c) const {
        const auto spline = decode(c, sieve_);
        const auto report = check_contractive(spline, bounds_);
        Evaluation e;
        e.feasible = report.passes;
        if (!e.feasible && ga_.constraint_mode == ConstraintMode::reject) {
            e.phi = std::numeric_limits<double>::quiet_NaN();
            e.fitness = std::numeric_limits<double>::infinity();
            return e;
        }
        e.phi = contrast_phi(spline, counts_).phi;
        e.fitness = e.feasible ? e.phi
                               : e.phi + penalty_ * (report.slope_excess(bounds_.L1) +
                                                     report.gap_excess(bounds_.L2));
        return e;
    }

    std::size_t count() const noexcept { return count_; }

private:
    const SieveConfig& sieve_;
    std::span<const Count> counts_;
    const ContractionBounds& bounds_;
    const GAConfig& ga_;
    double penalty_;
    std::unordered_map<std::string, Evaluation> cache_;
    std::size_t count_ = 0;
};

std::size_t tournament(std::span<const Evaluation> evals, std::size_t size, Rng& rng) {
    std::size_t best = rng.below(evals.size());
    for (std::size_t k = 1; k < size; ++k) {
        const std::size_t challenger = rng.below(evals.size());
        if (evals[challenger].fitness < evals[best].fitness ||
            (evals[challenger].fitness == evals[best].fitness && challenger < best)) {
            best = challenger;
        }
    }
    return best;
}

}  // namespace

EstimationResult ga_minimize(const SieveConfig& sieve, std::span<const Count> counts,
                             const ContractionBounds& bounds, const GAConfig& ga) {
    sieve.validate();
    bounds.validate();
    ga.validate();
    if (counts.size() < 2) throw ArityError("ga_minimize: need at least 2 observations");
    if (sieve.grid_points() > std::numeric_limits<std::uint16_t>::max()) {
        throw ConfigError("ga_minimize: coefficient grid too large");
    }

    const std::size_t genes = sieve.basis_count() * sieve.levels();
    const auto top = static_cast<std::uint16_t>(sieve.grid_points() - 1);
    const double mutation = ga.effective_mutation_rate(genes);
    const bool repair_all = ga.constraint_mode == ConstraintMode::repair;
    Rng rng(ga.seed);
    Evaluator evaluator(sieve, counts, bounds, ga);

    // Half constant chromosomes (feasible by construction), half random repaired.
    std::vector<Chromosome> population;
    population.reserve(ga.population);
    const std::size_t constants = ga.population / 2;
    for (std::size_t i = 0; i < constants; ++i) {
        const auto level = static_cast<std::uint16_t>(i % sieve.grid_points());
        population.push_back(Chromosome{std::vector<std::uint16_t>(genes, level)});
    }
    while (population.size() < ga.population) {
        Chromosome c{std::vector<std::uint16_t>(genes)};
        for (auto& g : c.genes) g = static_cast<std::uint16_t>(rng.below(top + 1u));
        population.push_back(repair(std::move(c), sieve, bounds));
    }

    std::optional<Chromosome> best_feasible;
    double best_feasible_phi = std::numeric_limits<double>::infinity();
    Chromosome best_any;
    double best_fitness = std::numeric_limits<double>::infinity();
    std::vector<TraceRow> trace;
    trace.reserve(ga.generations + 1);

    std::vector<std::size_t> order(ga.population);
    for (std::size_t gen = 0;; ++gen) {
        const auto evals = evaluator.evaluate(population);

        double sum = 0.0;
        std::size_t finite = 0;
        std::size_t feasible = 0;
        for (std::size_t i = 0; i < population.size(); ++i) {
            const auto& e = evals[i];
            if (std::isfinite(e.fitness)) {
                sum += e.fitness;
                ++finite;
            }
            if (e.feasible) {
                ++feasible;
                if (e.phi < best_feasible_phi) {
                    best_feasible_phi = e.phi;
                    best_feasible = population[i];
                }
            }
            if (e.fitness < best_fitness) {
                best_fitness = e.fitness;
                best_any = population[i];
            }
        }
        trace.push_back(TraceRow{
            gen, best_fitness,
            finite ? sum / static_cast<double>(finite) : std::numeric_limits<double>::infinity(),
            static_cast<double>(feasible) / static_cast<double>(population.size())});

        if (gen == ga.generations) break;

        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return evals[a].fitness < evals[b].fitness; });

        std::vector<Chromosome> next;
        next.reserve(ga.population);
        for (std::size_t e = 0; e < ga.elitism; ++e) next.push_back(population[order[e]]);
        while (next.size() < ga.population) {
            const auto& mother = population[tournament(evals, ga.tournament_size, rng)];
            const auto& father = population[tournament(evals, ga.tournament_size, rng)];
            Chromosome child = mother;
            if (rng.bernoulli(ga.crossover_rate)) {
                for (std::size_t i = 0; i < genes; ++i) {
                    if (rng.bernoulli(0.5)) child.genes[i] = father.genes[i];
                }
            }
            for (auto& g : child.genes) {
                if (!rng.bernoulli(mutation)) continue;
                const bool up = rng.bernoulli(0.5);
                if (up && g < top) ++g;
                else if (!up && g > 0) --g;
            }
            if (repair_all) child = repair(std::move(child), sieve, bounds);
            next.push_back(std::move(child));
        }
        population = std::move(next);
    }

    bool repaired = false;
    if (!best_feasible) {
        best_feasible = repair(best_any, sieve, bounds);
        best_feasible_phi = evaluator.evaluate_one(*best_feasible).phi;
        repaired = true;
    }
    auto spline = decode(*best_feasible, sieve);
    auto report = check_contractive(spline, bounds);
    if (!report.passes) {
        throw InvariantViolation("ga_minimize: repaired individual failed the contraction check");
    }
    const std::size_t evaluations = evaluator.count() + (repaired ? 1 : 0);
    return EstimationResult{std::move(spline), std::move(*best_feasible), best_feasible_phi,
                            std::move(report), std::move(trace), evaluations, ga.seed, repaired};
}

void write_trace_csv(std::span<const TraceRow> trace, std::ostream& out) {
    out << "generation,best_fitness,mean_fitness,feasible_fraction\n";
    for (const auto& row : trace) {
        out << row.generation << ',' << format_double(row.best_fitness) << ','
            << format_double(row.mean_fitness) << ',' << format_double(row.feasible_fraction) << '\n';
    }
}

}  // namespace ingarch
