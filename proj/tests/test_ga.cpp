#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ingarch/contrast.hpp"
#include "ingarch/ga.hpp"
#include "ingarch/process.hpp"

using namespace ingarch;

namespace {

const ContractionBounds kBounds(2.0, 0.62, 0.50);

SieveConfig reference_sieve(Count ycap) { return build_sieve_config(2.0, 1000, 11, ycap); }

GAConfig small_ga(std::uint64_t seed) {
    GAConfig ga;
    ga.population = 40;
    ga.generations = 60;
    ga.seed = seed;
    return ga;
}

std::vector<Count> reference_counts(std::size_t n, std::uint64_t seed) {
    return simulate(ParametricLink{}, n + 1, 50, 1.0, seed).counts;
}

// Sup-norm distance to the constant c over the levels observed at least
// min_visits times among the predictors counts[0 .. n-1].
double sup_distance_to(const SplineLink& s, double c, const std::vector<Count>& counts, int min_visits) {
    std::vector<int> visits(s.config().levels(), 0);
    for (std::size_t i = 0; i + 1 < counts.size(); ++i) ++visits[counts[i]];
    double worst = 0.0;
    for (Count y = 0; y <= s.config().ycap; ++y) {
        if (visits[y] < min_visits) continue;
        for (int i = 0; i <= 100; ++i) worst = std::max(worst, std::abs(s(s.bound() * i / 100.0, y) - c));
    }
    return worst;
}

}  // namespace

TEST_CASE("constraint mode names") {
    for (auto m : {ConstraintMode::penalty, ConstraintMode::repair, ConstraintMode::reject}) {
        CHECK(parse_constraint_mode(to_string(m)) == m);
    }
    CHECK_THROWS_AS(parse_constraint_mode("soft"), ConfigError);
}

TEST_CASE("GA config validation") {
    GAConfig ga;
    CHECK_NOTHROW(ga.validate());
    CHECK(ga.effective_penalty_weight(2.0) == 400.0);
    CHECK(ga.effective_mutation_rate(96) == doctest::Approx(1.0 / 96));
    ga.population = 1;
    CHECK_THROWS_AS(ga.validate(), ConfigError);
    ga = GAConfig{};
    ga.elitism = ga.population;
    CHECK_THROWS_AS(ga.validate(), ConfigError);
    ga = GAConfig{};
    ga.crossover_rate = 1.5;
    CHECK_THROWS_AS(ga.validate(), ConfigError);
    ga = GAConfig{};
    ga.penalty_weight = -1.0;
    CHECK_THROWS_AS(ga.validate(), ConfigError);
}

TEST_CASE("step limits on the reference grids") {
    // 11 points: one step is slope 1 > 0.62, two steps are a 0.4 level gap.
    const auto coarse = step_limits(reference_sieve(0), kBounds);
    CHECK(coarse.lambda_steps == 0);
    CHECK(coarse.level_steps == 2);
    // 21 points: one step is slope 0.5, five steps are a 0.5 level gap.
    const auto fine = step_limits(build_sieve_config(2.0, 1000, 21, 0), kBounds);
    CHECK(fine.lambda_steps == 1);
    CHECK(fine.level_steps == 5);
}

TEST_CASE("repair always lands in the contractive set") {
    Rng rng(17);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t points = 2 + rng.below(40);
        const auto cfg = build_sieve_config(2.0, 50 + rng.below(5000), points, static_cast<Count>(rng.below(8)));
        const ContractionBounds b(2.0, 2.0 * rng.uniform(), rng.uniform());
        Chromosome c{std::vector<std::uint16_t>(cfg.basis_count() * cfg.levels())};
        for (auto& g : c.genes) g = static_cast<std::uint16_t>(rng.below(points));
        const auto fixed = repair(c, cfg, b);
        REQUIRE(check_contractive(decode(fixed, cfg), b).passes);
        REQUIRE(repair(fixed, cfg, b) == fixed);
    }
}

TEST_CASE("penalized fitness") {
    SUBCASE("feasible chromosome pays nothing") {
        const auto cfg = reference_sieve(2);
        const std::vector<Count> counts{1, 0, 2, 2, 1, 0, 0, 1};
        Chromosome c{std::vector<std::uint16_t>(cfg.basis_count() * cfg.levels(), 3)};
        const double phi = contrast_phi(decode(c, cfg), std::span<const Count>(counts)).phi;
        CHECK(penalized_fitness(c, cfg, counts, kBounds, 400.0) == phi);
    }
    SUBCASE("all-zero chromosome") {
        const auto cfg = reference_sieve(2);
        const std::vector<Count> counts{1, 0, 2};
        Chromosome c{std::vector<std::uint16_t>(cfg.basis_count() * cfg.levels(), 0)};
        CHECK(penalized_fitness(c, cfg, counts, kBounds, 400.0) == 2.0);
    }
    SUBCASE("one jump of 2.0 across a knot") {
        const auto cfg = reference_sieve(0);
        const std::vector<Count> counts{1, 0, 2, 0, 0, 3};
        Chromosome c{std::vector<std::uint16_t>(cfg.basis_count(), 0)};
        for (std::size_t p = 7; p < cfg.basis_count(); ++p) c.genes[p] = 10;
        const double phi = contrast_phi(decode(c, cfg), std::span<const Count>(counts)).phi;
        CHECK(penalized_fitness(c, cfg, counts, kBounds, 10.0) ==
              doctest::Approx(phi + 10.0 * (10.0 - 0.62)).epsilon(1e-12));
    }
}

TEST_CASE("cap_at_max_count ignores the last observation") {
    const std::vector<Count> counts{0, 3, 1, 9};
    CHECK(cap_at_max_count(reference_sieve(0), counts).ycap == 3);
}

TEST_CASE("GA run invariants") {
    const auto counts = reference_counts(400, 3);
    const auto sieve = cap_at_max_count(build_sieve_config(2.0, 400, 15, 0), counts);
    for (auto mode : {ConstraintMode::repair, ConstraintMode::penalty, ConstraintMode::reject}) {
        CAPTURE(to_string(mode));
        auto ga = small_ga(11);
        ga.constraint_mode = mode;
        const auto result = ga_minimize(sieve, counts, kBounds, ga);

        CHECK(result.constraint.passes);
        CHECK(check_contractive(result.best, kBounds).passes);
        CHECK(result.phi == contrast_phi(result.best, std::span<const Count>(counts)).phi);
        REQUIRE(result.trace.size() == ga.generations + 1);
        for (std::size_t g = 1; g < result.trace.size(); ++g) {
            REQUIRE(result.trace[g].best_fitness <= result.trace[g - 1].best_fitness);
            REQUIRE(result.trace[g].generation == g);
        }
        CHECK(result.evaluations <= ga.population * (ga.generations + 1));
        CHECK(result.seed == ga.seed);

        const auto again = ga_minimize(sieve, counts, kBounds, ga);
        CHECK(again.chromosome == result.chromosome);
        CHECK(again.phi == result.phi);
        CHECK(again.evaluations == result.evaluations);
    }
}

TEST_CASE("without memoization every individual is evaluated") {
    const auto counts = reference_counts(200, 4);
    const auto sieve = cap_at_max_count(reference_sieve(0), counts);
    auto ga = small_ga(5);
    ga.memoize = false;
    const auto result = ga_minimize(sieve, counts, kBounds, ga);
    CHECK(result.evaluations == ga.population * (ga.generations + 1));

    ga.memoize = true;
    const auto cached = ga_minimize(sieve, counts, kBounds, ga);
    CHECK(cached.evaluations < result.evaluations);
    CHECK(cached.chromosome == result.chromosome);
}

TEST_CASE("degenerate budget returns the better initial individual") {
    const std::vector<Count> counts{1, 0, 2, 1, 1, 0};
    const auto sieve = cap_at_max_count(reference_sieve(0), counts);
    GAConfig ga;
    ga.population = 2;
    ga.generations = 0;
    ga.elitism = 1;
    ga.memoize = false;
    const auto result = ga_minimize(sieve, counts, kBounds, ga);
    CHECK(result.evaluations == 2);
    REQUIRE(result.trace.size() == 1);
    // Individual 0 is the all-zero constant; the other is random then repaired.
    const Chromosome zero{std::vector<std::uint16_t>(sieve.basis_count() * sieve.levels(), 0)};
    const double zero_phi = contrast_phi(decode(zero, sieve), std::span<const Count>(counts)).phi;
    CHECK(result.phi <= zero_phi);
    CHECK(result.trace[0].best_fitness == result.phi);
}

TEST_CASE("penalty mode with zero weight still returns a feasible estimate") {
    const auto counts = reference_counts(200, 8);
    const auto sieve = cap_at_max_count(build_sieve_config(2.0, 200, 21, 0), counts);
    auto ga = small_ga(2);
    ga.constraint_mode = ConstraintMode::penalty;
    ga.penalty_weight = 0.0;
    const auto result = ga_minimize(sieve, counts, kBounds, ga);
    CHECK(result.constraint.passes);
}

TEST_CASE("degenerate inputs") {
    const std::vector<Count> one{1};
    CHECK_THROWS_AS(ga_minimize(reference_sieve(0), one, kBounds, GAConfig{}), ArityError);
    auto broken = reference_sieve(0);
    broken.grid = {0.0};
    const std::vector<Count> counts{1, 0};
    CHECK_THROWS_AS(ga_minimize(broken, counts, kBounds, GAConfig{}), ConfigError);
}

TEST_CASE("constant truth is recovered") {
    const double c = 0.6;
    int close = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto path = simulate(ConstantLink{c, 2.0}, 2001, 0, c, 808, seed);
        const auto sieve = cap_at_max_count(build_sieve_config(2.0, 2000, 11, 0), path.counts);
        GAConfig ga;
        ga.seed = seed;
        const auto result = ga_minimize(sieve, path.counts, kBounds, ga);
        // The constant candidate is on the grid, so the optimum cannot be worse.
        const Chromosome flat{std::vector<std::uint16_t>(sieve.basis_count() * sieve.levels(), 3)};
        CHECK(result.phi <= penalized_fitness(flat, sieve, path.counts, kBounds, 0.0));
        // Sparsely observed levels are fitted to a handful of points and are
        // left out of the comparison.
        if (sup_distance_to(result.best, c, path.counts, 100) <= 0.15) ++close;
    }
    CHECK(close >= 8);
}

TEST_CASE("trace csv") {
    std::vector<TraceRow> rows{{0, 1.5, 2.0, 0.5}, {1, 1.25, 1.75, 1.0}};
    std::ostringstream out;
    write_trace_csv(rows, out);
    CHECK(out.str() == "generation,best_fitness,mean_fitness,feasible_fraction\n0,1.5,2,0.5\n1,1.25,1.75,1\n");
}
