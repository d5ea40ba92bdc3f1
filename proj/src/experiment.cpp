#include "ingarch/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <string>

#include <boost/math/distributions/students_t.hpp>

#include "ingarch/errors.hpp"
#include "ingarch/format.hpp"
#include "ingarch/rng.hpp"

namespace ingarch {

namespace {

// Config-file field registry: one entry per key, used by both the parser and
// the writer so the two cannot drift apart.
struct Field {
    const char* section;
    const char* key;
    std::function<std::string(const ExperimentSpec&)> get;
    std::function<void(ExperimentSpec&, std::string_view)> set;
};

std::string str(double v) { return format_double(v); }
std::string str(std::size_t v) { return std::to_string(v); }
std::string str(bool v) { return v ? "true" : "false"; }

std::size_t to_size(std::string_view text) {
    const long long v = parse_int(text);
    if (v < 0) throw std::invalid_argument("expected a non-negative integer");
    return static_cast<std::size_t>(v);
}

std::uint64_t to_u64(std::string_view text) {
    text = trim(text);
    std::uint64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw std::invalid_argument("expected an unsigned integer");
    }
    return v;
}

bool to_bool(std::string_view text) {
    text = trim(text);
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw std::invalid_argument("expected true or false");
}

template <typename T, typename Conv>
std::optional<T> to_optional(std::string_view text, Conv conv) {
    if (trim(text) == "auto") return std::nullopt;
    return conv(text);
}

template <typename T>
std::string str_optional(const std::optional<T>& v) {
    return v ? str(*v) : std::string("auto");
}

#define INGARCH_FIELD(SECTION, KEY, MEMBER, CONV)                                   \
    Field {                                                                         \
        SECTION, KEY, [](const ExperimentSpec& s) { return str(s.MEMBER); },        \
            [](ExperimentSpec& s, std::string_view v) { s.MEMBER = CONV(v); }       \
    }

#define INGARCH_OPT_FIELD(SECTION, KEY, MEMBER, TYPE, CONV)                                        \
    Field {                                                                                        \
        SECTION, KEY, [](const ExperimentSpec& s) { return str_optional(s.MEMBER); },              \
            [](ExperimentSpec& s, std::string_view v) { s.MEMBER = to_optional<TYPE>(v, CONV); }   \
    }

std::size_t to_size_fn(std::string_view v) { return to_size(v); }
double to_double_fn(std::string_view v) { return parse_double(v); }

const std::vector<Field>& fields() {
    static const std::vector<Field> registry = {
        INGARCH_FIELD("truth", "a", truth.a, parse_double),
        INGARCH_FIELD("truth", "b", truth.b, parse_double),
        INGARCH_FIELD("truth", "c", truth.c, parse_double),
        INGARCH_FIELD("truth", "d", truth.d, parse_double),
        INGARCH_FIELD("truth", "nu", truth.nu, parse_double),
        INGARCH_FIELD("truth", "M", truth.M, parse_double),
        Field{"truth", "ycap", [](const ExperimentSpec& s) { return std::to_string(s.truth.ycap); },
              [](ExperimentSpec& s, std::string_view v) {
                  const auto cap = to_size(v);
                  if (cap > std::numeric_limits<Count>::max()) throw std::invalid_argument("too large");
                  s.truth.ycap = static_cast<Count>(cap);
              }},
        INGARCH_FIELD("simulation", "n", simulation.n, to_size),
        INGARCH_FIELD("simulation", "burn_in", simulation.burn_in, to_size),
        INGARCH_OPT_FIELD("simulation", "lambda0", simulation.lambda0, double, to_double_fn),
        Field{"simulation", "seed", [](const ExperimentSpec& s) { return std::to_string(s.simulation.seed); },
              [](ExperimentSpec& s, std::string_view v) { s.simulation.seed = to_u64(v); }},
        INGARCH_FIELD("sieve", "M", sieve.M, parse_double),
        INGARCH_OPT_FIELD("sieve", "delta", sieve.delta, double, to_double_fn),
        INGARCH_FIELD("sieve", "kappa", sieve.kappa, parse_double),
        INGARCH_OPT_FIELD("sieve", "grid_points", sieve.grid_points, std::size_t, to_size_fn),
        INGARCH_FIELD("sieve", "strict", sieve.strict, to_bool),
        INGARCH_FIELD("sieve", "L1", sieve.L1, parse_double),
        INGARCH_FIELD("sieve", "L2", sieve.L2, parse_double),
        INGARCH_FIELD("ga", "population", ga.population, to_size),
        INGARCH_FIELD("ga", "generations", ga.generations, to_size),
        INGARCH_FIELD("ga", "tournament_size", ga.tournament_size, to_size),
        INGARCH_FIELD("ga", "crossover_rate", ga.crossover_rate, parse_double),
        INGARCH_OPT_FIELD("ga", "mutation_rate", ga.mutation_rate, double, to_double_fn),
        INGARCH_FIELD("ga", "elitism", ga.elitism, to_size),
        INGARCH_OPT_FIELD("ga", "penalty_weight", ga.penalty_weight, double, to_double_fn),
        Field{"ga", "seed", [](const ExperimentSpec& s) { return std::to_string(s.ga.seed); },
              [](ExperimentSpec& s, std::string_view v) { s.ga.seed = to_u64(v); }},
        Field{"ga", "constraint_mode",
              [](const ExperimentSpec& s) { return std::string(to_string(s.ga.constraint_mode)); },
              [](ExperimentSpec& s, std::string_view v) { s.ga.constraint_mode = parse_constraint_mode(trim(v)); }},
        INGARCH_FIELD("ga", "memoize", ga.memoize, to_bool),
        INGARCH_FIELD("eval", "n_eval", eval.n_eval, to_size),
        INGARCH_FIELD("eval", "burn_in", eval.burn_in, to_size),
        INGARCH_FIELD("eval", "seeds", eval.seeds, to_size),
        Field{"eval", "seed", [](const ExperimentSpec& s) { return std::to_string(s.eval.seed); },
              [](ExperimentSpec& s, std::string_view v) { s.eval.seed = to_u64(v); }},
    };
    return registry;
}

#undef INGARCH_FIELD
#undef INGARCH_OPT_FIELD

double quantile(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

}  // namespace

ExperimentSpec ExperimentSpec::rate_probe() {
    ExperimentSpec spec;
    spec.sieve.grid_points.reset();
    spec.eval.seeds = 5;
    return spec;
}

ExperimentSpec ExperimentSpec::resolved(std::size_t n, std::optional<Count> ycap) const {
    ExperimentSpec out = *this;
    const auto sieve = sieve_for(*this, n);
    out.simulation.lambda0 = simulation.lambda0.value_or(0.5 * truth.M);
    out.sieve.delta = sieve.delta;
    out.sieve.grid_points = sieve.grid_points();
    if (ycap) {
        out.ga.mutation_rate = ga.effective_mutation_rate(sieve.basis_count() * (static_cast<std::size_t>(*ycap) + 1));
    }
    out.ga.penalty_weight = ga.effective_penalty_weight(sieve.M);
    return out;
}

void ExperimentSpec::validate() const {
    truth.validate();
    bounds_for(*this).validate();
    ga.validate();
    if (simulation.n < 1) throw ConfigError("simulation.n must be at least 1");
    if (simulation.lambda0 && !(*simulation.lambda0 >= 0.0 && *simulation.lambda0 <= truth.M)) {
        throw ConfigError("simulation.lambda0 must lie in [0, truth.M]");
    }
    if (sieve.M != truth.M) throw ConfigError("sieve.M must equal truth.M");
    if (sieve.delta && !(*sieve.delta > 0.0)) throw ConfigError("sieve.delta must be positive");
    if (sieve.grid_points && *sieve.grid_points < 2) throw ConfigError("sieve.grid_points must be at least 2");
    if (eval.seeds < 1) throw ConfigError("eval.seeds must be at least 1");
}

ExperimentSpec parse_spec(std::istream& in) {
    ExperimentSpec spec;
    std::string section;
    std::set<std::string> sections;
    for (const auto& f : fields()) sections.insert(f.section);

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto text = line.substr(0, line.find('#'));
        const auto body = trim(text);
        if (body.empty()) continue;
        const std::string where = "config line " + std::to_string(lineno) + ": ";
        if (body.front() == '[') {
            if (body.back() != ']') throw ConfigError(where + "unterminated section header");
            section = std::string(trim(body.substr(1, body.size() - 2)));
            if (!sections.contains(section)) throw ConfigError(where + "unknown section [" + section + "]");
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where + "expected key = value");
        if (section.empty()) throw ConfigError(where + "key outside of any section");
        const std::string key(trim(body.substr(0, eq)));
        const auto value = trim(body.substr(eq + 1));
        const auto it = std::find_if(fields().begin(), fields().end(), [&](const Field& f) {
            return section == f.section && key == f.key;
        });
        if (it == fields().end()) throw ConfigError(where + "unknown field " + section + "." + key);
        try {
            it->set(spec, value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(where + section + "." + key + ": " + e.what());
        }
    }
    return spec;
}

void write_spec(const ExperimentSpec& spec, std::ostream& out) {
    std::string section;
    for (const auto& f : fields()) {
        if (section != f.section) {
            if (!section.empty()) out << '\n';
            section = f.section;
            out << '[' << section << "]\n";
        }
        out << f.key << " = " << f.get(spec) << '\n';
    }
}

SieveConfig sieve_for(const ExperimentSpec& spec, std::size_t n) {
    const auto& s = spec.sieve;
    std::size_t l = 0;
    if (s.delta) {
        const double ratio = s.M / *s.delta;
        l = static_cast<std::size_t>(std::llround(ratio));
        if (l < 1 || std::abs(ratio - static_cast<double>(l)) > 1e-9 * ratio) {
            throw ConfigError("sieve.delta must divide M into a whole number of intervals");
        }
    } else {
        l = build_sieve_config(s.M, std::max<std::size_t>(n, 2), 2, 0, s.kappa).l;
    }
    const std::size_t grid = s.grid_points.value_or(2 * l + 1);
    return SieveConfig::make(s.M, l, grid, 0);
}

ContractionBounds bounds_for(const ExperimentSpec& spec) {
    ContractionBounds b;
    b.M = spec.sieve.M;
    b.L1 = spec.sieve.L1;
    b.L2 = spec.sieve.L2;
    b.strict = spec.sieve.strict;
    return b;
}

ProcessPath simulate_data(const ExperimentSpec& spec) {
    const double lambda0 = spec.simulation.lambda0.value_or(0.5 * spec.truth.M);
    return simulate(spec.truth, spec.simulation.n, spec.simulation.burn_in, lambda0,
                    spec.simulation.seed, 0);
}

EstimationResult estimate_link(const ExperimentSpec& spec, std::span<const Count> counts, std::size_t run) {
    if (counts.size() < 2) throw ArityError("estimate: need at least 2 observations");
    const auto sieve = cap_at_max_count(sieve_for(spec, counts.size() - 1), counts);
    GAConfig ga = spec.ga;
    ga.seed = derive_seed(spec.ga.seed, run);
    return ga_minimize(sieve, counts, bounds_for(spec), ga);
}

LossEstimate evaluate_estimate(const ExperimentSpec& spec, const SplineLink& estimate) {
    return l2_loss_mc(estimate, spec.truth, spec.eval.n_eval, spec.eval.burn_in, spec.eval.seed);
}

Reproduction reproduce(const ExperimentSpec& spec) {
    Reproduction out{simulate_data(spec), {}};
    for (std::size_t r = 0; r < spec.eval.seeds; ++r) {
        auto est = estimate_link(spec, out.path.counts, r);
        auto loss = evaluate_estimate(spec, est.best);
        out.runs.push_back(ReproductionRun{std::move(est), loss});
    }
    return out;
}

void write_surface_csv(const ParametricLink& truth, const SplineLink& estimate, std::size_t lambda_points,
                       std::ostream& out) {
    out << "lambda,y,m_true,m_hat\n";
    const double M = estimate.bound();
    const std::size_t steps = std::max<std::size_t>(lambda_points, 2) - 1;
    for (Count y = 0; y <= estimate.config().ycap; ++y) {
        for (std::size_t i = 0; i <= steps; ++i) {
            const double lambda = M * static_cast<double>(i) / static_cast<double>(steps);
            out << format_double(lambda) << ',' << y << ',' << format_double(truth(lambda, y)) << ','
                << format_double(estimate(lambda, y)) << '\n';
        }
    }
}

ExperimentSpec replicate_spec(const ExperimentSpec& base, std::size_t n, std::size_t replicate) {
    ExperimentSpec spec = base;
    spec.simulation.n = n;
    spec.simulation.seed = derive_seed(derive_seed(base.simulation.seed, n), replicate);
    spec.ga.seed = derive_seed(derive_seed(base.ga.seed, n), replicate);
    spec.eval.seed = derive_seed(derive_seed(base.eval.seed, n), replicate);
    return spec;
}

RateTable rate_experiment(std::span<const std::size_t> n_values, std::size_t seeds_per_n,
                          const ExperimentSpec& base) {
    RateTable table;
    for (const std::size_t n : n_values) {
        RateRow row;
        row.n = n;
        for (std::size_t r = 0; r < seeds_per_n; ++r) {
            const auto spec = replicate_spec(base, n, r);
            const auto path = simulate_data(spec);
            const auto est = estimate_link(spec, path.counts, 0);
            row.losses.push_back(evaluate_estimate(spec, est.best).loss);
        }
        row.seeds_used = row.losses.size();
        if (!row.losses.empty()) {
            row.median_loss = quantile(row.losses, 0.5);
            row.iqr_low = quantile(row.losses, 0.25);
            row.iqr_high = quantile(row.losses, 0.75);
        }
        table.rows.push_back(std::move(row));
    }
    std::stable_sort(table.rows.begin(), table.rows.end(),
                     [](const RateRow& a, const RateRow& b) { return a.n < b.n; });

    // Ordinary least squares of log(median) on log(n).
    const double nan = std::numeric_limits<double>::quiet_NaN();
    table.fitted_slope = nan;
    table.slope_ci = {nan, nan};
    const std::size_t k = table.rows.size();
    if (k < 2) return table;
    double mx = 0.0, my = 0.0;
    for (const auto& row : table.rows) {
        mx += std::log(static_cast<double>(row.n));
        my += std::log(row.median_loss);
    }
    mx /= static_cast<double>(k);
    my /= static_cast<double>(k);
    double sxx = 0.0, sxy = 0.0;
    for (const auto& row : table.rows) {
        const double dx = std::log(static_cast<double>(row.n)) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(row.median_loss) - my);
    }
    if (!(sxx > 0.0)) return table;
    table.fitted_slope = sxy / sxx;
    if (k < 3) return table;
    const double intercept = my - table.fitted_slope * mx;
    double rss = 0.0;
    for (const auto& row : table.rows) {
        const double r = std::log(row.median_loss) - intercept - table.fitted_slope * std::log(static_cast<double>(row.n));
        rss += r * r;
    }
    const auto dof = static_cast<double>(k - 2);
    const double se = std::sqrt(rss / dof / sxx);
    const double t = boost::math::quantile(boost::math::students_t(dof), 0.975);
    table.slope_ci = {table.fitted_slope - t * se, table.fitted_slope + t * se};
    return table;
}

void write_rate_csv(const RateTable& table, std::ostream& out) {
    out << "n,median_loss,iqr_low,iqr_high,seeds\n";
    for (const auto& row : table.rows) {
        out << row.n << ',' << format_double(row.median_loss) << ',' << format_double(row.iqr_low) << ','
            << format_double(row.iqr_high) << ',' << row.seeds_used << '\n';
    }
}

}  // namespace ingarch
