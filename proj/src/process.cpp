#include "ingarch/process.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "ingarch/format.hpp"

namespace ingarch {

namespace {

constexpr double kChunk = 30.0;

Count poisson_inversion(double mu, Rng& rng) {
    const double u = rng.uniform();
    double p = std::exp(-mu);
    double cdf = p;
    Count k = 0;
    while (u >= cdf) {
        ++k;
        p *= mu / static_cast<double>(k);
        // Remaining mass below rounding: the search cannot make progress.
        if (p <= cdf * std::numeric_limits<double>::epsilon() && k > mu) break;
        cdf += p;
    }
    return k;
}

}  // namespace

Count poisson_sample(double lambda, Rng& rng) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::domain_error("poisson_sample: lambda must be finite and non-negative");
    }
    if (lambda == 0.0) return 0;
    Count total = 0;
    while (lambda > kChunk) {
        total += poisson_inversion(kChunk, rng);
        lambda -= kChunk;
    }
    return total + poisson_inversion(lambda, rng);
}

void write_path_csv(const ProcessPath& path, std::ostream& out) {
    out << "t,lambda,y\n";
    for (std::size_t t = 0; t < path.size(); ++t) {
        out << t << ',' << format_double(path.intensities[t]) << ',' << path.counts[t] << '\n';
    }
}

ProcessPath read_path_csv(std::istream& in) {
    ProcessPath path;
    std::string line;
    if (!std::getline(in, line) || trim(line) != "t,lambda,y") {
        throw std::invalid_argument("path csv: expected header 't,lambda,y'");
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != 3) {
            throw std::invalid_argument("path csv line " + std::to_string(lineno) +
                                        ": expected 3 fields");
        }
        try {
            if (parse_int(fields[0]) != static_cast<long long>(path.size())) {
                throw std::invalid_argument("non-consecutive t");
            }
            const long long y = parse_int(fields[2]);
            if (y < 0) throw std::invalid_argument("negative count");
            path.intensities.push_back(parse_double(fields[1]));
            path.counts.push_back(static_cast<Count>(y));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("path csv line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return path;
}

}  // namespace ingarch
