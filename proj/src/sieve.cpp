#include "ingarch/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ingarch/errors.hpp"

namespace ingarch {

SieveConfig SieveConfig::make(double M, std::size_t l, std::size_t grid_points, Count ycap) {
    if (!(M > 0.0) || !std::isfinite(M)) throw ConfigError("sieve: M must be positive");
    if (l < 1) throw ConfigError("sieve: need at least one knot interval");
    if (grid_points < 2) throw ConfigError("sieve: grid needs at least 2 points");

    SieveConfig cfg;
    cfg.M = M;
    cfg.l = l;
    cfg.delta = M / static_cast<double>(l);
    cfg.ycap = ycap;
    const auto ld = static_cast<double>(l);
    for (int j = -2; j <= static_cast<int>(l) + 2; ++j) {
        cfg.knots.push_back(M * static_cast<double>(j) / ld);
    }
    const auto kd = static_cast<double>(grid_points - 1);
    for (std::size_t k = 0; k < grid_points; ++k) {
        cfg.grid.push_back(M * static_cast<double>(k) / kd);
    }
    return cfg;
}

SieveConfig SieveConfig::with_ycap(Count cap) const {
    SieveConfig cfg = *this;
    cfg.ycap = cap;
    return cfg;
}

void SieveConfig::validate() const {
    if (!(M > 0.0)) throw ConfigError("sieve: M must be positive");
    if (l < 1) throw ConfigError("sieve: need at least one knot interval");
    if (knots.size() != l + 5) throw ConfigError("sieve: knot vector has wrong length");
    if (grid.size() < 2) throw ConfigError("sieve: grid needs at least 2 points");
    if (grid.front() != 0.0 || grid.back() != M) throw ConfigError("sieve: grid must span [0, M]");
    if (knot(0) != 0.0 || knot(static_cast<int>(l)) != M) {
        throw ConfigError("sieve: knots must hit 0 and M exactly");
    }
}

SieveConfig build_sieve_config(double M, std::size_t n, std::size_t grid_points, Count ycap,
                               double kappa) {
    if (!(M > 0.0)) throw ConfigError("sieve: M must be positive");
    if (n < 2) throw ConfigError("sieve: sample size must be at least 2");
    if (grid_points < 2) throw ConfigError("sieve: grid needs at least 2 points");
    if (!(kappa > 0.0)) throw ConfigError("sieve: kappa must be positive");
    const double target = M * std::cbrt(static_cast<double>(n)) / kappa;
    const auto l = static_cast<std::size_t>(std::max(1.0, std::round(target)));
    return SieveConfig::make(M, l, grid_points, ycap);
}

double cox_de_boor(std::span<const double> knots, std::size_t i, int degree, double x) {
    if (degree < 0 || i + static_cast<std::size_t>(degree) + 1 >= knots.size()) {
        throw std::out_of_range("cox_de_boor: basis index exceeds knot vector");
    }
    if (degree == 0) return (knots[i] <= x && x < knots[i + 1]) ? 1.0 : 0.0;
    double value = 0.0;
    const double left_span = knots[i + degree] - knots[i];
    if (left_span > 0.0) {
        value += (x - knots[i]) / left_span * cox_de_boor(knots, i, degree - 1, x);
    }
    const double right_span = knots[i + degree + 1] - knots[i + 1];
    if (right_span > 0.0) {
        value += (knots[i + degree + 1] - x) / right_span * cox_de_boor(knots, i + 1, degree - 1, x);
    }
    return value;
}

double bspline_basis(const SieveConfig& config, int p, double lambda) {
    if (p < -2 || p > static_cast<int>(config.l) - 1) {
        throw std::out_of_range("bspline_basis: index " + std::to_string(p) + " outside [-2, l-1]");
    }
    if (!(lambda >= 0.0 && lambda <= config.M)) {
        throw std::domain_error("bspline_basis: lambda outside [0, M]");
    }
    return cox_de_boor(config.knots, static_cast<std::size_t>(p + 2), 2, lambda);
}

}  // namespace ingarch
