#include "ingarch/link.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ingarch/errors.hpp"

namespace ingarch {

ContractionBounds::ContractionBounds(double M, double L1, double L2, bool strict)
    : M(M), L1(L1), L2(L2), strict(strict) {
    validate();
}

void ContractionBounds::validate() const {
    if (!(M > 0.0)) throw ConfigError("contraction bounds: M must be positive");
    if (!(L1 >= 0.0) || !(L2 >= 0.0)) {
        throw ConfigError("contraction bounds: L1 and L2 must be non-negative");
    }
    if (strict && !(L1 + L2 < 1.0)) {
        throw ConfigError("contraction bounds: strict mode requires L1 + L2 < 1");
    }
}

void ParametricLink::validate() const {
    if (!(M > 0.0)) throw ConfigError("parametric link: M must be positive");
    if (!(nu != 0.0) || !std::isfinite(nu)) throw ConfigError("parametric link: nu must be finite and non-zero");
}

double ParametricLink::operator()(double lambda, Count y) const {
    if (!(lambda >= 0.0 && lambda <= M)) {
        throw std::domain_error("parametric link: lambda " + std::to_string(lambda) +
                                " outside [0, " + std::to_string(M) + "]");
    }
    const double yc = static_cast<double>(std::min(y, ycap));
    const double w = 2.0 * std::numbers::pi / nu;
    const double raw = a + b * lambda + c * yc + d * (std::sin(w * lambda) + std::cos(w * yc));
    return std::clamp(raw, 0.0, M);
}

}  // namespace ingarch
