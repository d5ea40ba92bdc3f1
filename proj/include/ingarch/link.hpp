#pragma once

#include <concepts>
#include <cstdint>

namespace ingarch {

using Count = std::uint32_t;

/// A link maps (intensity, last count) to the next intensity in [0, bound()].
template <typename L>
concept LinkFunction = requires(const L& link, double lambda, Count y) {
    { link(lambda, y) } -> std::convertible_to<double>;
    { link.bound() } -> std::convertible_to<double>;
};

/// Constants of the contractive class: |g(l1,y1) - g(l2,y2)| <= L1|l1-l2| + L2|y1-y2|.
struct ContractionBounds {
    double M = 2.0;
    double L1 = 0.62;
    double L2 = 0.50;
    bool strict = false;  ///< enforce L1 + L2 < 1

    ContractionBounds() = default;
    ContractionBounds(double M, double L1, double L2, bool strict = false);

    void validate() const;
};

/// m(l, y) = (a + b l + c (y^ycap) + d [sin(2 pi l / nu) + cos(2 pi (y^ycap) / nu)]) clamped to [0, M].
struct ParametricLink {
    double a = 0.3;
    double b = 0.3;
    double c = 0.3;
    double d = -0.1;
    double nu = 2.0;
    double M = 2.0;
    Count ycap = 5;

    /// Throws std::domain_error when lambda is outside [0, M].
    double operator()(double lambda, Count y) const;
    double bound() const noexcept { return M; }

    void validate() const;
    bool operator==(const ParametricLink&) const = default;
};

/// g(l, y) = value for all arguments.
struct ConstantLink {
    double value = 0.0;
    double M = 2.0;

    double operator()(double, Count) const noexcept { return value; }
    double bound() const noexcept { return M; }
};

}  // namespace ingarch
