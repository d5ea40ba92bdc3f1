#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "ingarch/link.hpp"
#include "ingarch/sieve.hpp"

namespace ingarch {

/// s(lambda, y) = sum_p alpha_p(min(y, ycap)) N_{p,2}(lambda).
///
/// Coefficients are stored level-major: coeffs[y * (l + 2) + (p + 2)].
class SplineLink {
public:
    SplineLink(SieveConfig config, std::vector<double> coeffs);

    /// All coefficients equal to `value`.
    static SplineLink constant(SieveConfig config, double value);

    /// O(1) evaluation through the closed-form uniform quadratic pieces.
    /// Throws std::domain_error for lambda outside [0, M].
    double operator()(double lambda, Count y) const;
    double bound() const noexcept { return config_.M; }

    /// Evaluation without the domain check; lambda must lie in [0, M].
    double eval_unchecked(double lambda, Count y) const noexcept;

    double coeff(int p, Count y) const;
    std::span<const double> level(Count y) const;
    std::span<const double> coeffs() const noexcept { return coeffs_; }
    const SieveConfig& config() const noexcept { return config_; }

private:
    SieveConfig config_;
    std::vector<double> coeffs_;
    double inv_delta_;
};

struct ConstraintReport {
    bool passes = false;
    bool range_ok = true;
    double max_lambda_slope = 0.0;  ///< exact sup of |ds/dlambda| over all levels
    double max_level_gap = 0.0;     ///< max_p |alpha_p(y+1) - alpha_p(y)| over adjacent levels
    std::vector<std::pair<int, Count>> offending;  ///< (p, y) of every violated coefficient

    /// Amount by which a bound is exceeded; zero whenever the test passes.
    double slope_excess(double L1) const noexcept;
    double gap_excess(double L2) const noexcept;
};

/// Absolute slack absorbing rounding in the coefficient comparisons.
inline constexpr double kConstraintTolerance = 1e-12;

/// Certifies membership in the contractive candidate set at coefficient level.
///
/// The lambda-derivative of an equidistant quadratic spline is the linear spline
/// with coefficients (alpha_p - alpha_{p-1}) / delta; its hat functions peak at
/// the knots xi_0 ... xi_l inside [0, M], so the sup equals the largest coefficient
/// and the slope test is exact. The level test is sufficient only: partition of
/// unity bounds the sup-norm gap between adjacent levels by the largest coefficient
/// gap. Range requires every coefficient in [0, M].
ConstraintReport check_contractive(const SplineLink& spline, const ContractionBounds& bounds);

/// `p,y,alpha` rows, level-major.
void write_spline_csv(const SplineLink& spline, std::ostream& out);

/// key=value sidecar: M, delta, l, ycap, grid_points.
void write_sieve_meta(const SieveConfig& config, std::ostream& out);
SieveConfig read_sieve_meta(std::istream& in);

SplineLink read_spline(std::istream& csv, const SieveConfig& config);

}  // namespace ingarch
