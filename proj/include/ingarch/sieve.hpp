#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ingarch/link.hpp"

namespace ingarch {

/// Equidistant quadratic B-spline sieve on [0, M] x {0, ..., ycap}.
///
/// Knots xi_{-2} < ... < xi_0 = 0 < ... < xi_l = M < xi_{l+1} < xi_{l+2} with spacing
/// delta = M / l. Basis indices run over p = -2, ..., l-1 (l + 2 functions).
/// The coefficient grid holds grid_points equidistant values from 0 to M.
struct SieveConfig {
    double M = 2.0;
    double delta = 0.2;
    std::size_t l = 10;
    std::vector<double> knots;  ///< knots[j + 2] == xi_j, j = -2 ... l + 2
    std::vector<double> grid;   ///< ascending, grid.front() == 0, grid.back() == M
    Count ycap = 0;

    /// Builds knots and grid exactly: xi_j = M * j / l, a_k = M * k / (grid_points - 1).
    static SieveConfig make(double M, std::size_t l, std::size_t grid_points, Count ycap);

    std::size_t basis_count() const noexcept { return l + 2; }
    std::size_t levels() const noexcept { return static_cast<std::size_t>(ycap) + 1; }
    std::size_t grid_points() const noexcept { return grid.size(); }
    double grid_step() const noexcept { return M / static_cast<double>(grid.size() - 1); }
    double knot(int j) const { return knots.at(static_cast<std::size_t>(j + 2)); }

    /// Same knots and grid, different count cap.
    SieveConfig with_ycap(Count cap) const;

    void validate() const;
};

/// Default sieve for sample size n: l = max(1, round(M n^(1/3) / kappa)), delta = M / l.
/// kappa = 2 gives delta = 0.2 at M = 2, n = 1000.
SieveConfig build_sieve_config(double M, std::size_t n, std::size_t grid_points, Count ycap,
                               double kappa = 2.0);

/// Normalized B-spline N_{i,degree}(x) over an arbitrary non-decreasing knot
/// vector, by the Cox-de Boor recursion with half-open base intervals.
double cox_de_boor(std::span<const double> knots, std::size_t i, int degree, double x);

/// N_{p,2}(lambda) on the sieve knots. Throws std::out_of_range for p outside
/// {-2, ..., l-1} and std::domain_error for lambda outside [0, M].
double bspline_basis(const SieveConfig& config, int p, double lambda);

}  // namespace ingarch
