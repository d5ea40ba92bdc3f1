#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ingarch/errors.hpp"
#include "ingarch/link.hpp"

namespace ingarch {

/// Empirical least-squares contrast of one candidate link.
struct ContrastValue {
    double phi = 0.0;
    std::size_t n = 0;  ///< number of squared terms
    /// fitted[i] is the prediction for counts[i + 1], i.e. g^[i](0, Y_0..Y_i).
    std::vector<double> fitted;
};

/// Left fold lambda <- link(lambda, y_i) over y_seq starting at lambda0; for a
/// sequence of length t + 1 this is the t-times iterated link g^[t].
template <LinkFunction L>
double iterate_link(const L& link, double lambda0, std::span<const Count> y_seq) {
    double lambda = lambda0;
    for (const Count y : y_seq) lambda = link(lambda, y);
    return lambda;
}

/// Phi_n(g) = (1/n) sum_{i<n} (Y_{i+1} - g^[i](0, Y_0..Y_i))^2 over counts Y_0..Y_n.
///
/// One pass: the prediction for Y_{i+1} folds the previous prediction with Y_i,
/// seeded at intensity 0. Exactly n link evaluations.
template <LinkFunction L>
ContrastValue contrast_phi(const L& link, std::span<const Count> counts, bool keep_fitted = false) {
    if (counts.size() < 2) throw ArityError("contrast_phi: need at least 2 observations");
    const std::size_t n = counts.size() - 1;
    ContrastValue out;
    out.n = n;
    if (keep_fitted) out.fitted.reserve(n);
    double lambda = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        lambda = link(lambda, counts[i]);
        if (keep_fitted) out.fitted.push_back(lambda);
        const double r = static_cast<double>(counts[i + 1]) - lambda;
        sum += r * r;
    }
    out.phi = sum / static_cast<double>(n);
    return out;
}

}  // namespace ingarch
