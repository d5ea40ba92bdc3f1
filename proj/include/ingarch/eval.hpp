#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ingarch/errors.hpp"
#include "ingarch/link.hpp"
#include "ingarch/process.hpp"

namespace ingarch {

/// Stream index of loss-evaluation paths, distinct from data paths (stream 0)
/// so equal seeds never reuse the estimation sample.
inline constexpr std::uint64_t kEvalStream = 1;

/// Number of non-overlapping batches in the batch-means standard error.
inline constexpr std::size_t kLossBatches = 32;

struct LossEstimate {
    double loss = 0.0;
    std::size_t n_eval = 0;
    double std_error = 0.0;
    std::uint64_t seed = 0;
};

/// Mean and batch-means standard error of a (dependent) series.
LossEstimate summarize_squared_errors(std::span<const double> squared, std::uint64_t seed);

/// Mean squared difference of two links over the (lambda_t, Y_t) pairs of a path.
template <LinkFunction E, LinkFunction T>
LossEstimate l2_loss_on_path(const E& estimate, const T& truth, const ProcessPath& path) {
    std::vector<double> squared(path.size());
    for (std::size_t t = 0; t < path.size(); ++t) {
        const double lambda = path.intensities[t];
        const Count y = path.counts[t];
        const double diff = estimate(lambda, y) - truth(lambda, y);
        squared[t] = diff * diff;
    }
    return summarize_squared_errors(squared, path.seed);
}

/// L2(pi) distance between two links, estimated over the stationary pairs of a
/// fresh path simulated from `truth` (burn-in discarded, start at M / 2).
/// The standard error uses batch means, which accounts for serial dependence.
template <LinkFunction E, LinkFunction T>
LossEstimate l2_loss_mc(const E& estimate, const T& truth, std::size_t n_eval, std::size_t burn_in,
                        std::uint64_t seed) {
    const auto path = simulate(truth, n_eval, burn_in, 0.5 * truth.bound(), seed, kEvalStream);
    return l2_loss_on_path(estimate, truth, path);
}

/// Biased sample autocorrelations of the counts at lags 1 ... max_lag.
/// Throws ArityError when the path is shorter than 10 * max_lag and
/// std::domain_error when the counts have zero variance.
std::vector<double> acf_diagnostic(const ProcessPath& path, std::size_t max_lag);

/// `loss,std_error,n_eval,seed`
void write_loss_csv(std::span<const LossEstimate> losses, std::ostream& out);

}  // namespace ingarch
