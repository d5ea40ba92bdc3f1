#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ingarch/errors.hpp"
#include "ingarch/link.hpp"
#include "ingarch/rng.hpp"

namespace ingarch {

/// Draw from Poisson(lambda) by inversion with sequential search from 0.
///
/// One uniform is consumed per draw when lambda <= 30 (none when lambda == 0).
/// Larger intensities are split into chunks of at most 30 and the chunk draws
/// summed, which keeps exp(-lambda) away from underflow.
/// Throws std::domain_error for negative or non-finite lambda.
Count poisson_sample(double lambda, Rng& rng);

/// Trajectory of (lambda_t, Y_t) after burn-in.
struct ProcessPath {
    std::vector<double> intensities;
    std::vector<Count> counts;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::size_t burn_in = 0;
    double lambda0 = 0.0;

    std::size_t size() const noexcept { return counts.size(); }
};

/// Runs Y_t ~ Poisson(lambda_t), lambda_{t+1} = link(lambda_t, Y_t) for burn_in + n
/// steps from lambda0 and keeps the last n pairs. The random stream is
/// derived from (seed, stream), so distinct paths can be generated in any order.
template <LinkFunction L>
ProcessPath simulate(const L& link, std::size_t n, std::size_t burn_in, double lambda0,
                     std::uint64_t seed, std::uint64_t stream = 0) {
    const double bound = link.bound();
    if (n < 1) throw ArityError("simulate: n must be at least 1");
    if (!(lambda0 >= 0.0 && lambda0 <= bound)) {
        throw std::domain_error("simulate: lambda0 outside [0, M]");
    }
    ProcessPath path;
    path.seed = seed;
    path.stream = stream;
    path.burn_in = burn_in;
    path.lambda0 = lambda0;
    path.intensities.reserve(n);
    path.counts.reserve(n);

    Rng rng(seed, stream);
    double lambda = lambda0;
    const std::size_t total = burn_in + n;
    for (std::size_t t = 0; t < total; ++t) {
        const Count y = poisson_sample(lambda, rng);
        if (t >= burn_in) {
            path.intensities.push_back(lambda);
            path.counts.push_back(y);
        }
        const double next = link(lambda, y);
        if (!(next >= 0.0 && next <= bound)) {
            throw InvariantViolation("simulate: link value " + std::to_string(next) +
                                     " escaped [0, M] at step " + std::to_string(t));
        }
        lambda = next;
    }
    return path;
}

/// CSV with header `t,lambda,y`; doubles in shortest round-trip form.
void write_path_csv(const ProcessPath& path, std::ostream& out);
ProcessPath read_path_csv(std::istream& in);

}  // namespace ingarch
