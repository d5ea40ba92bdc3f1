#include "ingarch/eval.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "ingarch/format.hpp"

namespace ingarch {

LossEstimate summarize_squared_errors(std::span<const double> squared, std::uint64_t seed) {
    LossEstimate out;
    out.seed = seed;
    out.n_eval = squared.size();
    if (squared.empty()) return out;
    const auto n = static_cast<double>(squared.size());
    out.loss = std::accumulate(squared.begin(), squared.end(), 0.0) / n;

    const std::size_t batches = std::min(kLossBatches, squared.size());
    if (batches < 2) return out;
    const std::size_t size = squared.size() / batches;
    double ss = 0.0;
    double grand = 0.0;
    std::vector<double> means(batches);
    for (std::size_t b = 0; b < batches; ++b) {
        const auto first = squared.begin() + static_cast<std::ptrdiff_t>(b * size);
        means[b] = std::accumulate(first, first + static_cast<std::ptrdiff_t>(size), 0.0) /
                   static_cast<double>(size);
        grand += means[b];
    }
    grand /= static_cast<double>(batches);
    for (const double m : means) ss += (m - grand) * (m - grand);
    const double var_of_batch_mean = ss / static_cast<double>(batches - 1);
    out.std_error = std::sqrt(var_of_batch_mean / static_cast<double>(batches));
    return out;
}

std::vector<double> acf_diagnostic(const ProcessPath& path, std::size_t max_lag) {
    if (max_lag == 0) return {};
    if (path.size() < 10 * max_lag) {
        throw ArityError("acf_diagnostic: path must be at least 10 * max_lag long");
    }
    const auto n = static_cast<double>(path.size());
    double mean = 0.0;
    for (const Count y : path.counts) mean += static_cast<double>(y);
    mean /= n;
    std::vector<double> centered(path.size());
    for (std::size_t t = 0; t < path.size(); ++t) centered[t] = static_cast<double>(path.counts[t]) - mean;
    const double denom = std::inner_product(centered.begin(), centered.end(), centered.begin(), 0.0);
    if (!(denom > 0.0)) throw std::domain_error("acf_diagnostic: counts have zero variance");

    std::vector<double> acf(max_lag);
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double num = 0.0;
        for (std::size_t t = 0; t + k < centered.size(); ++t) num += centered[t] * centered[t + k];
        acf[k - 1] = num / denom;
    }
    return acf;
}

void write_loss_csv(std::span<const LossEstimate> losses, std::ostream& out) {
    out << "loss,std_error,n_eval,seed\n";
    for (const auto& l : losses) {
        out << format_double(l.loss) << ',' << format_double(l.std_error) << ',' << l.n_eval << ','
            << l.seed << '\n';
    }
}

}  // namespace ingarch
