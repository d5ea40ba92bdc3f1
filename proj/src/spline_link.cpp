#include "ingarch/spline_link.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

#include "ingarch/errors.hpp"
#include "ingarch/format.hpp"

namespace ingarch {

SplineLink::SplineLink(SieveConfig config, std::vector<double> coeffs)
    : config_(std::move(config)), coeffs_(std::move(coeffs)), inv_delta_(1.0 / config_.delta) {
    config_.validate();
    if (coeffs_.size() != config_.basis_count() * config_.levels()) {
        throw ConfigError("spline link: expected " +
                          std::to_string(config_.basis_count() * config_.levels()) +
                          " coefficients, got " + std::to_string(coeffs_.size()));
    }
}

SplineLink SplineLink::constant(SieveConfig config, double value) {
    const std::size_t size = config.basis_count() * config.levels();
    return SplineLink(std::move(config), std::vector<double>(size, value));
}

double SplineLink::operator()(double lambda, Count y) const {
    if (!(lambda >= 0.0 && lambda <= config_.M)) {
        throw std::domain_error("spline link: lambda " + std::to_string(lambda) + " outside [0, M]");
    }
    return eval_unchecked(lambda, y);
}

double SplineLink::eval_unchecked(double lambda, Count y) const noexcept {
    const std::size_t last = config_.l - 1;
    const double scaled = lambda * inv_delta_;
    auto j = static_cast<std::size_t>(scaled);
    if (j > last) j = last;
    const double u = std::clamp(scaled - static_cast<double>(j), 0.0, 1.0);

    // Basis indices j-2, j-1, j sit at offsets j, j+1, j+2 of the level row.
    const double* row = coeffs_.data() + std::min(y, config_.ycap) * config_.basis_count() + j;
    const double w = 1.0 - u;
    const double value = 0.5 * w * w * row[0] + (0.5 + u * w) * row[1] + 0.5 * u * u * row[2];
    // Convex combination; the clamp only removes rounding overshoot.
    const double lo = std::min({row[0], row[1], row[2]});
    const double hi = std::max({row[0], row[1], row[2]});
    return std::clamp(value, lo, hi);
}

double SplineLink::coeff(int p, Count y) const {
    if (p < -2 || p > static_cast<int>(config_.l) - 1 || y > config_.ycap) {
        throw std::out_of_range("spline link: coefficient index out of range");
    }
    return coeffs_[y * config_.basis_count() + static_cast<std::size_t>(p + 2)];
}

std::span<const double> SplineLink::level(Count y) const {
    const std::size_t row = std::min(y, config_.ycap);
    return std::span<const double>(coeffs_).subspan(row * config_.basis_count(), config_.basis_count());
}

double ConstraintReport::slope_excess(double L1) const noexcept {
    return max_lambda_slope > L1 + kConstraintTolerance ? max_lambda_slope - L1 : 0.0;
}

double ConstraintReport::gap_excess(double L2) const noexcept {
    return max_level_gap > L2 + kConstraintTolerance ? max_level_gap - L2 : 0.0;
}

ConstraintReport check_contractive(const SplineLink& spline, const ContractionBounds& bounds) {
    const auto& cfg = spline.config();
    const std::size_t width = cfg.basis_count();
    const double slope_limit = bounds.L1 + kConstraintTolerance;
    const double gap_limit = bounds.L2 + kConstraintTolerance;

    ConstraintReport report;
    std::vector<bool> flagged(width * cfg.levels(), false);
    auto flag = [&](std::size_t idx) {
        if (!flagged[idx]) {
            flagged[idx] = true;
            report.offending.emplace_back(static_cast<int>(idx % width) - 2,
                                          static_cast<Count>(idx / width));
        }
    };

    for (Count y = 0; y <= cfg.ycap; ++y) {
        const auto row = spline.level(y);
        const std::size_t base = y * width;
        for (std::size_t i = 0; i < width; ++i) {
            if (!(row[i] >= -kConstraintTolerance && row[i] <= bounds.M + kConstraintTolerance)) {
                report.range_ok = false;
                flag(base + i);
            }
            if (i > 0) {
                const double slope = std::abs(row[i] - row[i - 1]) / cfg.delta;
                report.max_lambda_slope = std::max(report.max_lambda_slope, slope);
                if (slope > slope_limit) flag(base + i);
            }
            if (y > 0) {
                const double gap = std::abs(row[i] - spline.level(y - 1)[i]);
                report.max_level_gap = std::max(report.max_level_gap, gap);
                if (gap > gap_limit) flag(base + i);
            }
        }
    }
    report.passes = report.range_ok && report.max_lambda_slope <= slope_limit &&
                    report.max_level_gap <= gap_limit;
    std::sort(report.offending.begin(), report.offending.end(),
              [](const auto& a, const auto& b) { return std::pair(a.second, a.first) < std::pair(b.second, b.first); });
    return report;
}

void write_spline_csv(const SplineLink& spline, std::ostream& out) {
    const auto& cfg = spline.config();
    out << "p,y,alpha\n";
    for (Count y = 0; y <= cfg.ycap; ++y) {
        for (int p = -2; p <= static_cast<int>(cfg.l) - 1; ++p) {
            out << p << ',' << y << ',' << format_double(spline.coeff(p, y)) << '\n';
        }
    }
}

void write_sieve_meta(const SieveConfig& config, std::ostream& out) {
    out << "M=" << format_double(config.M) << '\n'
        << "delta=" << format_double(config.delta) << '\n'
        << "l=" << config.l << '\n'
        << "ycap=" << config.ycap << '\n'
        << "grid_points=" << config.grid_points() << '\n';
}

SieveConfig read_sieve_meta(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) {
            throw std::invalid_argument("sieve meta line " + std::to_string(lineno) + ": expected key=value");
        }
        kv[std::string(trim(text.substr(0, eq)))] = std::string(trim(text.substr(eq + 1)));
    }
    auto need = [&](const char* key) -> const std::string& {
        const auto it = kv.find(key);
        if (it == kv.end()) throw std::invalid_argument(std::string("sieve meta: missing key '") + key + "'");
        return it->second;
    };
    const double M = parse_double(need("M"));
    const long long l = parse_int(need("l"));
    const long long ycap = parse_int(need("ycap"));
    const long long grid_points = parse_int(need("grid_points"));
    if (l < 1 || ycap < 0 || grid_points < 2) throw std::invalid_argument("sieve meta: invalid sizes");
    auto cfg = SieveConfig::make(M, static_cast<std::size_t>(l), static_cast<std::size_t>(grid_points),
                                 static_cast<Count>(ycap));
    if (kv.contains("delta") && parse_double(kv["delta"]) != cfg.delta) {
        throw std::invalid_argument("sieve meta: delta inconsistent with M / l");
    }
    return cfg;
}

SplineLink read_spline(std::istream& csv, const SieveConfig& config) {
    std::string line;
    if (!std::getline(csv, line) || trim(line) != "p,y,alpha") {
        throw std::invalid_argument("spline csv: expected header 'p,y,alpha'");
    }
    const std::size_t width = config.basis_count();
    std::vector<double> coeffs(width * config.levels(), 0.0);
    std::vector<bool> seen(coeffs.size(), false);
    std::size_t lineno = 1;
    while (std::getline(csv, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != 3) {
            throw std::invalid_argument("spline csv line " + std::to_string(lineno) + ": expected 3 fields");
        }
        const long long p = parse_int(fields[0]);
        const long long y = parse_int(fields[1]);
        if (p < -2 || p >= static_cast<long long>(config.l) || y < 0 || y > config.ycap) {
            throw std::invalid_argument("spline csv line " + std::to_string(lineno) + ": index out of range");
        }
        const auto idx = static_cast<std::size_t>(y) * width + static_cast<std::size_t>(p + 2);
        coeffs[idx] = parse_double(fields[2]);
        seen[idx] = true;
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
        throw std::invalid_argument("spline csv: missing coefficients");
    }
    return SplineLink(config, std::move(coeffs));
}

}  // namespace ingarch
