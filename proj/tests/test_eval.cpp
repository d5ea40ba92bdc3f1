#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ingarch/eval.hpp"
#include "ingarch/sieve.hpp"
#include "ingarch/spline_link.hpp"

using namespace ingarch;

namespace {

const ParametricLink kTruth{};

struct Offset {
    ParametricLink base;
    double shift;
    double operator()(double lambda, Count y) const { return base(lambda, y) + shift; }
    double bound() const { return base.M; }
};

}  // namespace

TEST_CASE("identical links have zero loss") {
    const auto loss = l2_loss_mc(kTruth, kTruth, 20000, 100, 3);
    CHECK(loss.loss == 0.0);
    CHECK(loss.std_error == 0.0);
    CHECK(loss.n_eval == 20000);
    CHECK(loss.seed == 3);
}

TEST_CASE("constant offset gives its square") {
    // Raw values stay below 1.5, so the shifted link never reaches the clamp.
    const ParametricLink low{.a = 0.2, .b = 0.3, .c = 0.1, .d = -0.1};
    const auto loss = l2_loss_mc(Offset{low, 0.1}, low, 50000, 100, 9);
    CHECK(std::abs(loss.loss - 0.01) <= 1e-12 + loss.std_error);
}

TEST_CASE("loss is non-negative and symmetric on a shared path") {
    const auto path = simulate(kTruth, 5000, 100, 1.0, 12);
    const ConstantLink flat{0.7, 2.0};
    const auto ab = l2_loss_on_path(flat, kTruth, path);
    const auto ba = l2_loss_on_path(kTruth, flat, path);
    CHECK(ab.loss == ba.loss);
    CHECK(ab.std_error == ba.std_error);
    CHECK(ab.loss > 0.0);
}

TEST_CASE("grid-snapped truth spline has a small loss") {
    const auto cfg = SieveConfig::make(2.0, 10, 11, 8);
    std::vector<double> c;
    for (Count y = 0; y <= cfg.ycap; ++y) {
        for (int p = -2; p < static_cast<int>(cfg.l); ++p) {
            const double v = kTruth(std::clamp(cfg.knot(p) + 1.5 * cfg.delta, 0.0, cfg.M), y);
            c.push_back(cfg.grid[static_cast<std::size_t>(std::lround(v / cfg.grid_step()))]);
        }
    }
    const SplineLink oracle(cfg, std::move(c));
    CHECK(l2_loss_mc(oracle, kTruth, 100000, 1000, 5).loss < 0.01);
}

TEST_CASE("standard error shrinks like one over root n") {
    const ConstantLink flat{0.7, 2.0};
    double ratio = 0.0;
    for (std::uint64_t rep = 0; rep < 50; ++rep) {
        const auto small = l2_loss_mc(flat, kTruth, 20000, 200, 1000 + rep);
        const auto large = l2_loss_mc(flat, kTruth, 40000, 200, 5000 + rep);
        ratio += large.std_error / small.std_error;
    }
    ratio /= 50.0;
    CHECK(std::abs(ratio - 1.0 / std::sqrt(2.0)) <= 0.2 / std::sqrt(2.0));
}

TEST_CASE("autocorrelation diagnostic") {
    SUBCASE("iid counts stay in the null band") {
        const auto path = simulate(ConstantLink{0.8, 2.0}, 100000, 0, 0.8, 4);
        const auto acf = acf_diagnostic(path, 20);
        REQUIRE(acf.size() == 20);
        for (double r : acf) CHECK(std::abs(r) <= 0.02);
    }
    SUBCASE("dependence decays for the reference link") {
        const auto path = simulate(kTruth, 100000, 1000, 1.0, 4);
        const auto acf = acf_diagnostic(path, 10);
        CHECK(acf[0] > 0.0);
        CHECK(std::abs(acf[9]) < std::abs(acf[0]));
    }
    SUBCASE("edge cases") {
        const auto path = simulate(kTruth, 50, 0, 1.0, 4);
        CHECK(acf_diagnostic(path, 0).empty());
        CHECK_THROWS_AS(acf_diagnostic(path, 6), ArityError);
        const auto silent = simulate(ConstantLink{0.0, 2.0}, 100, 0, 0.0, 1);
        CHECK_THROWS_AS(acf_diagnostic(silent, 2), std::domain_error);
    }
}

TEST_CASE("loss csv") {
    const std::vector<LossEstimate> rows{{0.0237, 100000, 0.0005, 7}};
    std::ostringstream out;
    write_loss_csv(rows, out);
    CHECK(out.str() == "loss,std_error,n_eval,seed\n0.0237,5e-04,100000,7\n");
}
