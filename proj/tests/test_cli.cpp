#include "doctest.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "ingarch/experiment.hpp"

namespace fs = std::filesystem;
using namespace ingarch;

namespace {

const fs::path kRoot = INGARCH_TEST_TMP;

int run(const std::string& args) {
    const std::string cmd = std::string(INGARCH_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh(const std::string& name) {
    const auto dir = kRoot / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string arg(const fs::path& p) { return "'" + p.string() + "'"; }

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

const char* kSmallConfig =
    "[simulation]\nn = 300\n[ga]\npopulation = 24\ngenerations = 10\n"
    "[eval]\nn_eval = 5000\nburn_in = 100\nseeds = 2\n";

}  // namespace

TEST_CASE("chained commands equal the reproduction artifacts") {
    const auto dir = fresh("chain");
    const auto cfg = dir / "small.cfg";
    write_text(cfg, kSmallConfig);
    const auto fig = dir / "fig";
    const auto chain = dir / "chain";
    REQUIRE(run("reproduce-fig2 -c " + arg(cfg) + " -o " + arg(fig)) == 0);
    REQUIRE(run("simulate -c " + arg(cfg) + " -o " + arg(chain)) == 0);
    for (int r = 0; r < 2; ++r) {
        const auto rs = std::to_string(r);
        REQUIRE(run("estimate -c " + arg(cfg) + " -d " + arg(chain / "path.csv") + " --run " + rs + " -o " +
                    arg(chain)) == 0);
        REQUIRE(run("evaluate -c " + arg(cfg) + " -s " + arg(chain / ("spline_run" + rs + ".csv")) + " --run " +
                    rs + " -o " + arg(chain)) == 0);
    }
    for (const char* stem : {"path.csv", "spline_run0.csv", "spline_run0.meta", "trace_run0.csv", "loss_run0.csv",
                             "surface_run0.csv", "spline_run1.csv", "trace_run1.csv", "loss_run1.csv"}) {
        CAPTURE(stem);
        CHECK(slurp(fig / stem) == slurp(chain / stem));
    }
    const auto losses = slurp(fig / "losses.csv");
    CHECK(losses == slurp(fig / "loss_run0.csv") + slurp(fig / "loss_run1.csv").substr(27));
}

TEST_CASE("outputs are byte reproducible") {
    const auto dir = fresh("repro");
    const auto cfg = dir / "small.cfg";
    write_text(cfg, kSmallConfig);
    REQUIRE(run("reproduce-fig2 -c " + arg(cfg) + " --seed 11 -o " + arg(dir / "a")) == 0);
    REQUIRE(run("reproduce-fig2 -c " + arg(cfg) + " --seed 11 -o " + arg(dir / "b")) == 0);
    REQUIRE(run("reproduce-fig2 -c " + arg(cfg) + " --seed 12 -o " + arg(dir / "c")) == 0);
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(dir / "a")) {
        const auto name = entry.path().filename();
        CAPTURE(name.string());
        CHECK(slurp(entry.path()) == slurp(dir / "b" / name));
        ++files;
    }
    CHECK(files == 13);
    CHECK(slurp(dir / "a" / "path.csv") != slurp(dir / "c" / "path.csv"));
}

TEST_CASE("effective config is echoed with defaults resolved") {
    const auto dir = fresh("echo");
    REQUIRE(run("simulate --n 50 --seed 3 -o " + arg(dir)) == 0);
    std::ifstream in(dir / "simulate.config");
    const auto echoed = parse_spec(in);
    ExperimentSpec expected;
    expected.simulation.n = 50;
    expected.simulation.seed = expected.ga.seed = expected.eval.seed = 3;
    CHECK(echoed == expected.resolved(50));
    CHECK(echoed.simulation.lambda0 == 1.0);
    std::ifstream path_in(dir / "path.csv");
    CHECK(read_path_csv(path_in).size() == 50);
}

TEST_CASE("output directory from the environment") {
    const auto dir = fresh("env");
    REQUIRE(::setenv("INGARCH_OUT_DIR", (dir / "sub").c_str(), 1) == 0);
    const int code = run("simulate --n 20");
    ::unsetenv("INGARCH_OUT_DIR");
    REQUIRE(code == 0);
    CHECK(fs::exists(dir / "sub" / "path.csv"));
    REQUIRE(run("simulate --n 20 -o " + arg(dir / "flag")) == 0);
    CHECK(fs::exists(dir / "flag" / "path.csv"));
}

TEST_CASE("rate table has one row per sample size") {
    const auto dir = fresh("rate");
    const auto cfg = dir / "small.cfg";
    write_text(cfg, kSmallConfig);
    REQUIRE(run("rate -c " + arg(cfg) + " --n 400,100,200 --seeds 1 -o " + arg(dir)) == 0);
    const auto text = slurp(dir / "rate.csv");
    CHECK(text.starts_with("n,median_loss,iqr_low,iqr_high,seeds\n100,"));
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
    CHECK(text.find("\n400,") != std::string::npos);
    CHECK(slurp(dir / "rate_fit.txt").starts_with("slope="));
}

TEST_CASE("exit codes") {
    const auto dir = fresh("codes");
    write_text(dir / "bad.cfg", "[ga]\npopulation = lots\n");
    write_text(dir / "invalid.cfg", "[eval]\nseeds = 0\n");
    write_text(dir / "bad.csv", "t,lambda,y\n0,1,x\n");
    const auto out = " -o " + arg(dir / "out");
    CHECK(run("--help") == 0);
    CHECK(run("") == 1);
    CHECK(run("frobnicate") == 1);
    CHECK(run("simulate --n") == 1);
    CHECK(run("simulate -c " + arg(dir / "bad.cfg") + out) == 1);
    CHECK(run("simulate -c " + arg(dir / "invalid.cfg") + out) == 1);
    CHECK(run("simulate -c " + arg(dir / "missing.cfg") + out) == 1);
    CHECK(run("rate --n 100,abc" + out) == 1);
    CHECK(run("estimate" + out) == 1);
    CHECK(run("estimate -d " + arg(dir / "missing.csv") + out) == 2);
    CHECK(run("estimate -d " + arg(dir / "bad.csv") + out) == 2);
    CHECK(run("evaluate -s " + arg(dir / "missing.csv") + out) == 2);
}
