#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "marlab/harness.hpp"

using namespace marlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct OutDir {
    fs::path path;
    explicit OutDir(const std::string& name) : path(fs::path("tmp_harness") / name) {
        fs::create_directories(path);
    }
    ~OutDir() {
        std::error_code ec;
        fs::remove_all("tmp_harness", ec);
    }
    RunOptions opts(std::optional<std::uint64_t> seed = {}) const {
        RunOptions o;
        o.out_dir = path.string();
        o.seed = seed;
        return o;
    }
};

std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json thm2_worked_config() {
    return json{{"kind", "inequality"},
                {"name", "thm2-worked"},
                {"check", "thm2"},
                {"generator", {{"type", "rademacher-nested"}}},
                {"schedule", {{"type", "power"}, {"exponent", -1.0}, {"p", 2.0}}},
                {"n", 1},
                {"N", 3},
                {"lambda_grid", {0.5}},
                {"mode", "exact"}};
}

}  // namespace

TEST_CASE("worked inequality config runs, passes, and lands the known numbers") {
    OutDir out("worked");
    auto res = run_config(thm2_worked_config(), out.opts());
    CHECK(res.pass);
    CHECK(res.report.at("pass") == true);
    CHECK(res.report.at("kind") == "inequality");
    CHECK(res.report.at("version") == std::string(kVersion));
    const std::string csv = slurp(res.csv_path);
    CHECK(csv.find("lambda,lhs,rhs_term1,rhs_term2,rhs_term3,holds") == 0);
    CHECK(csv.find("0.0625") != std::string::npos);
    CHECK(csv.find("true") != std::string::npos);
    CHECK(fs::path(res.csv_path).filename() == "thm2-worked.csv");
}

TEST_CASE("re-running a config byte-reproduces the CSV") {
    OutDir out("determinism");
    json cfg{{"kind", "slln"},
             {"name", "det"},
             {"generator", {{"type", "rademacher-weighted"}}},
             {"schedule", {{"type", "power"}, {"exponent", -1.0}, {"p", 2.0}}},
             {"horizon", 128},
             {"replicates", 150},
             {"trajectory_seeds", 5}};
    auto a = run_config(cfg, out.opts());
    const std::string first = slurp(a.csv_path);
    auto b = run_config(cfg, out.opts());
    const std::string second = slurp(b.csv_path);
    CHECK(!first.empty());
    CHECK(first == second);
    CHECK(first.find("n,term_a,term_b,r_partial_sum,running_sup_median,running_sup_q95") == 0);
}

TEST_CASE("seed precedence: CLI override beats the config value") {
    OutDir out("seeds");
    json cfg{{"kind", "inequality"},
             {"name", "mc"},
             {"check", "thm2"},
             {"seed", 9},
             {"generator", {{"type", "nested-iid"}}},
             {"schedule", {{"type", "power"}, {"exponent", -1.0}, {"p", 2.0}}},
             {"n", 1},
             {"N", 20},
             {"lambda_grid", {1.0}},
             {"mode", "mc"},
             {"replicates", 2000}};
    auto with_config_seed = run_config(cfg, out.opts());
    CHECK(with_config_seed.report.at("config").at("seed") == 9);
    // same name -> same path, so grab each run's bytes before the next
    // run overwrites the file
    const std::string bytes_seed9 = slurp(with_config_seed.csv_path);

    auto with_override = run_config(cfg, out.opts(2));
    CHECK(with_override.report.at("config").at("seed") == 2);
    const std::string bytes_seed2 = slurp(with_override.csv_path);
    CHECK(bytes_seed9 != bytes_seed2);

    json cfg2 = cfg;
    cfg2["seed"] = 2;
    auto with_config_seed2 = run_config(cfg2, out.opts());
    CHECK(slurp(with_config_seed2.csv_path) == bytes_seed2);
}

TEST_CASE("unknown keys are rejected with their path") {
    json cfg = thm2_worked_config();
    cfg["bogus"] = 1;
    try {
        run_config(cfg);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("bogus") != std::string::npos);
    }

    json cfg2 = thm2_worked_config();
    cfg2["generator"]["typo"] = true;
    try {
        run_config(cfg2);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("generator.typo") != std::string::npos);
    }
}

TEST_CASE("bandwidth exponent outside the open interval is rejected with a message") {
    OutDir out("beta");
    json cfg{{"kind", "regression"},
             {"name", "bad-beta"},
             {"chain", {{"phi", 0.5}, {"sigma", 1.0}, {"tau", 0.5}}},
             {"beta", 0.3},
             {"n_grid", {100, 200}},
             {"seeds", 3}};
    try {
        run_config(cfg, out.opts());
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("0.25") != std::string::npos);
    }
}

TEST_CASE("missing and ill-typed keys name the offending path") {
    json cfg = thm2_worked_config();
    cfg.erase("lambda_grid");
    CHECK_THROWS_AS(run_config(cfg), ValidationError);
    json cfg2 = thm2_worked_config();
    cfg2["N"] = "three";
    CHECK_THROWS_AS(run_config(cfg2), ValidationError);
    json cfg3 = thm2_worked_config();
    cfg3["kind"] = "unknown-kind";
    CHECK_THROWS_AS(run_config(cfg3), ValidationError);
}

TEST_CASE("an honestly failing drift config reports pass = false") {
    OutDir out("drift-fail");
    json cfg{{"kind", "drift"}, {"name", "too-weak"}, {"lambda_d", 0.01},
             {"b", 0.01},        {"n_max", 20},       {"replicates", 200}};
    auto res = run_config(cfg, out.opts());
    CHECK(!res.pass);
    CHECK(res.report.at("pass") == false);
    CHECK(res.report.at("verdicts").at("drift_holds") == false);
}

TEST_CASE("drift config on the testbed passes with the closed-form margin table") {
    OutDir out("drift-ok");
    json cfg{{"kind", "drift"},
             {"name", "testbed"},
             {"phi", 0.5},
             {"sigma", 1.0},
             {"lambda_d", 0.5},
             {"b", 1.5},
             {"small_set", {-2.449489742783178, 2.449489742783178}},
             {"n_max", 100},
             {"replicates", 500}};
    auto res = run_config(cfg, out.opts());
    CHECK(res.pass);
    const std::string csv = slurp(res.csv_path);
    CHECK(csv.rfind("x,V,PV,margin", 0) == 0);
    CHECK(res.report.at("verdicts").at("moment_bound") == 4.0);
}

TEST_CASE("poisson config reproduces the two-state closed form") {
    OutDir out("poisson");
    json cfg{{"kind", "poisson"},
             {"name", "two-state"},
             {"chain", {{"type", "two-state"}, {"a", 0.3}, {"b", 0.2}}},
             {"f", {1.0, 0.0}}};
    auto res = run_config(cfg, out.opts());
    CHECK(res.pass);
    const std::string csv = slurp(res.csv_path);
    CHECK(csv.rfind("state,f,g_solve,g_series", 0) == 0);
    // the solve lands within rounding of (1.2, -0.8); parse rather than
    // string-match, since the shortest form of the double need not be "1.2"
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);  // header
    std::vector<double> g;
    while (std::getline(lines, line)) {
        const auto a = line.find(','), b = line.find(',', a + 1);
        const auto c = line.find(',', b + 1);
        g.push_back(std::strtod(line.substr(b + 1, c - b - 1).c_str(), nullptr));
    }
    REQUIRE(g.size() == 2);
    CHECK(std::abs(g[0] - 1.2) <= 1e-12);
    CHECK(std::abs(g[1] + 0.8) <= 1e-12);
}

TEST_CASE("ergodicity config reports the exact two-state rate") {
    OutDir out("ergodicity");
    json cfg{{"kind", "ergodicity"},
             {"name", "rate"},
             {"chain", {{"type", "two-state"}, {"a", 0.3}, {"b", 0.2}}}};
    auto res = run_config(cfg, out.opts());
    CHECK(res.pass);
    CHECK(res.report.at("verdicts").at("rho").get<double>() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("regression config fills the consistency table") {
    OutDir out("regression");
    json cfg{{"kind", "regression"},
             {"name", "small"},
             {"chain", {{"phi", 0.5}, {"sigma", 1.0}, {"tau", 0.5}}},
             {"r", "sin"},
             {"psi", "one"},
             {"kernel", "gaussian"},
             {"beta", 0.2},
             {"x0", 0.0},
             {"n_grid", {200, 2000}},
             {"seeds", 8}};
    auto res = run_config(cfg, out.opts());
    CHECK(res.pass);
    const std::string csv = slurp(res.csv_path);
    CHECK(csv.rfind("n,seed,r_hat_psi,r_hat,bias,boundary,error", 0) == 0);
    CHECK(res.report.at("verdicts").at("median_non_increasing") == true);
}

TEST_CASE("config files: parse errors and missing files become validation errors") {
    const std::string p = "tmp_bad_config.json";
    {
        std::ofstream outf(p);
        outf << "{ not json";
    }
    CHECK_THROWS_AS(run_config_file(p), ValidationError);
    std::remove(p.c_str());
    CHECK_THROWS_AS(run_config_file("no_such_config.json"), ValidationError);
}

TEST_CASE("schedule shorthand for CLI flags") {
    auto one_over_n = schedule_shorthand("1/n", 2.0);
    CHECK(one_over_n.at("exponent") == -1.0);
    CHECK(one_over_n.at("p") == 2.0);
    CHECK(schedule_shorthand("const", 3.0).at("exponent") == 0.0);
    CHECK(schedule_shorthand("n^-0.8", 2.0).at("exponent") == -0.8);
    CHECK_THROWS_AS(schedule_shorthand("weird", 2.0), ValidationError);
}

TEST_CASE("environment variable supplies the output directory when nothing else does") {
    OutDir out("env");
    setenv(kOutDirEnv, out.path.string().c_str(), 1);
    auto res = run_config(thm2_worked_config());
    unsetenv(kOutDirEnv);
    CHECK(fs::equivalent(fs::path(res.csv_path).parent_path(), out.path));
}
