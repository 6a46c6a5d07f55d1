// Acceptance gate: nine end-to-end checks, one line each, nonzero exit if
// any fails. Tolerances are fixed here and nowhere else.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "marlab/arrays.hpp"
#include "marlab/harness.hpp"
#include "marlab/inequality.hpp"
#include "marlab/markov.hpp"
#include "marlab/regression.hpp"
#include "marlab/rng.hpp"
#include "marlab/slln.hpp"

using namespace marlab;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

std::string fmt(double v) { return format_double(v); }

std::vector<double> lambda_grid_20() {
    std::vector<double> g;
    for (int i = 0; i < 20; ++i) g.push_back(0.15 + 0.35 * static_cast<double>(i));
    return g;
}

const std::vector<WeightSchedule>& suite_schedules(double p) {
    static std::vector<WeightSchedule> cache;
    cache.clear();
    cache.push_back(WeightSchedule::power(-1.0, p));
    cache.push_back(WeightSchedule::power(-0.8, p));
    cache.push_back(WeightSchedule::constant(p));
    return cache;
}

// 1. Array maximal bound, exact mode, full finite-alphabet sweep.
Outcome criterion1() {
    Outcome out;
    const auto lambdas = lambda_grid_20();
    std::size_t cases = 0;
    for (const auto& dist : {ArrayDistribution::rademacher_nested(),
                             ArrayDistribution::rademacher_weighted()}) {
        for (std::size_t N = 2; N <= 12; ++N) {
            for (std::size_t n : {std::size_t{1}, (N + 1) / 2}) {
                for (double p : {1.0, 2.0, 3.0}) {
                    for (const auto& w : suite_schedules(p)) {
                        const auto reports =
                            thm2_check_grid(dist, w, n, N, lambdas, CheckMode::Exact);
                        for (const auto& r : reports) {
                            ++cases;
                            if (!(r.holds && r.margin >= -1e-9 * std::max(1.0, r.rhs))) {
                                out.require(false, "violation at " + dist.name() + " N=" +
                                                       std::to_string(N) + " lambda=" +
                                                       fmt(r.lambda));
                                return out;
                            }
                        }
                    }
                }
            }
        }
    }
    const auto worked = thm2_check(ArrayDistribution::rademacher_nested(),
                                   WeightSchedule::power(-1.0, 2.0), 1, 3, 0.5,
                                   CheckMode::Exact);
    out.require(std::abs(worked.lhs - 0.0625) <= 1e-15, "worked lhs " + fmt(worked.lhs));
    out.require(std::abs(worked.rhs - 49.0 / 36.0) <= 1e-14, "worked rhs " + fmt(worked.rhs));
    out.note(std::to_string(cases) + " exact cases hold, worked values matched");
    return out;
}

// 2. Single-martingale maximal bound, same sweep.
Outcome criterion2() {
    Outcome out;
    std::size_t cases = 0;
    for (const auto& dist : {ArrayDistribution::rademacher_nested(),
                             ArrayDistribution::rademacher_weighted()}) {
        for (std::size_t N = 2; N <= 12; ++N) {
            for (std::size_t n : {std::size_t{1}, (N + 1) / 2}) {
                for (double p : {1.0, 2.0, 3.0}) {
                    for (const auto& w : suite_schedules(p)) {
                        const auto r = cbm_bound(dist, w, n, N, CheckMode::Exact);
                        ++cases;
                        if (!r.holds) {
                            out.require(false, "violation at " + dist.name() + " N=" +
                                                   std::to_string(N) + " p=" + fmt(p));
                            return out;
                        }
                    }
                }
            }
        }
    }
    const auto worked = cbm_bound(ArrayDistribution::rademacher_nested(),
                                  WeightSchedule::power(-1.0, 2.0), 1, 3, CheckMode::Exact);
    out.require(worked.lhs == 1.0 && std::abs(worked.rhs - 49.0 / 36.0) <= 1e-14,
                "worked case lhs=" + fmt(worked.lhs) + " rhs=" + fmt(worked.rhs));
    out.note(std::to_string(cases) + " exact cases hold");
    return out;
}

// 3. Moment bound: exact constant, enumerated sweep, Gaussian fourth-moment oracle.
Outcome criterion3() {
    Outcome out;
    out.require(burkholder_constant(2.0) == 2592.0,
                "constant(2) = " + fmt(burkholder_constant(2.0)));
    std::size_t cases = 0;
    for (const auto& dist : {ArrayDistribution::rademacher_nested(),
                             ArrayDistribution::rademacher_weighted()}) {
        for (double p : {2.0, 3.0, 4.0}) {
            for (std::size_t k = 1; k <= 10; ++k) {
                const auto r = burkholder_check(dist, p, 10, k, CheckMode::Exact);
                ++cases;
                if (!r.holds) {
                    out.require(false, "violation at " + dist.name() + " p=" + fmt(p) +
                                           " k=" + std::to_string(k));
                    return out;
                }
            }
        }
    }
    McOptions mc;
    mc.replicates = 200000;
    mc.seed = 11;
    const auto g = burkholder_check(ArrayDistribution::nested_iid(), 4.0, 20, 20,
                                    CheckMode::MonteCarlo, mc);
    // M ~ N(0, k): Var(M^4) = 96 k^4, so the oracle band is 3 sqrt(96) k^2 / sqrt(R)
    const double oracle = 3.0 * 400.0;
    const double band = 3.0 * std::sqrt(96.0) * 400.0 / std::sqrt(200000.0);
    out.require(g.holds, "Gaussian bound verdict false");
    out.require(std::abs(g.lhs - oracle) <= band,
                "fourth moment " + fmt(g.lhs) + " outside " + fmt(oracle) + "+-" + fmt(band));
    out.note(std::to_string(cases) + " enumerated cases hold, fourth moment " + fmt(g.lhs));
    return out;
}

// 4. Poisson equation oracles.
Outcome criterion4() {
    Outcome out;
    const auto chain = FiniteChain::two_state(0.3, 0.2);
    const auto sol = poisson_solve_finite(chain, {1.0, 0.0});
    out.require(std::abs(sol.g_solve[0] - 1.2) <= 1e-12 &&
                    std::abs(sol.g_solve[1] + 0.8) <= 1e-12,
                "two-state g = (" + fmt(sol.g_solve[0]) + ", " + fmt(sol.g_solve[1]) + ")");

    Rng rng(2029);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 2 + rng.index(9);
        const auto c = FiniteChain::random_ergodic(m, rng);
        std::vector<double> f(m);
        for (auto& v : f) v = 2.0 * rng.uniform01() - 1.0;
        const auto s = poisson_solve_finite(c, f);
        for (std::size_t i = 0; i < m; ++i)
            worst = std::max(worst, std::abs(s.g_solve[i] - s.g_series[i]));
    }
    out.require(worst <= 1e-10, "series/solve gap " + fmt(worst));

    FiniteRegressionModel fm{FiniteChain::two_state(0.3, 0.2),
                             {-0.5, 1.0},
                             {-1.0, 3.0},
                             {{0.75, 0.25}, {0.75, 0.25}},
                             RegressionFn::sine()};
    double worst_pair = 0.0;
    for (double h : {1.0, 0.5, 0.25}) {
        const auto rep = finite_pair_identity(fm, KernelSpec::gaussian(), PsiSpec::identity(), h,
                                              0.0);
        worst_pair = std::max(worst_pair, rep.max_residual);
    }
    out.require(worst_pair <= 1e-10, "pair identity residual " + fmt(worst_pair));
    out.note("100 random chains gap " + fmt(worst) + ", pair residual " + fmt(worst_pair));
    return out;
}

// 5. Drift, stationary moment, ergodicity rate.
Outcome criterion5() {
    Outcome out;
    Ar1Model model;  // testbed
    DriftSpec spec;
    spec.lambda_d = 0.5;
    spec.b = 1.5;
    std::vector<double> grid;
    for (int i = 0; i <= 400; ++i) grid.push_back(-10.0 + 0.05 * static_cast<double>(i));
    const auto dr = drift_margin(model, spec, grid);
    out.require(dr.holds && dr.min_margin >= 0.0, "drift margin " + fmt(dr.min_margin));

    const auto mb = stationary_moment_bound(model, spec, 200, 20000, 77);
    out.require(mb.bound == 4.0, "bound " + fmt(mb.bound));
    out.require(mb.holds, "moment verdict false");
    out.require(std::abs(mb.sup_estimate - 2.33) <= 0.05,
                "V-moment estimate " + fmt(mb.sup_estimate) + " not within 2.33 +- 0.05");

    // the closed form is 0.5; the eigensolver lands within one ulp of it,
    // so "exact" here means agreement at double rounding (1e-15), thirteen
    // orders tighter than any fitted-rate estimate could reach
    const auto er = ergodicity_rate(FiniteChain::two_state(0.3, 0.2));
    out.require(std::abs(er.rho - 0.5) <= 1e-15, "two-state rate " + fmt(er.rho));
    out.note("margin " + fmt(dr.min_margin) + ", V-moment " + fmt(mb.sup_estimate) + ", rate " +
             fmt(er.rho));
    return out;
}

// 6. Consistency experiment at desk scale.
Outcome criterion6() {
    Outcome out;
    RegressionProblem prob;  // psi = 1
    const std::vector<std::size_t> grid = {1000, 10000, 100000};
    const auto rep1 = consistency_experiment(prob, grid, 50, 4242);
    out.require(rep1.median_error.back() < 0.03,
                "psi=1 median " + fmt(rep1.median_error.back()));
    out.require(rep1.median_non_increasing, "psi=1 medians not monotone");

    RegressionProblem prob2;
    prob2.psi = PsiSpec::identity();  // target sin(0) weighted by the density: 0
    const auto rep2 = consistency_experiment(prob2, grid, 50, 4243);
    out.require(rep2.median_error.back() < 0.02,
                "psi=y median " + fmt(rep2.median_error.back()));
    out.note("medians psi=1 " + fmt(rep1.median_error.back()) + ", psi=y " +
             fmt(rep2.median_error.back()));
    return out;
}

// 7. Rate diagnostics for the chain-driven array. The slope windows are the
// contract values; the increment-series window is known to sit above the
// measured rate of the faithful construction (the kernel localizes harder
// than the analytic envelope the window was derived from), so this check
// documents the discrepancy rather than hiding it.
Outcome criterion7() {
    Outcome out;
    const auto dist = ArrayDistribution::chain_kernel(RegressionProblem{});
    const auto w = WeightSchedule::power(-0.8, 2.0);
    const auto rep = corollary1_terms(dist, w, 2.0, 1, 1024, 2000, 424242);
    const bool r_ok = std::abs(rep.r_increment_slope - (-1.1)) <= 0.15;
    const bool a_ok = std::abs(rep.term_a_slope - (-0.6)) <= 0.15;
    out.require(r_ok, "increment slope " + fmt(rep.r_increment_slope) +
                          " outside -1.1 +- 0.15 (construction decays faster than the envelope; "
                          "summability itself holds)");
    out.require(a_ok, "term_a slope " + fmt(rep.term_a_slope) + " outside -0.6 +- 0.15");
    out.note("slopes: increments " + fmt(rep.r_increment_slope) + ", term_a " +
             fmt(rep.term_a_slope) + ", summable=" + (rep.r_summable ? "yes" : "no"));
    return out;
}

// 8. Trajectory check for the weighted walk.
Outcome criterion8() {
    Outcome out;
    const auto dist = ArrayDistribution::rademacher_nested();
    const auto w = WeightSchedule::power(-1.0, 2.0);
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = 1; s <= 100; ++s) seeds.push_back(derive_seed(8, s, "traj"));
    const auto dp = diagonal_paths(dist, w, seeds, 20000, {10000});
    std::size_t below = 0;
    for (std::size_t s = 0; s < seeds.size(); ++s)
        if (dp.running_sup[s][0] < 0.05) ++below;
    out.require(below >= 95, std::to_string(below) + "/100 seeds below 0.05");
    out.note(std::to_string(below) + "/100 running sups below 0.05 at n=10^4");
    return out;
}

// 9. Byte-level determinism of archived runs.
Outcome criterion9() {
    Outcome out;
    namespace fs = std::filesystem;
    const fs::path dir = "tmp_acceptance_out";
    fs::create_directories(dir);
    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::vector<nlohmann::json> configs = {
        {{"kind", "inequality"},
         {"name", "det-a"},
         {"check", "thm2"},
         {"generator", {{"type", "rademacher-nested"}}},
         {"schedule", {{"type", "power"}, {"exponent", -1.0}, {"p", 2.0}}},
         {"n", 1},
         {"N", 3},
         {"lambda_grid", {0.5, 1.0, 2.0}},
         {"mode", "exact"}},
        {{"kind", "slln"},
         {"name", "det-b"},
         {"generator", {{"type", "rademacher-weighted"}}},
         {"schedule", {{"type", "power"}, {"exponent", -1.0}, {"p", 2.0}}},
         {"horizon", 256},
         {"replicates", 150},
         {"trajectory_seeds", 10},
         {"seed", 7}},
        {{"kind", "drift"}, {"name", "det-c"}, {"replicates", 400}, {"n_max", 50}}};
    RunOptions opts;
    opts.out_dir = dir.string();
    for (const auto& cfg : configs) {
        const auto first = run_config(cfg, opts);
        const std::string bytes1 = slurp(first.csv_path);
        const auto second = run_config(cfg, opts);
        const std::string bytes2 = slurp(second.csv_path);
        out.require(!bytes1.empty() && bytes1 == bytes2,
                    "CSV bytes differ for " + cfg.at("name").get<std::string>());
    }
    std::error_code ec;
    fs::remove_all(dir, ec);
    out.note("3 archived configs re-ran byte-identically");
    return out;
}

struct Entry {
    const char* label;
    std::function<Outcome()> fn;
    double budget_seconds;  // 0 = no budget stated
};

}  // namespace

int main() {
    const std::vector<Entry> entries = {
        {"criterion 1 (array maximal bound, exact sweep)", criterion1, 60.0},
        {"criterion 2 (single-martingale bound, exact sweep)", criterion2, 0.0},
        {"criterion 3 (moment bound and constant)", criterion3, 60.0},
        {"criterion 4 (Poisson equation oracles)", criterion4, 30.0},
        {"criterion 5 (drift, moments, ergodicity rate)", criterion5, 60.0},
        {"criterion 6 (estimator consistency at desk scale)", criterion6, 600.0},
        {"criterion 7 (rate diagnostics slopes)", criterion7, 300.0},
        {"criterion 8 (trajectory running sups)", criterion8, 60.0},
        {"criterion 9 (byte-identical reruns)", criterion9, 0.0},
    };
    bool all = true;
    for (const auto& e : entries) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = e.fn();
        } catch (const std::exception& ex) {
            out.pass = false;
            out.detail = std::string("exception: ") + ex.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (e.budget_seconds > 0.0 && secs > e.budget_seconds) {
            out.pass = false;
            out.detail += (out.detail.empty() ? "" : "; ") + std::string("over budget ") +
                          format_double(e.budget_seconds) + "s";
        }
        std::printf("[%s] %s: %s (%.1fs)\n", out.pass ? "PASS" : "FAIL", e.label,
                    out.detail.c_str(), secs);
        all = all && out.pass;
    }
    std::printf("%s\n", all ? "acceptance: all criteria pass"
                            : "acceptance: at least one criterion failed");
    return all ? 0 : 1;
}
