#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "marlab/kernel.hpp"
#include "marlab/markov.hpp"
#include "marlab/quadrature.hpp"
#include "marlab/regression.hpp"
#include "marlab/rng.hpp"

using namespace marlab;

namespace {

RegressionProblem testbed() { return RegressionProblem{}; }

}  // namespace

TEST_CASE("kernels integrate to one") {
    CHECK(kernel_mass(KernelSpec::gaussian()) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(kernel_mass(KernelSpec::epanechnikov()) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(kernel_mass(KernelSpec::uniform()) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("kernel verdicts match the closed-form witnesses") {
    auto grid = default_check_grid();

    auto g = check_kernel(KernelSpec::gaussian(), grid);
    CHECK(g.bounded);
    CHECK(g.sup_value == doctest::Approx(0.3989422804014327).epsilon(1e-4));  // grid sup sits a hair under the true max
    CHECK(std::abs(g.sup_at) < 1e-2);
    CHECK(g.tail);
    CHECK(g.lipschitz);
    CHECK(g.lipschitz_estimate == doctest::Approx(0.24197072451914337).epsilon(1e-3));
    CHECK(std::abs(std::abs(g.lipschitz_at) - 1.0) < 0.05);

    auto e = check_kernel(KernelSpec::epanechnikov(), grid);
    CHECK(e.bounded);
    CHECK(e.sup_value == doctest::Approx(0.75).epsilon(1e-4));
    CHECK(e.tail);
    CHECK(e.lipschitz);
    CHECK(e.lipschitz_estimate == doctest::Approx(1.5).epsilon(2e-2));

    auto u = check_kernel(KernelSpec::uniform(), grid);
    CHECK(u.bounded);
    CHECK(u.tail);
    CHECK(!u.lipschitz);  // the jump at |u| = 1 blows up the quotient
}

TEST_CASE("kernels are nonnegative and Lipschitz on random pairs") {
    Rng rng(31);
    for (auto spec : {KernelSpec::gaussian(), KernelSpec::epanechnikov()}) {
        const double L = *spec.lipschitz();
        for (int i = 0; i < 2000; ++i) {
            const double a = 8.0 * (rng.uniform01() - 0.5);
            const double b = 8.0 * (rng.uniform01() - 0.5);
            CHECK(spec(a) >= 0.0);
            CHECK(std::abs(spec(a) - spec(b)) <= L * std::abs(a - b) + 1e-12);
        }
    }
}

TEST_CASE("bandwidth exponent interval is open at both ends") {
    CHECK_THROWS_AS(BandwidthSchedule(0.0), ValidationError);
    CHECK_THROWS_AS(BandwidthSchedule(0.25), ValidationError);
    CHECK_THROWS_AS(BandwidthSchedule(0.3), ValidationError);
    CHECK_THROWS_AS(BandwidthSchedule(-0.1), ValidationError);
    CHECK_NOTHROW(BandwidthSchedule(0.2));
    CHECK_NOTHROW(BandwidthSchedule(0.249));
    BandwidthSchedule bw(0.2);
    CHECK(bw.h(32) == doctest::Approx(std::pow(32.0, -0.2)).epsilon(1e-15));
    CHECK_THROWS_AS(bw.h(0), ValidationError);
}

TEST_CASE("estimator: constant response is reproduced exactly") {
    auto prob = testbed();
    Path p;
    p.x = {0.0, 0.3, -0.4, 0.1};
    p.eps = {0.0, 0.0, 0.0, 0.0};
    p.y = {5.0, 5.0, 5.0, 5.0};
    auto res = nw(p, prob, 3);
    REQUIRE(res.ratio_defined);
    CHECK(res.r_hat == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("estimator: two-point hand formula") {
    auto prob = testbed();
    prob.x0 = 0.0;
    Path p;
    p.x = {0.0, 0.0, 1.0};
    p.eps = {0.0, 0.0, 0.0};
    p.y = {0.0, 1.0, 2.0};
    // h_2 = 2^{-0.2}; weights K(0) and K(1/h)
    const double h = std::pow(2.0, -0.2);
    const double k0 = normal_pdf(0.0), k1 = normal_pdf(1.0 / h);
    auto res = nw(p, prob, 2);
    REQUIRE(res.ratio_defined);
    CHECK(res.r_hat == doctest::Approx((1.0 * k0 + 2.0 * k1) / (k0 + k1)).epsilon(1e-14));
    CHECK(res.r_hat_psi == doctest::Approx((k0 + k1) / (2.0 * h)).epsilon(1e-14));
}

TEST_CASE("estimator: ratio ignores kernel amplitude and is linear in psi") {
    auto prob = testbed();
    auto path = prob.model.simulate(500, 12);

    auto prob_id = prob;
    prob_id.psi = PsiSpec::identity();
    auto prob_one = prob;
    prob_one.psi = PsiSpec::one();
    auto prob_aff = prob;
    prob_aff.psi = PsiSpec::affine(2.5, -1.0);

    auto rid = nw(path, prob_id, 500);
    auto rone = nw(path, prob_one, 500);
    auto raff = nw(path, prob_aff, 500);
    CHECK(raff.r_hat_psi ==
          doctest::Approx(2.5 * rid.r_hat_psi - 1.0 * rone.r_hat_psi).epsilon(1e-12));
    // the response ratio does not depend on psi at all
    CHECK(raff.r_hat == rid.r_hat);
    CHECK(rone.r_hat == rid.r_hat);

    // amplitude invariance of the ratio: scale every kernel weight by c and
    // the ratio is untouched (hand computation on a short prefix)
    const double h = prob.bandwidth.h(4);
    for (double c : {1.0, 3.7}) {
        KahanSum num, den;
        for (std::size_t i = 1; i <= 4; ++i) {
            const double k = c * prob.kernel((prob.x0 - path.x[i]) / h);
            num.add(path.y[i] * k);
            den.add(k);
        }
        Path prefix;
        prefix.x.assign(path.x.begin(), path.x.begin() + 5);
        prefix.eps.assign(path.eps.begin(), path.eps.begin() + 5);
        prefix.y.assign(path.y.begin(), path.y.begin() + 5);
        auto r4 = nw(prefix, prob, 4);
        CHECK(r4.r_hat == doctest::Approx(num.value() / den.value()).epsilon(1e-13));
    }
}

TEST_CASE("estimator: zero denominator is flagged, not zero-filled") {
    auto prob = testbed();
    prob.kernel = KernelSpec::epanechnikov();
    prob.x0 = 100.0;  // far outside the visited range, compact support
    auto path = prob.model.simulate(50, 2);
    auto res = nw(path, prob, 50);
    CHECK(!res.ratio_defined);
    CHECK(res.denominator == 0.0);
    CHECK(res.r_hat_psi == 0.0);
}

TEST_CASE("estimator: density value recovered at the testbed point") {
    auto prob = testbed();  // psi = 1, x0 = 0: limit is the stationary density
    const double target = prob.target();
    CHECK(target == doctest::Approx(1.0 / std::sqrt(2.0 * 3.141592653589793 * 4.0 / 3.0))
                        .epsilon(1e-12));
    std::vector<double> errs;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto path = prob.model.simulate(100000, seed);
        errs.push_back(std::abs(nw(path, prob, 100000).r_hat_psi - target));
    }
    CHECK(median(errs) < 0.03);
}

TEST_CASE("smoothed target approaches the limit monotonically in n") {
    auto prob = testbed();
    const double target = prob.target();
    const double e2 = std::abs(bias_term(prob, 100).value - target);
    const double e4 = std::abs(bias_term(prob, 10000).value - target);
    const double e6 = std::abs(bias_term(prob, 1000000).value - target);
    CHECK(e4 < e2);
    CHECK(e6 < e4);
    CHECK(e6 < 5e-3);
}

TEST_CASE("smoothed target vanishes for an odd integrand") {
    auto prob = testbed();
    prob.psi = PsiSpec::identity();  // E[psi(Y)|X=x] = sin(x), odd; pi and K even
    auto res = bias_term(prob, 100);
    CHECK(std::abs(res.value) <= 1e-8);
}

TEST_CASE("psi moment sups: closed-form maximizer for psi = 1") {
    auto prob = testbed();
    auto grid = default_check_grid();
    auto rep = check_psi(prob, LyapunovV::one_plus_x2(), grid);
    CHECK(rep.sup1_finite);
    CHECK(rep.sup1 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-4));
    CHECK(std::abs(std::abs(rep.sup1_at) - 1.0) < 0.01);
    CHECK(rep.sup2_finite);
    CHECK(rep.sup2 == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(!rep.growth_flag1);
    CHECK(!rep.growth_flag2);
}

TEST_CASE("psi moment sups: identity psi stays finite, exp-square is flagged") {
    auto prob = testbed();
    prob.psi = PsiSpec::identity();
    auto grid = default_check_grid();
    auto rep = check_psi(prob, LyapunovV::one_plus_x2(), grid);
    CHECK(rep.sup1_finite);
    CHECK(rep.sup2_finite);
    CHECK(!rep.growth_flag1);

    prob.psi = PsiSpec::exp_square();
    prob.model.tau = TauSpec::constant(1.0);  // E[exp(Y^2)|x] diverges at tau = 1
    auto bad = check_psi(prob, LyapunovV::one_plus_x2(), grid);
    CHECK(!bad.sup2_finite);
}

TEST_CASE("one-step smoothed mean: closed form against quadrature") {
    auto prob = testbed();
    for (auto psi : {PsiSpec::one(), PsiSpec::identity(), PsiSpec::affine(1.5, 0.25)}) {
        prob.psi = psi;
        for (double h : {1.0, 0.5, 0.21}) {
            for (double x : {-2.0, 0.0, 0.7, 3.5}) {
                CHECK(prob.Pf_h(h, x) ==
                      doctest::Approx(prob.Pf_h_quadrature(h, x)).epsilon(1e-7));
            }
        }
    }
}

TEST_CASE("residual-mode decomposition sums to the estimator and shrinks at the edges") {
    auto prob = testbed();
    auto path = prob.model.simulate(20000, 8);
    for (std::size_t n : {500, 5000, 20000}) {
        auto d = decomposition_residual(path, prob, n);
        const double recon = d.bias + d.martingale_term + d.boundary_term;
        CHECK(d.r_hat_psi == doctest::Approx(recon).epsilon(1e-12));
        // boundary proxy is O(1/(n h_n)) with a sup-K constant
        const double cap =
            2.0 * prob.kernel.sup_K() / (static_cast<double>(n) * prob.bandwidth.h(n));
        CHECK(std::abs(d.boundary_term) <= cap + 1e-15);
    }
}

TEST_CASE("martingale part of the estimator decays at the expected rate") {
    auto prob = testbed();
    const std::vector<std::size_t> grid = {256, 1024, 4096, 16384};
    const std::size_t seeds = 200;
    std::vector<double> mean_abs(grid.size(), 0.0);
    for (std::size_t s = 0; s < seeds; ++s) {
        auto path = prob.model.simulate(grid.back(), derive_seed(99, s, "mart-slope"));
        for (std::size_t gi = 0; gi < grid.size(); ++gi) {
            auto d = decomposition_residual(path, prob, grid[gi]);
            mean_abs[gi] += std::abs(d.martingale_term) / static_cast<double>(seeds);
        }
    }
    std::vector<double> x(grid.begin(), grid.end());
    auto fit = fit_log_log(x, mean_abs);
    REQUIRE(fit.used == grid.size());
    CHECK(fit.slope == doctest::Approx(-0.3).epsilon(0.5));  // -(1/2 - beta) +- 0.15
    CHECK(fit.slope <= -0.15);
    CHECK(fit.slope >= -0.45);
}

TEST_CASE("oracle decomposition on the finite testbed is exact") {
    FiniteRegressionModel fm{FiniteChain::two_state(0.3, 0.2),
                             {-0.5, 1.0},
                             {-1.0, 3.0},
                             {{0.75, 0.25}, {0.75, 0.25}},
                             RegressionFn::sine()};
    fm.validate();
    auto path = fm.simulate(400, 5);
    for (auto psi : {PsiSpec::one(), PsiSpec::identity()}) {
        auto d = decomposition_oracle(fm, path, KernelSpec::gaussian(), psi, 0.8, 0.0, 400);
        CHECK(d.oracle);
        const double recon = d.bias + d.martingale_term + d.boundary_term;
        CHECK(d.r_hat_psi == doctest::Approx(recon).epsilon(1e-12));
    }
    auto dz = decomposition_oracle(fm, path, KernelSpec::gaussian(), PsiSpec::zero(), 0.8, 0.0,
                                   400);
    CHECK(dz.r_hat_psi == 0.0);
    CHECK(dz.bias == 0.0);
    CHECK(dz.martingale_term == 0.0);
    CHECK(dz.boundary_term == 0.0);
}

TEST_CASE("pairwise identity holds on the finite testbed across bandwidths") {
    FiniteRegressionModel fm{FiniteChain::two_state(0.3, 0.2),
                             {-0.5, 1.0},
                             {-1.0, 3.0},
                             {{0.75, 0.25}, {0.75, 0.25}},
                             RegressionFn::sine()};
    for (double h : {1.0, 0.5, 0.25}) {
        auto rep = finite_pair_identity(fm, KernelSpec::gaussian(), PsiSpec::identity(), h, 0.0);
        CHECK(rep.holds);
        CHECK(rep.max_residual <= 1e-10);
    }
}

TEST_CASE("consistency experiment rejects degenerate chains before running") {
    auto prob = testbed();
    prob.model.sigma = 0.0;  // X sticks to a point; drift/irreducibility gone
    CHECK_THROWS_AS(consistency_experiment(prob, {100, 200}, 3, 1), ValidationError);
}

TEST_CASE("consistency experiment is deterministic and fills its tables") {
    auto prob = testbed();
    auto a = consistency_experiment(prob, {200, 400}, 6, 77);
    auto b = consistency_experiment(prob, {200, 400}, 6, 77);
    REQUIRE(a.points.size() == 12);
    CHECK(a.target == prob.target());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].r_hat_psi == b.points[i].r_hat_psi);
        CHECK(a.points[i].error >= 0.0);
    }
    REQUIRE(a.median_error.size() == 2);
    CHECK(a.median_error[0] == b.median_error[0]);
}
