#include "marlab/regression.hpp"

#include <Eigen/Dense>

#include "marlab/rng.hpp"

namespace marlab {

namespace {

// E[exp(c Y^2)] for Y ~ N(m, t^2); +inf when 2 c t^2 >= 1.
double gaussian_exp_square_moment(double c, double m, double t) {
    const double d = 1.0 - 2.0 * c * t * t;
    if (d <= 0.0) return kInf;
    return std::exp(c * m * m / d) / std::sqrt(d);
}

// E|Y| for Y ~ N(m, t^2) (folded normal).
double folded_normal_mean(double m, double t) {
    if (t == 0.0) return std::abs(m);
    return t * 0.7978845608028654 * std::exp(-0.5 * m * m / (t * t)) +
           m * std::erf(m / (t * 1.4142135623730951));
}

}  // namespace

std::string PsiSpec::name() const {
    switch (kind) {
        case Kind::Zero: return "zero";
        case Kind::One: return "one";
        case Kind::Identity: return "identity";
        case Kind::Affine: return "affine";
        case Kind::ExpSquare: return "expsq";
    }
    return "?";
}

PsiSpec PsiSpec::parse(const std::string& name) {
    if (name == "zero") return zero();
    if (name == "one") return one();
    if (name == "identity" || name == "y") return identity();
    if (name == "expsq") return exp_square();
    throw ValidationError("unknown psi: " + name);
}

double RegressionProblem::cond_mean_psi(double x) const {
    const double m = model.r(x);
    switch (psi.kind) {
        case PsiSpec::Kind::Zero: return 0.0;
        case PsiSpec::Kind::One: return 1.0;
        case PsiSpec::Kind::Identity: return m;
        case PsiSpec::Kind::Affine: return psi.a * m + psi.b;
        case PsiSpec::Kind::ExpSquare: return gaussian_exp_square_moment(1.0, m, model.tau(x));
    }
    return 0.0;
}

double RegressionProblem::cond_mean_abs_psi(double x) const {
    const double m = model.r(x);
    const double t = model.tau(x);
    switch (psi.kind) {
        case PsiSpec::Kind::Zero: return 0.0;
        case PsiSpec::Kind::One: return 1.0;
        case PsiSpec::Kind::Identity: return folded_normal_mean(m, t);
        case PsiSpec::Kind::Affine:
            if (psi.a == 0.0) return std::abs(psi.b);
            return folded_normal_mean(psi.a * m + psi.b, std::abs(psi.a) * t);
        case PsiSpec::Kind::ExpSquare: return gaussian_exp_square_moment(1.0, m, t);
    }
    return 0.0;
}

double RegressionProblem::cond_mean_psi2(double x) const {
    const double m = model.r(x);
    const double t = model.tau(x);
    switch (psi.kind) {
        case PsiSpec::Kind::Zero: return 0.0;
        case PsiSpec::Kind::One: return 1.0;
        case PsiSpec::Kind::Identity: return m * m + t * t;
        case PsiSpec::Kind::Affine: {
            const double mm = psi.a * m + psi.b;
            return mm * mm + psi.a * psi.a * t * t;
        }
        case PsiSpec::Kind::ExpSquare: return gaussian_exp_square_moment(2.0, m, t);
    }
    return 0.0;
}

double RegressionProblem::target() const {
    return model.stationary_density(x0) * cond_mean_psi(x0);
}

double RegressionProblem::Pf_h(double h, double x) const {
    if (!(h > 0.0)) throw ValidationError("Pf_h: bandwidth must be positive");
    if (kernel.kind == KernelSpec::Kind::Gaussian && psi.kind != PsiSpec::Kind::ExpSquare) {
        // Gaussian kernel times Gaussian transition collapses to one Gaussian
        // factor and a moment of psi's conditional mean under N(mbar, vbar).
        const double s2 = model.sigma * model.sigma;
        const double h2 = h * h;
        const double mu = model.phi * x;
        const double amp = h * normal_pdf(x0, mu, std::sqrt(s2 + h2));
        const double vbar = s2 * h2 / (s2 + h2);
        const double mbar = vbar * (mu / s2 + x0 / h2);
        double emean = 0.0;
        bool closed = true;
        switch (psi.kind) {
            case PsiSpec::Kind::Zero: emean = 0.0; break;
            case PsiSpec::Kind::One: emean = 1.0; break;
            case PsiSpec::Kind::Identity:
            case PsiSpec::Kind::Affine: {
                double er = 0.0;  // E[r(Z)], Z ~ N(mbar, vbar)
                switch (model.r.kind) {
                    case RegressionFn::Kind::Zero: er = 0.0; break;
                    case RegressionFn::Kind::Sin: er = std::sin(mbar) * std::exp(-0.5 * vbar); break;
                    case RegressionFn::Kind::Linear: er = model.r.slope * mbar; break;
                }
                emean = psi.kind == PsiSpec::Kind::Identity ? er : psi.a * er + psi.b;
                break;
            }
            default: closed = false;
        }
        if (closed) return amp * emean;
    }
    if (kernel.compact_support()) {
        // int p(x, z) f_h(z) dz over the kernel's support, z = x0 - h u
        const GaussRule& gl = gauss_legendre(64);
        KahanSum s;
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const double z = x0 - h * gl.nodes[i];
            s.add(gl.weights[i] * model.transition_density(x, z) * kernel(gl.nodes[i]) *
                  cond_mean_psi(z));
        }
        return h * s.value();
    }
    return Pf_h_quadrature(h, x);
}

double RegressionProblem::Pf_h_quadrature(double h, double x) const {
    if (psi.kind == PsiSpec::Kind::ExpSquare &&
        2.0 * model.tau.max_tau() * model.tau.max_tau() >= 1.0)
        return kInf;
    const double mu = model.phi * x;
    const double kw = kernel.compact_support() ? h : 12.0 * h;
    const double lo = std::min(mu - 10.0 * model.sigma, x0 - kw);
    const double hi = std::max(mu + 10.0 * model.sigma, x0 + kw);
    const auto integrand = [&](double z) { return model.transition_density(x, z) * f_h(h, z); };
    // The integrand has two bumps (kernel at x0, transition at mu) that can
    // sit far apart; integrating in one piece lets the adaptive rule sample
    // past a narrow bump and report 0. Cut the interval at both bumps' edges
    // so every piece contains at most one feature.
    std::vector<double> cuts = {lo,
                                x0 - kw,
                                x0 + kw,
                                mu - 3.0 * model.sigma,
                                mu + 3.0 * model.sigma,
                                hi};
    for (double& c : cuts) c = std::min(hi, std::max(lo, c));
    std::sort(cuts.begin(), cuts.end());
    KahanSum total;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] - cuts[i] <= 0.0) continue;
        total.add(integrate_adaptive(integrand, cuts[i], cuts[i + 1], 1e-13).value);
    }
    return total.value();
}

NwResult nw(const Path& path, const RegressionProblem& problem, std::size_t n) {
    if (n < 1) throw ValidationError("nw: n must be >= 1");
    if (path.length() < n) throw ValidationError("nw: path shorter than n");
    const double h = problem.bandwidth.h(n);
    KahanSum num_psi, num_y, den;
    for (std::size_t i = 1; i <= n; ++i) {
        const double k = problem.kernel((problem.x0 - path.x[i]) / h);
        num_psi.add(problem.psi(path.y[i]) * k);
        num_y.add(path.y[i] * k);
        den.add(k);
    }
    NwResult out;
    out.denominator = den.value();
    out.r_hat_psi = num_psi.value() / (static_cast<double>(n) * h);
    out.ratio_defined = out.denominator > 0.0;
    out.r_hat = out.ratio_defined ? num_y.value() / out.denominator
                                  : std::numeric_limits<double>::quiet_NaN();
    return out;
}

QuadratureResult bias_term(const RegressionProblem& problem, std::size_t n) {
    const double h = problem.bandwidth.h(n);
    const double w = problem.kernel.compact_support() ? 1.0 : 12.0;
    const auto integrand = [&](double u) {
        const double z = problem.x0 - h * u;
        return problem.kernel(u) * problem.cond_mean_psi(z) * problem.model.stationary_density(z);
    };
    const QuadratureResult out = integrate_adaptive(integrand, -w, w, 1e-11);
    if (!std::isfinite(out.value)) throw ValidationError("bias_term: quadrature failed");
    return out;
}

PsiCheck check_psi(const RegressionProblem& problem, const LyapunovV& V,
                   const std::vector<double>& grid) {
    if (grid.empty()) throw ValidationError("check_psi: empty grid");
    PsiCheck out;
    double absmax = 0.0;
    for (double x : grid) absmax = std::max(absmax, std::abs(x));

    double inner1 = 0.0, outer1 = 0.0, inner2 = 0.0, outer2 = 0.0;
    for (double x : grid) {
        const double v = V(x);
        const double t1 = (1.0 + std::abs(x)) / std::sqrt(v) * problem.cond_mean_abs_psi(x);
        const double t2 = problem.cond_mean_psi2(x) / v;
        if (!std::isfinite(t1)) out.sup1_finite = false;
        if (!std::isfinite(t2)) out.sup2_finite = false;
        if (t1 > out.sup1) {
            out.sup1 = t1;
            out.sup1_at = x;
        }
        if (t2 > out.sup2) {
            out.sup2 = t2;
            out.sup2_at = x;
        }
        const double band = std::abs(x) / absmax;
        if (band >= 0.8 && band < 0.9) {
            inner1 = std::max(inner1, t1);
            inner2 = std::max(inner2, t2);
        } else if (band >= 0.9) {
            outer1 = std::max(outer1, t1);
            outer2 = std::max(outer2, t2);
        }
    }
    out.growth_flag1 = !out.sup1_finite || outer1 > 1.01 * inner1;
    out.growth_flag2 = !out.sup2_finite || outer2 > 1.01 * inner2;
    return out;
}

Decomposition decomposition_residual(const Path& path, const RegressionProblem& problem,
                                     std::size_t n) {
    Decomposition out;
    const NwResult est = nw(path, problem, n);
    const QuadratureResult bt = bias_term(problem, n);
    const double h = problem.bandwidth.h(n);
    out.r_hat_psi = est.r_hat_psi;
    out.bias = bt.value;
    out.bias_error = bt.error_estimate;
    out.boundary_term =
        (problem.Pf_h(h, path.x[0]) - problem.Pf_h(h, path.x[n])) / (static_cast<double>(n) * h);
    out.martingale_term = out.r_hat_psi - out.bias - out.boundary_term;
    out.oracle = false;
    return out;
}

void FiniteRegressionModel::validate() const {
    const std::size_t m = chain.size();
    if (x_values.size() != m) throw ValidationError("finite regression: x_values size mismatch");
    if (error_values.empty()) throw ValidationError("finite regression: empty error alphabet");
    if (error_probs.size() != m) throw ValidationError("finite regression: error_probs size mismatch");
    for (const auto& row : error_probs) {
        if (row.size() != error_values.size())
            throw ValidationError("finite regression: ragged error_probs");
        double mass = 0.0;
        for (double q : row) {
            if (q < 0.0) throw ValidationError("finite regression: negative error probability");
            mass += q;
        }
        if (std::abs(mass - 1.0) > 1e-12)
            throw ValidationError("finite regression: error probabilities must sum to 1");
    }
}

FiniteRegressionModel::FinitePath FiniteRegressionModel::simulate(std::size_t n,
                                                                  std::uint64_t seed,
                                                                  std::size_t init_state) const {
    validate();
    if (init_state >= chain.size()) throw ValidationError("finite regression: bad initial state");
    Rng rng(seed);
    FinitePath path;
    path.state.resize(n + 1);
    path.letter.resize(n + 1);
    path.x.resize(n + 1);
    path.y.resize(n + 1);
    const auto draw = [&](const auto& probs) {
        const double u = rng.uniform01();
        double acc = 0.0;
        std::size_t pick = probs.size() - 1;
        for (std::size_t j = 0; j < probs.size(); ++j) {
            acc += probs[j];
            if (u < acc) {
                pick = j;
                break;
            }
        }
        return pick;
    };
    for (std::size_t i = 0; i <= n; ++i) {
        if (i == 0) {
            path.state[0] = init_state;
        } else {
            const auto& P = chain.transition();
            const auto prev = static_cast<Eigen::Index>(path.state[i - 1]);
            std::vector<double> row(chain.size());
            for (std::size_t j = 0; j < chain.size(); ++j)
                row[j] = P(prev, static_cast<Eigen::Index>(j));
            path.state[i] = draw(row);
        }
        path.letter[i] = draw(error_probs[path.state[i]]);
        path.x[i] = x_values[path.state[i]];
        path.y[i] = y_value(path.state[i], path.letter[i]);
    }
    return path;
}

namespace {

struct FinitePoissonPieces {
    std::vector<double> kx;    // K((x0 - x_s)/h) per state
    std::vector<double> f;     // f_h per state
    std::vector<double> g;     // Poisson solution, pi(g) = 0
    Eigen::VectorXd pg;        // P g
    Eigen::VectorXd next_mean; // P f + P^2 g = E[H(next) | state]
    double pi_f = 0.0;
};

FinitePoissonPieces finite_poisson_pieces(const FiniteRegressionModel& fm,
                                          const KernelSpec& kernel, const PsiSpec& psi,
                                          double h, double x0) {
    fm.validate();
    if (!(h > 0.0)) throw ValidationError("finite regression: bandwidth must be positive");
    const std::size_t m = fm.chain.size();
    FinitePoissonPieces out;
    out.kx.resize(m);
    out.f.resize(m);
    for (std::size_t s = 0; s < m; ++s) {
        out.kx[s] = kernel((x0 - fm.x_values[s]) / h);
        KahanSum mean_psi;
        for (std::size_t k = 0; k < fm.error_values.size(); ++k)
            mean_psi.add(fm.error_probs[s][k] * psi(fm.y_value(s, k)));
        out.f[s] = out.kx[s] * mean_psi.value();
    }
    const PoissonSolution sol = poisson_solve_finite(fm.chain, out.f);
    out.g = sol.g_solve;
    out.pi_f = sol.pi_f;
    const auto em = static_cast<Eigen::Index>(m);
    Eigen::VectorXd gv(em), fv(em);
    for (std::size_t s = 0; s < m; ++s) {
        gv(static_cast<Eigen::Index>(s)) = out.g[s];
        fv(static_cast<Eigen::Index>(s)) = out.f[s];
    }
    out.pg = fm.chain.transition() * gv;
    out.next_mean = fm.chain.transition() * (fv + out.pg);
    return out;
}

}  // namespace

Decomposition decomposition_oracle(const FiniteRegressionModel& fm,
                                   const FiniteRegressionModel::FinitePath& path,
                                   const KernelSpec& kernel, const PsiSpec& psi, double h,
                                   double x0, std::size_t n) {
    if (n < 1) throw ValidationError("decomposition_oracle: n must be >= 1");
    if (path.state.size() < n + 1) throw ValidationError("decomposition_oracle: path too short");
    const FinitePoissonPieces pieces = finite_poisson_pieces(fm, kernel, psi, h, x0);

    const double nh = static_cast<double>(n) * h;
    KahanSum sum_F, sum_D;
    for (std::size_t k = 1; k <= n; ++k) {
        const std::size_t s = path.state[k];
        const double F = psi(fm.y_value(s, path.letter[k])) * pieces.kx[s];
        const double H = F + pieces.pg(static_cast<Eigen::Index>(s));
        sum_F.add(F);
        sum_D.add(H - pieces.next_mean(static_cast<Eigen::Index>(path.state[k - 1])));
    }
    Decomposition out;
    out.oracle = true;
    out.r_hat_psi = sum_F.value() / nh;
    out.bias = pieces.pi_f / h;
    out.bias_error = 0.0;
    out.martingale_term = sum_D.value() / nh;
    out.boundary_term = (pieces.next_mean(static_cast<Eigen::Index>(path.state[0])) -
                         pieces.next_mean(static_cast<Eigen::Index>(path.state[n]))) /
                        nh;
    return out;
}

PairIdentityReport finite_pair_identity(const FiniteRegressionModel& fm,
                                        const KernelSpec& kernel, const PsiSpec& psi, double h,
                                        double x0) {
    const FinitePoissonPieces pieces = finite_poisson_pieces(fm, kernel, psi, h, x0);
    const std::size_t m = fm.chain.size();
    std::vector<std::vector<double>> state_F(m);
    for (std::size_t s = 0; s < m; ++s) {
        state_F[s].resize(fm.error_values.size());
        for (std::size_t k = 0; k < fm.error_values.size(); ++k)
            state_F[s][k] = psi(fm.y_value(s, k)) * pieces.kx[s];
    }
    return pair_identity_check(fm.chain, state_F, fm.error_probs, pieces.g);
}

ConsistencyReport consistency_experiment(const RegressionProblem& problem,
                                         const std::vector<std::size_t>& n_grid,
                                         std::size_t seeds, std::uint64_t master_seed) {
    if (n_grid.empty()) throw ValidationError("consistency_experiment: empty n grid");
    for (std::size_t i = 1; i < n_grid.size(); ++i)
        if (n_grid[i] <= n_grid[i - 1])
            throw ValidationError("consistency_experiment: n grid must be increasing");
    if (seeds == 0) throw ValidationError("consistency_experiment: need at least one seed");

    problem.model.validate();
    const auto grid = default_check_grid();
    const KernelCheck kc = check_kernel(problem.kernel, grid);
    if (!kc.bounded || !kc.tail || !kc.lipschitz)
        throw ValidationError(std::string("kernel condition fails: ") +
                              (!kc.bounded ? "unbounded" : !kc.tail ? "tail" : "not Lipschitz"));
    const PsiCheck pc = check_psi(problem, LyapunovV::one_plus_x2(), grid);
    if (!pc.sup1_finite || !pc.sup2_finite || pc.growth_flag1 || pc.growth_flag2)
        throw ValidationError("psi moment condition fails: conditional moments grow unbounded");
    const DriftSpec ds = DriftSpec::ar1_default(problem.model.phi, problem.model.sigma);
    const DriftReport dr = drift_margin(problem.model, ds, linspace(-10.0, 10.0, 401));
    if (!dr.holds)
        throw ValidationError("drift condition fails at x = " + format_double(dr.argmin_x));

    ConsistencyReport report;
    report.target = problem.target();
    report.n_grid = n_grid;
    const std::size_t n_max = n_grid.back();

    std::vector<std::vector<double>> errors(n_grid.size());
    std::vector<double> bias_at(n_grid.size());
    for (std::size_t gi = 0; gi < n_grid.size(); ++gi)
        bias_at[gi] = bias_term(problem, n_grid[gi]).value;

    for (std::size_t rep = 0; rep < seeds; ++rep) {
        const Path path =
            problem.model.simulate(n_max, derive_seed(master_seed, rep, "consistency"));
        for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
            const std::size_t n = n_grid[gi];
            const NwResult est = nw(path, problem, n);
            const double h = problem.bandwidth.h(n);
            ConsistencyPoint pt;
            pt.n = n;
            pt.seed = rep;
            pt.r_hat_psi = est.r_hat_psi;
            pt.r_hat = est.r_hat;
            pt.ratio_defined = est.ratio_defined;
            pt.bias = bias_at[gi];
            pt.boundary = (problem.Pf_h(h, path.x[0]) - problem.Pf_h(h, path.x[n])) /
                          (static_cast<double>(n) * h);
            pt.error = std::abs(est.r_hat_psi - report.target);
            report.points.push_back(pt);
            errors[gi].push_back(pt.error);
        }
    }
    report.median_error.resize(n_grid.size());
    report.q95_error.resize(n_grid.size());
    for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
        report.median_error[gi] = median(errors[gi]);
        report.q95_error[gi] = quantile(errors[gi], 0.95);
    }
    report.median_non_increasing = true;
    for (std::size_t gi = 1; gi < n_grid.size(); ++gi)
        if (report.median_error[gi] > report.median_error[gi - 1])
            report.median_non_increasing = false;
    return report;
}

ChainKernelRows::ChainKernelRows(const RegressionProblem& problem, Path path)
    : problem_(problem), path_(std::move(path)) {
    if (path_.x.empty()) throw ValidationError("chain kernel rows: empty path");
    psi_y_.resize(path_.y.size());
    for (std::size_t i = 0; i < path_.y.size(); ++i) psi_y_[i] = problem_.psi(path_.y[i]);
}

double ChainKernelRows::entry(std::size_t n, std::size_t k) const {
    if (k < 1 || k > n || n > horizon())
        throw ValidationError("chain kernel rows: index out of range");
    const double h = problem_.bandwidth.h(n);
    const double F = psi_y_[k] * problem_.kernel((problem_.x0 - path_.x[k]) / h);
    return F - problem_.Pf_h(h, path_.x[k - 1]);
}

void ChainKernelRows::row(std::size_t n, std::vector<double>& out) const {
    if (n < 1 || n > horizon()) throw ValidationError("chain kernel rows: row out of range");
    const double h = problem_.bandwidth.h(n);
    out.resize(n);
    for (std::size_t k = 1; k <= n; ++k) {
        const double F = psi_y_[k] * problem_.kernel((problem_.x0 - path_.x[k]) / h);
        out[k - 1] = F - problem_.Pf_h(h, path_.x[k - 1]);
    }
}

}  // namespace marlab
