#include "marlab/markov.hpp"

#include <Eigen/Eigenvalues>

#include "marlab/quadrature.hpp"

namespace marlab {

RegressionFn RegressionFn::parse(const std::string& name) {
    if (name == "zero") return zero();
    if (name == "sin") return sine();
    if (name == "identity" || name == "linear") return linear(1.0);
    throw ValidationError("unknown regression function: " + name);
}

std::string RegressionFn::name() const {
    switch (kind) {
        case Kind::Zero: return "zero";
        case Kind::Sin: return "sin";
        case Kind::Linear: return slope == 1.0 ? "identity" : "linear";
    }
    return "?";
}

double Ar1Model::transition_density(double x, double z) const {
    if (!(sigma > 0.0)) throw ValidationError("transition density undefined for sigma = 0");
    return normal_pdf(z, phi * x, sigma);
}

double Ar1Model::error_density(double x, double e) const {
    const double t = tau(x);
    if (!(t > 0.0)) throw ValidationError("error density undefined for tau = 0");
    return normal_pdf(e, 0.0, t);
}

double Ar1Model::stationary_sd() const {
    if (!has_stationary()) throw ValidationError("no stationary law: need |phi| < 1, sigma > 0");
    return sigma / std::sqrt(1.0 - phi * phi);
}

double Ar1Model::stationary_density(double x) const {
    return normal_pdf(x, 0.0, stationary_sd());
}

void Ar1Model::validate() const {
    if (!(std::abs(phi) < 1.0))
        throw ValidationError("chain validation: |phi| must be < 1, got phi = " +
                              format_double(phi));
    if (!(sigma > 0.0))
        throw ValidationError(
            "chain validation: sigma = 0 gives a degenerate transition kernel with no "
            "density; the chain cannot be irreducible");
    if (!(tau.tau0 > 0.0))
        throw ValidationError("chain validation: error kernel needs tau > 0");

    // unit mass of both kernels on a wide window
    for (double x : {-3.0, 0.0, 2.5}) {
        const double m = phi * x;
        auto px = [&](double z) { return transition_density(x, z); };
        const double mass = integrate_adaptive(px, m - 12.0 * sigma, m + 12.0 * sigma, 1e-9).value;
        if (std::abs(mass - 1.0) > 1e-6)
            throw ValidationError("chain validation: transition density mass " +
                                  format_double(mass) + " at x = " + format_double(x));
        const double t = tau(x);
        auto qe = [&](double e) { return error_density(x, e); };
        const double emass = integrate_adaptive(qe, -12.0 * t, 12.0 * t, 1e-9).value;
        if (std::abs(emass - 1.0) > 1e-6)
            throw ValidationError("chain validation: error density mass " + format_double(emass) +
                                  " at x = " + format_double(x));
    }

    // stationary mean of the error term must vanish
    const double s = stationary_sd();
    auto integrand = [&](double x) {
        const double t = tau(x);
        auto moment = [&](double e) { return e * error_density(x, e); };
        const double inner = integrate_adaptive(moment, -12.0 * t, 12.0 * t, 1e-10).value;
        return stationary_density(x) * inner;
    };
    const double mean_err = integrate_adaptive(integrand, -10.0 * s, 10.0 * s, 1e-8).value;
    if (std::abs(mean_err) > 1e-6)
        throw ValidationError("chain validation: stationary error mean " +
                              format_double(mean_err) + " is not 0");
}

Path Ar1Model::simulate(std::size_t n, std::uint64_t seed) const {
    Rng rng(seed);
    Path path;
    path.x.resize(n + 1);
    path.eps.resize(n + 1);
    path.y.resize(n + 1);
    double x;
    switch (init.kind) {
        case InitSpec::Kind::Delta: x = init.x0; break;
        case InitSpec::Kind::Gaussian: x = init.mu + init.sd * rng.normal(); break;
        case InitSpec::Kind::Stationary: x = stationary_sd() * rng.normal(); break;
        default: x = 0.0;
    }
    for (std::size_t i = 0; i <= n; ++i) {
        if (i > 0) x = phi * x + sigma * rng.normal();
        const double e = tau(x) * rng.normal();
        path.x[i] = x;
        path.eps[i] = e;
        path.y[i] = r(x) + e;
    }
    return path;
}

void DriftSpec::validate(const std::vector<double>& grid) const {
    if (!(lambda_d > 0.0 && lambda_d < 1.0))
        throw ValidationError("drift spec: lambda_d must lie in (0,1)");
    if (!(b >= 0.0)) throw ValidationError("drift spec: b must be >= 0");
    if (small_set_lo > small_set_hi) throw ValidationError("drift spec: empty small set");
    for (double x : grid)
        if (V(x) < 1.0 - 1e-12)
            throw ValidationError("drift spec: V(" + format_double(x) + ") = " +
                                  format_double(V(x)) + " < 1");
}

DriftSpec DriftSpec::ar1_default(double phi, double sigma) {
    if (!(std::abs(phi) < 1.0)) throw ValidationError("ar1_default: |phi| must be < 1");
    DriftSpec spec;
    spec.V = LyapunovV::one_plus_x2();
    spec.lambda_d = 0.5 * (1.0 + phi * phi);
    spec.b = 1.0 + sigma * sigma;
    const double xc =
        std::sqrt((1.0 + sigma * sigma - spec.lambda_d) / (spec.lambda_d - phi * phi));
    spec.small_set_lo = -xc;
    spec.small_set_hi = xc;
    return spec;
}

double apply_kernel_to_V(const Ar1Model& model, const LyapunovV& V, double x) {
    switch (V.kind) {
        case LyapunovV::Kind::OnePlusX2:
            return V.scale * (1.0 + model.phi * model.phi * x * x + model.sigma * model.sigma);
        case LyapunovV::Kind::ConstantOne:
            return V.scale;
        case LyapunovV::Kind::Custom: {
            const GaussRule& gh = gauss_hermite(128);
            KahanSum s;
            for (std::size_t j = 0; j < gh.nodes.size(); ++j)
                s.add(gh.weights[j] * V.custom(model.phi * x + model.sigma * gh.nodes[j]));
            const double v = s.value();
            if (!std::isfinite(v))
                throw ValidationError("PV quadrature did not converge at x = " + format_double(x));
            return v;
        }
    }
    return 0.0;
}

DriftReport drift_margin(const Ar1Model& model, const DriftSpec& spec,
                         const std::vector<double>& grid) {
    if (grid.empty()) throw ValidationError("drift_margin: empty grid");
    spec.validate(grid);
    DriftReport report;
    report.grid = grid;
    report.margin.reserve(grid.size());
    report.min_margin = kInf;
    for (double x : grid) {
        const double pv = apply_kernel_to_V(model, spec.V, x);
        const double m =
            spec.lambda_d * spec.V(x) + (spec.in_small_set(x) ? spec.b : 0.0) - pv;
        report.margin.push_back(m);
        if (m < report.min_margin) {
            report.min_margin = m;
            report.argmin_x = x;
        }
    }
    report.holds = report.min_margin >= 0.0;
    return report;
}

MomentBoundReport stationary_moment_bound(const Ar1Model& model, const DriftSpec& spec,
                                          std::size_t n_max, std::size_t replicates,
                                          std::uint64_t seed) {
    if (replicates == 0) throw ValidationError("stationary_moment_bound: replicates = 0");
    MomentBoundReport report;

    switch (model.init.kind) {
        case InitSpec::Kind::Delta: report.mu_V = spec.V(model.init.x0); break;
        case InitSpec::Kind::Gaussian: {
            const GaussRule& gh = gauss_hermite(96);
            KahanSum s;
            for (std::size_t j = 0; j < gh.nodes.size(); ++j)
                s.add(gh.weights[j] * spec.V(model.init.mu + model.init.sd * gh.nodes[j]));
            report.mu_V = s.value();
            break;
        }
        case InitSpec::Kind::Stationary: {
            const double sd = model.stationary_sd();
            const GaussRule& gh = gauss_hermite(96);
            KahanSum s;
            for (std::size_t j = 0; j < gh.nodes.size(); ++j)
                s.add(gh.weights[j] * spec.V(sd * gh.nodes[j]));
            report.mu_V = s.value();
            break;
        }
    }
    if (!std::isfinite(report.mu_V)) throw ValidationError("mu(V) diverges for this start");
    report.bound = report.mu_V + spec.b / (1.0 - spec.lambda_d);

    std::vector<KahanSum> sums(n_max + 1), sq_sums(n_max + 1);
    for (std::size_t rep = 0; rep < replicates; ++rep) {
        const Path path = model.simulate(n_max, derive_seed(seed, rep, "moment-bound"));
        for (std::size_t i = 0; i <= n_max; ++i) {
            const double v = spec.V(path.x[i]);
            sums[i].add(v);
            sq_sums[i].add(v * v);
        }
    }
    const double R = static_cast<double>(replicates);
    report.per_n_estimate.resize(n_max + 1);
    report.sup_estimate = -kInf;
    for (std::size_t i = 0; i <= n_max; ++i) {
        const double m = sums[i].value() / R;
        report.per_n_estimate[i] = m;
        if (m > report.sup_estimate) {
            report.sup_estimate = m;
            report.sup_at_n = i;
            const double var = std::max(0.0, sq_sums[i].value() / R - m * m);
            report.std_error_at_sup = std::sqrt(var / R);
        }
    }
    report.holds = report.sup_estimate <= report.bound + 3.0 * report.std_error_at_sup;
    return report;
}

FiniteChain::FiniteChain(Eigen::MatrixXd transition) : P_(std::move(transition)) {
    if (P_.rows() != P_.cols() || P_.rows() == 0)
        throw ValidationError("finite chain: transition matrix must be square and nonempty");
    const auto m = P_.rows();
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            if (P_(i, j) < -1e-12)
                throw ValidationError("finite chain: negative transition probability");
    if (row_sum_defect() > 1e-12)
        throw ValidationError("finite chain: rows must sum to 1 (defect " +
                              format_double(row_sum_defect()) + ")");

    // stationary vector: (P^T - I) pi = 0 with sum(pi) = 1 imposed on the last row
    Eigen::MatrixXd A = P_.transpose() - Eigen::MatrixXd::Identity(m, m);
    A.row(m - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    rhs(m - 1) = 1.0;
    pi_ = A.fullPivLu().solve(rhs);
    for (Eigen::Index i = 0; i < m; ++i) pi_(i) = std::max(pi_(i), 0.0);
    const double total = pi_.sum();
    if (!(total > 0.0)) throw ValidationError("finite chain: stationary solve failed");
    pi_ /= total;
}

FiniteChain FiniteChain::from_rows(const std::vector<std::vector<double>>& rows) {
    const auto m = rows.size();
    Eigen::MatrixXd P(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        if (rows[i].size() != m)
            throw ValidationError("finite chain: matrix is not square");
        for (std::size_t j = 0; j < m; ++j)
            P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    return FiniteChain(std::move(P));
}

FiniteChain FiniteChain::from_file(const std::string& path) {
    const auto rows = read_numeric_rows(path);
    if (rows.empty()) throw ValidationError("chain file is empty: " + path);
    return from_rows(rows);
}

FiniteChain FiniteChain::two_state(double a, double b) {
    if (a < 0.0 || a > 1.0 || b < 0.0 || b > 1.0)
        throw ValidationError("two_state: a, b must lie in [0,1]");
    Eigen::MatrixXd P(2, 2);
    P << 1.0 - a, a, b, 1.0 - b;
    return FiniteChain(std::move(P));
}

FiniteChain FiniteChain::random_ergodic(std::size_t m, Rng& rng, double floor) {
    Eigen::MatrixXd P(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        double total = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double w = floor + rng.uniform01();
            P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w;
            total += w;
        }
        P.row(static_cast<Eigen::Index>(i)) /= total;
    }
    return FiniteChain(std::move(P));
}

double FiniteChain::row_sum_defect() const {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < P_.rows(); ++i)
        worst = std::max(worst, std::abs(P_.row(i).sum() - 1.0));
    return worst;
}

double FiniteChain::invariance_defect() const {
    return (pi_.transpose() * P_ - pi_.transpose()).cwiseAbs().maxCoeff();
}

std::vector<std::size_t> FiniteChain::simulate_states(std::size_t n, std::uint64_t seed,
                                                      std::size_t init_state) const {
    if (init_state >= size()) throw ValidationError("simulate_states: bad initial state");
    Rng rng(seed);
    std::vector<std::size_t> states(n + 1);
    states[0] = init_state;
    for (std::size_t i = 1; i <= n; ++i) {
        const double u = rng.uniform01();
        double acc = 0.0;
        std::size_t next = size() - 1;
        for (std::size_t j = 0; j < size(); ++j) {
            acc += P_(static_cast<Eigen::Index>(states[i - 1]), static_cast<Eigen::Index>(j));
            if (u < acc) {
                next = j;
                break;
            }
        }
        states[i] = next;
    }
    return states;
}

ErgodicityReport ergodicity_rate(const FiniteChain& chain) {
    const auto m = static_cast<Eigen::Index>(chain.size());
    Eigen::EigenSolver<Eigen::MatrixXd> es(chain.transition());
    std::vector<double> moduli(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) moduli[static_cast<std::size_t>(i)] = std::abs(es.eigenvalues()(i));
    std::sort(moduli.begin(), moduli.end(), std::greater<double>());

    ErgodicityReport report;
    report.rho = m > 1 ? moduli[1] : 0.0;
    if (report.rho < 1e-14) report.rho = 0.0;
    report.ergodic = report.rho < 1.0 - 1e-9;

    // decay of centered iterates for the standard-basis test functions
    std::vector<Eigen::VectorXd> v(chain.size());
    for (std::size_t j = 0; j < chain.size(); ++j) {
        Eigen::VectorXd f = Eigen::VectorXd::Zero(m);
        f(static_cast<Eigen::Index>(j)) = 1.0;
        v[j] = f - Eigen::VectorXd::Constant(m, chain.stationary_dot(f));
    }
    std::vector<double> log_decay;  // log d_l for l = 1, 2, ...
    double prefactor = 0.0;
    const std::size_t L = 40;
    for (std::size_t l = 0; l <= L; ++l) {
        double d = 0.0;
        for (auto& w : v) d = std::max(d, w.cwiseAbs().maxCoeff());
        if (d <= 1e-250) break;
        if (report.rho > 0.0) prefactor = std::max(prefactor, d / std::pow(report.rho, double(l)));
        if (l >= 1) log_decay.push_back(std::log(d));
        for (auto& w : v) w = chain.transition() * w;
    }
    if (report.rho == 0.0) prefactor = 1.0;
    report.prefactor = prefactor;
    // geometric decay means log d_l is affine in l; its slope estimates log rho
    report.fit_points = log_decay.size();
    if (log_decay.size() >= 2) {
        KahanSum sx, sy, sxx, sxy;
        for (std::size_t i = 0; i < log_decay.size(); ++i) {
            const double l = static_cast<double>(i + 1);
            sx.add(l);
            sy.add(log_decay[i]);
            sxx.add(l * l);
            sxy.add(l * log_decay[i]);
        }
        const double n = static_cast<double>(log_decay.size());
        report.decay_slope = (sxy.value() - sx.value() * sy.value() / n) /
                             (sxx.value() - sx.value() * sx.value() / n);
    } else {
        report.decay_slope = -kInf;
    }
    return report;
}

PoissonSolution poisson_solve_finite(const FiniteChain& chain, const std::vector<double>& f,
                                     std::size_t L) {
    const auto m = static_cast<Eigen::Index>(chain.size());
    if (f.size() != chain.size())
        throw ValidationError("poisson_solve_finite: f has wrong length");
    const ErgodicityReport erg = ergodicity_rate(chain);
    if (!erg.ergodic)
        throw ValidationError("poisson_solve_finite: chain is not ergodic (rho = " +
                              format_double(erg.rho) + ")");

    PoissonSolution sol;
    sol.rho = erg.rho;
    Eigen::VectorXd fv(m);
    for (Eigen::Index i = 0; i < m; ++i) fv(i) = f[static_cast<std::size_t>(i)];
    sol.pi_f = chain.stationary_dot(fv);
    const Eigen::VectorXd fbar = fv - Eigen::VectorXd::Constant(m, sol.pi_f);

    // fundamental-matrix solve; the rank-one term pins pi(g) = 0
    const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(m, m) - chain.transition() +
                              Eigen::VectorXd::Ones(m) * chain.stationary().transpose();
    const Eigen::VectorXd g = A.partialPivLu().solve(fbar);

    // truncated series: sum_{l=0..L} P^l fbar
    const double fscale = std::max(1.0, fbar.cwiseAbs().maxCoeff());
    const bool auto_len = (L == 0);
    const std::size_t max_terms = auto_len ? 100000 : L;
    Eigen::VectorXd term = fbar;
    Eigen::VectorXd acc = term;
    double tail_prefactor = fbar.cwiseAbs().maxCoeff();
    std::size_t l = 0;
    while (l < max_terms) {
        term = chain.transition() * term;
        ++l;
        acc += term;
        const double norm = term.cwiseAbs().maxCoeff();
        if (sol.rho > 0.0)
            tail_prefactor = std::max(tail_prefactor, norm / std::pow(sol.rho, double(l)));
        if (auto_len && norm < 1e-15 * fscale) break;
    }
    sol.terms_used = l;
    sol.series_tail_bound =
        sol.rho > 0.0 ? tail_prefactor * std::pow(sol.rho, double(l + 1)) / (1.0 - sol.rho) : 0.0;

    sol.g_solve.assign(g.data(), g.data() + m);
    sol.g_series.assign(acc.data(), acc.data() + m);
    sol.residual_solve = poisson_residual(chain, f, sol.g_solve);
    sol.residual_series = poisson_residual(chain, f, sol.g_series);
    return sol;
}

double poisson_residual(const FiniteChain& chain, const std::vector<double>& f,
                        const std::vector<double>& g) {
    const auto m = static_cast<Eigen::Index>(chain.size());
    if (f.size() != chain.size() || g.size() != chain.size())
        throw ValidationError("poisson_residual: length mismatch");
    Eigen::VectorXd fv(m), gv(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        fv(i) = f[static_cast<std::size_t>(i)];
        gv(i) = g[static_cast<std::size_t>(i)];
    }
    const double pif = chain.stationary_dot(fv);
    const Eigen::VectorXd res = gv - chain.transition() * gv -
                                (fv - Eigen::VectorXd::Constant(m, pif));
    return res.cwiseAbs().maxCoeff();
}

PairIdentityReport pair_identity_check(const FiniteChain& chain,
                                       const std::vector<std::vector<double>>& state_F,
                                       const std::vector<std::vector<double>>& error_probs,
                                       const std::vector<double>& g) {
    const std::size_t m = chain.size();
    if (state_F.size() != m || error_probs.size() != m || g.size() != m)
        throw ValidationError("pair_identity_check: size mismatch");
    const std::size_t K = state_F[0].size();
    for (std::size_t s = 0; s < m; ++s) {
        if (state_F[s].size() != K || error_probs[s].size() != K)
            throw ValidationError("pair_identity_check: ragged error alphabet");
        double mass = 0.0;
        for (double q : error_probs[s]) mass += q;
        if (std::abs(mass - 1.0) > 1e-12)
            throw ValidationError("pair_identity_check: error probabilities must sum to 1");
    }

    const auto em = static_cast<Eigen::Index>(m);
    Eigen::VectorXd f(em), gv(em);
    for (std::size_t s = 0; s < m; ++s) {
        KahanSum fs;
        for (std::size_t k = 0; k < K; ++k) fs.add(error_probs[s][k] * state_F[s][k]);
        f(static_cast<Eigen::Index>(s)) = fs.value();
        gv(static_cast<Eigen::Index>(s)) = g[s];
    }
    const double pif = chain.stationary_dot(f);
    const Eigen::VectorXd Pg = chain.transition() * gv;
    const Eigen::VectorXd cond_next = chain.transition() * (f + Pg);  // Pf + P^2 g

    PairIdentityReport report;
    for (std::size_t s = 0; s < m; ++s) {
        for (std::size_t k = 0; k < K; ++k) {
            const double H = state_F[s][k] + Pg(static_cast<Eigen::Index>(s));
            const double lhs = state_F[s][k] - pif;
            const double rhs = H - cond_next(static_cast<Eigen::Index>(s));
            report.max_residual = std::max(report.max_residual, std::abs(lhs - rhs));
        }
    }
    report.holds = report.max_residual <= 1e-10;
    return report;
}

}  // namespace marlab
