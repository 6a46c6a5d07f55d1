#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "marlab/common.hpp"
#include "marlab/kernel.hpp"
#include "marlab/markov.hpp"

namespace marlab {

/// Transform psi applied to the response. Conditional moments given X = x
/// are closed-form for every family (the error is Gaussian given the state),
/// including the divergent exp(y^2) family which exists to exercise the
/// moment-growth rejection path.
struct PsiSpec {
    enum class Kind { Zero, One, Identity, Affine, ExpSquare };
    Kind kind = Kind::One;
    double a = 1.0;  // Affine: a*y + b
    double b = 0.0;

    double operator()(double y) const {
        switch (kind) {
            case Kind::Zero: return 0.0;
            case Kind::One: return 1.0;
            case Kind::Identity: return y;
            case Kind::Affine: return a * y + b;
            case Kind::ExpSquare: return std::exp(y * y);
        }
        return 0.0;
    }

    std::string name() const;
    static PsiSpec parse(const std::string& name);
    static PsiSpec zero() { return {Kind::Zero, 0.0, 0.0}; }
    static PsiSpec one() { return {Kind::One, 0.0, 0.0}; }
    static PsiSpec identity() { return {Kind::Identity, 1.0, 0.0}; }
    static PsiSpec affine(double a, double b) { return {Kind::Affine, a, b}; }
    static PsiSpec exp_square() { return {Kind::ExpSquare, 0.0, 0.0}; }
};

/// h_n = n^{-beta}. The exponent interval is open at both ends; 0 and 1/4
/// are rejected, not clamped.
struct BandwidthSchedule {
    double beta;

    explicit BandwidthSchedule(double beta_) : beta(beta_) {
        if (!(beta > 0.0) || !(beta < 0.25))
            throw ValidationError("bandwidth exponent must lie strictly inside (0, 0.25), got " +
                                  format_double(beta_));
    }
    double h(std::size_t n) const {
        if (n == 0) throw ValidationError("bandwidth needs n >= 1");
        return std::pow(static_cast<double>(n), -beta);
    }
};

/// Everything needed to run the estimator: the chain, the kernel, psi, the
/// bandwidth exponent, and the evaluation point.
struct RegressionProblem {
    Ar1Model model;
    KernelSpec kernel = KernelSpec::gaussian();
    PsiSpec psi = PsiSpec::one();
    BandwidthSchedule bandwidth{0.2};
    double x0 = 0.0;

    // conditional moments of psi(Y) given X = x (may be +inf for ExpSquare)
    double cond_mean_psi(double x) const;
    double cond_mean_abs_psi(double x) const;
    double cond_mean_psi2(double x) const;

    /// pi(x0) E[psi(Y) | X = x0]: the almost-sure limit of r_hat_psi.
    double target() const;

    double F_h(double h, double x, double y) const { return psi(y) * kernel((x0 - x) / h); }
    double f_h(double h, double x) const { return kernel((x0 - x) / h) * cond_mean_psi(x); }
    /// One-step conditional mean E[f_h(X_k) | X_{k-1} = x]. Closed form for
    /// the Gaussian kernel with polynomial/sine psi-means, quadrature else.
    double Pf_h(double h, double x) const;
    /// Always-quadrature version of Pf_h, kept as an oracle for the closed form.
    double Pf_h_quadrature(double h, double x) const;
};

/// Estimator values on a simulated path, using observations 1..n.
struct NwResult {
    double r_hat_psi = 0.0;
    double r_hat = 0.0;        // meaningful only when ratio_defined
    bool ratio_defined = false;
    double denominator = 0.0;  // sum of kernel weights
};

NwResult nw(const Path& path, const RegressionProblem& problem, std::size_t n);

/// Smoothed-target integral (1/h_n) int K((x0-x)/h_n) E[psi(Y)|X=x] pi(x) dx,
/// with the quadrature's own error estimate.
QuadratureResult bias_term(const RegressionProblem& problem, std::size_t n);

struct PsiCheck {
    double sup1 = 0.0;       // sup V^{-1/2}(x)(1+|x|) E[|psi(Y)| | X=x]
    double sup1_at = 0.0;
    bool sup1_finite = true;
    double sup2 = 0.0;       // sup V^{-1}(x) E[psi^2(Y) | X=x]
    double sup2_at = 0.0;
    bool sup2_finite = true;
    bool growth_flag1 = false;  // still rising at the edge of the grid
    bool growth_flag2 = false;
};

/// Grid sups with argmax witnesses. Infinite closed-form moments clear the
/// finite flags; values still rising at the grid edge set the growth flags.
PsiCheck check_psi(const RegressionProblem& problem, const LyapunovV& V,
                   const std::vector<double>& grid);

/// Three-term split of r_hat_psi. In residual mode (continuous chain) the
/// martingale term is defined by subtraction and the boundary term is the
/// computable proxy (n h)^{-1} (Pf(X_0) - Pf(X_n)).
struct Decomposition {
    double r_hat_psi = 0.0;
    double bias = 0.0;
    double bias_error = 0.0;  // quadrature error estimate (residual mode)
    double martingale_term = 0.0;
    double boundary_term = 0.0;
    bool oracle = false;
};

Decomposition decomposition_residual(const Path& path, const RegressionProblem& problem,
                                     std::size_t n);

/// Finite-state regression testbed: states carry x-values, errors come from
/// a finite letter alphabet with per-state probabilities. Everything the
/// decomposition needs (Poisson solution, conditional means) is an exact
/// finite sum here.
struct FiniteRegressionModel {
    FiniteChain chain;
    std::vector<double> x_values;                  // per state
    std::vector<double> error_values;              // shared letters
    std::vector<std::vector<double>> error_probs;  // state x letter
    RegressionFn r = RegressionFn::sine();

    void validate() const;
    double y_value(std::size_t state, std::size_t letter) const {
        return r(x_values[state]) + error_values[letter];
    }

    struct FinitePath {
        std::vector<std::size_t> state;   // s_0 .. s_n
        std::vector<std::size_t> letter;  // k_0 .. k_n
        std::vector<double> x, y;
    };
    FinitePath simulate(std::size_t n, std::uint64_t seed, std::size_t init_state = 0) const;
};

/// Exact decomposition on the finite oracle; the three terms sum to
/// r_hat_psi to machine precision, and the Poisson solution comes from
/// poisson_solve_finite.
Decomposition decomposition_oracle(const FiniteRegressionModel& fm,
                                   const FiniteRegressionModel::FinitePath& path,
                                   const KernelSpec& kernel, const PsiSpec& psi, double h,
                                   double x0, std::size_t n);

/// Runs pair_identity_check on the finite model for bandwidth h: builds
/// F(state, letter), solves the Poisson equation for f, and returns the
/// identity residual report.
PairIdentityReport finite_pair_identity(const FiniteRegressionModel& fm,
                                        const KernelSpec& kernel, const PsiSpec& psi, double h,
                                        double x0);

struct ConsistencyPoint {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    double r_hat_psi = 0.0;
    double r_hat = 0.0;
    bool ratio_defined = false;
    double bias = 0.0;
    double boundary = 0.0;
    double error = 0.0;  // |r_hat_psi - target|
};

struct ConsistencyReport {
    double target = 0.0;
    std::vector<std::size_t> n_grid;
    std::vector<double> median_error;  // per grid point
    std::vector<double> q95_error;
    std::vector<ConsistencyPoint> points;  // row per (n, seed)
    bool median_non_increasing = false;
};

/// Error-curve experiment behind the consistency claim. Validates the model,
/// the kernel conditions, the psi moment conditions and the drift condition
/// before running; throws ValidationError naming the failing precondition.
ConsistencyReport consistency_experiment(const RegressionProblem& problem,
                                         const std::vector<std::size_t>& n_grid,
                                         std::size_t seeds, std::uint64_t master_seed);

/// Row engine for chain-driven martingale arrays: row n has entries
/// D_{n,k} = F_{h_n}(X_k, Y_k) - E[F_{h_n}(X_k, Y_k) | X_{k-1}], k = 1..n,
/// sharing one simulated path across rows. The conditional mean is Pf_{h_n}
/// evaluated at X_{k-1}, so each entry is exactly mean-zero given the past.
class ChainKernelRows {
public:
    ChainKernelRows(const RegressionProblem& problem, Path path);

    double h(std::size_t n) const { return problem_.bandwidth.h(n); }
    /// D_{n,k}, 1 <= k <= n <= horizon.
    double entry(std::size_t n, std::size_t k) const;
    void row(std::size_t n, std::vector<double>& out) const;
    std::size_t horizon() const { return path_.length(); }
    const Path& path() const { return path_; }
    const RegressionProblem& problem() const { return problem_; }

private:
    RegressionProblem problem_;
    Path path_;
    std::vector<double> psi_y_;  // psi(Y_k), cached
};

}  // namespace marlab
