#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "marlab/common.hpp"
#include "marlab/rng.hpp"

namespace marlab {

/// Named regression functions y = r(x). Named families keep configs
/// archivable and give closed-form conditional moments where they exist.
struct RegressionFn {
    enum class Kind { Zero, Sin, Linear };
    Kind kind = Kind::Zero;
    double slope = 1.0;  // Linear only

    double operator()(double x) const {
        switch (kind) {
            case Kind::Zero: return 0.0;
            case Kind::Sin: return std::sin(x);
            case Kind::Linear: return slope * x;
        }
        return 0.0;
    }

    static RegressionFn zero() { return {Kind::Zero, 0.0}; }
    static RegressionFn sine() { return {Kind::Sin, 0.0}; }
    static RegressionFn linear(double a) { return {Kind::Linear, a}; }
    static RegressionFn parse(const std::string& name);
    std::string name() const;
};

/// Error standard deviation tau(x); bounded families only.
struct TauSpec {
    enum class Kind { Constant, Wave };
    Kind kind = Kind::Constant;
    double tau0 = 1.0;

    double operator()(double x) const {
        if (kind == Kind::Wave) {
            const double s = std::sin(x);
            return tau0 * (1.0 + 0.5 * s * s);
        }
        return tau0;
    }
    double max_tau() const { return kind == Kind::Wave ? 1.5 * tau0 : tau0; }

    static TauSpec constant(double t) { return {Kind::Constant, t}; }
    static TauSpec wave(double t) { return {Kind::Wave, t}; }
};

struct InitSpec {
    enum class Kind { Delta, Gaussian, Stationary };
    Kind kind = Kind::Delta;
    double x0 = 0.0;   // Delta
    double mu = 0.0;   // Gaussian
    double sd = 1.0;   // Gaussian

    static InitSpec delta(double x) { return {Kind::Delta, x, 0.0, 0.0}; }
    static InitSpec gaussian(double m, double s) { return {Kind::Gaussian, 0.0, m, s}; }
    static InitSpec stationary() { return {Kind::Stationary, 0.0, 0.0, 0.0}; }
};

struct Path {
    std::vector<double> x;    // X_0 .. X_n
    std::vector<double> eps;  // eps_0 .. eps_n
    std::vector<double> y;    // Y_i = r(X_i) + eps_i
    std::size_t length() const { return x.empty() ? 0 : x.size() - 1; }
};

/// Joint chain (X_i, eps_i): X moves by an AR(1) Gaussian kernel
/// X' = phi X + sigma Z, then eps ~ N(0, tau^2(X')) given the new state.
/// Construction is permissive (degenerate sigma = 0 simulates fine);
/// validate() enforces the conditions the experiments rely on.
struct Ar1Model {
    double phi = 0.5;
    double sigma = 1.0;
    TauSpec tau = TauSpec::constant(0.5);
    RegressionFn r = RegressionFn::sine();
    InitSpec init = InitSpec::delta(0.0);

    double transition_density(double x, double z) const;
    double error_density(double x, double e) const;

    bool has_stationary() const { return std::abs(phi) < 1.0 && sigma > 0.0; }
    double stationary_sd() const;
    double stationary_density(double x) const;

    /// Checks |phi| < 1, nondegenerate kernels, unit-mass densities
    /// (quadrature, 1e-6) and that the stationary mean of the error is zero.
    /// Throws ValidationError describing the first failure.
    void validate() const;

    Path simulate(std::size_t n, std::uint64_t seed) const;
};

/// Lyapunov function family for drift checks. scale >= 1 keeps V >= 1.
struct LyapunovV {
    enum class Kind { OnePlusX2, ConstantOne, Custom };
    Kind kind = Kind::OnePlusX2;
    double scale = 1.0;
    std::function<double(double)> custom;

    double operator()(double x) const {
        switch (kind) {
            case Kind::OnePlusX2: return scale * (1.0 + x * x);
            case Kind::ConstantOne: return scale;
            case Kind::Custom: return custom(x);
        }
        return 0.0;
    }
    static LyapunovV one_plus_x2(double scale = 1.0) { return {Kind::OnePlusX2, scale, {}}; }
    static LyapunovV constant_one() { return {Kind::ConstantOne, 1.0, {}}; }
};

struct DriftSpec {
    LyapunovV V = LyapunovV::one_plus_x2();
    double lambda_d = 0.5;           // drift rate, in (0,1)
    double b = 1.5;                  // offset on the small set
    double small_set_lo = -2.449489742783178;
    double small_set_hi = 2.449489742783178;

    bool in_small_set(double x) const { return x >= small_set_lo && x <= small_set_hi; }
    void validate(const std::vector<double>& grid) const;

    /// A spec that provably satisfies the drift condition for the AR(1)
    /// family with V = 1 + x^2.
    static DriftSpec ar1_default(double phi, double sigma);
};

/// One-step expectation of V under the AR(1) kernel. Closed form for the
/// named V families, Gauss-Hermite for custom V.
double apply_kernel_to_V(const Ar1Model& model, const LyapunovV& V, double x);

struct DriftReport {
    double min_margin = 0.0;
    double argmin_x = 0.0;
    std::vector<double> grid;
    std::vector<double> margin;  // lambda_d V + b 1_C - PV at each grid point
    bool holds = false;
};

DriftReport drift_margin(const Ar1Model& model, const DriftSpec& spec,
                         const std::vector<double>& grid);

struct MomentBoundReport {
    double bound = 0.0;  // mu(V) + b/(1-lambda_d)
    double mu_V = 0.0;
    double sup_estimate = 0.0;
    std::size_t sup_at_n = 0;
    double std_error_at_sup = 0.0;
    std::vector<double> per_n_estimate;
    bool holds = false;  // sup_estimate <= bound + 3 SE
};

MomentBoundReport stationary_moment_bound(const Ar1Model& model, const DriftSpec& spec,
                                          std::size_t n_max, std::size_t replicates,
                                          std::uint64_t seed);

/// Finite-state chain: the exact oracle counterpart of the continuous model.
class FiniteChain {
public:
    explicit FiniteChain(Eigen::MatrixXd transition);
    static FiniteChain from_rows(const std::vector<std::vector<double>>& rows);
    static FiniteChain from_file(const std::string& path);
    static FiniteChain two_state(double a, double b);
    /// Strictly positive random rows; such chains are ergodic.
    static FiniteChain random_ergodic(std::size_t m, Rng& rng, double floor = 0.05);

    std::size_t size() const { return static_cast<std::size_t>(P_.rows()); }
    const Eigen::MatrixXd& transition() const { return P_; }
    const Eigen::VectorXd& stationary() const { return pi_; }
    double stationary_dot(const Eigen::VectorXd& f) const { return pi_.dot(f); }

    double row_sum_defect() const;        // max_i |sum_j P_ij - 1|
    double invariance_defect() const;     // || pi^T P - pi^T ||_inf

    std::vector<std::size_t> simulate_states(std::size_t n, std::uint64_t seed,
                                             std::size_t init_state = 0) const;

private:
    Eigen::MatrixXd P_;
    Eigen::VectorXd pi_;
};

struct ErgodicityReport {
    double rho = 1.0;          // second-largest eigenvalue modulus
    bool ergodic = false;      // rho < 1 (within 1e-9)
    double prefactor = 0.0;    // fitted C with ||Pbar^n f||_inf <= C rho^n
    double decay_slope = 0.0;  // fitted log-decay per step; compare to log(rho)
    std::size_t fit_points = 0;
};

ErgodicityReport ergodicity_rate(const FiniteChain& chain);

struct PoissonSolution {
    std::vector<double> g_solve;        // linear solve, normalized to pi(g) = 0
    std::vector<double> g_series;       // truncated series sum
    double residual_solve = 0.0;        // ||g - Pg - fbar||_inf
    double residual_series = 0.0;
    double series_tail_bound = 0.0;     // C rho^{L+1} / (1 - rho)
    double rho = 0.0;
    std::size_t terms_used = 0;
    double pi_f = 0.0;
};

/// Solves g - Pg = f - pi(f) two independent ways: a fundamental-matrix
/// linear solve and the truncated Neumann series sum_{l<=L} (P^l f - pi(f)).
/// Both are normalized so that pi(g) = 0, which is the series' own
/// normalization. L = 0 picks L from the geometric tail automatically.
PoissonSolution poisson_solve_finite(const FiniteChain& chain, const std::vector<double>& f,
                                     std::size_t L = 0);

/// ||g - Pg - (f - pi(f))||_inf for a candidate solution.
double poisson_residual(const FiniteChain& chain, const std::vector<double>& f,
                        const std::vector<double>& g);

struct PairIdentityReport {
    double max_residual = 0.0;
    bool holds = false;  // max residual <= 1e-10
};

/// Verifies the pairwise identity F(x,y) - pi(f) = H(x,y) - E[H(next)|x]
/// with H = F + Pg, on a finite chain with a finite error alphabet.
/// state_F(s,k) is F evaluated at state s and error letter k; error_probs
/// rows give the letter distribution per state; f[s] = sum_k q(s,k) F(s,k)
/// is derived internally.
PairIdentityReport pair_identity_check(const FiniteChain& chain,
                                       const std::vector<std::vector<double>>& state_F,
                                       const std::vector<std::vector<double>>& error_probs,
                                       const std::vector<double>& g);

}  // namespace marlab
