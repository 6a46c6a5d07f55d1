#include "marlab/quadrature.hpp"

#include <Eigen/Dense>
#include <map>
#include <mutex>

#include "marlab/common.hpp"

namespace marlab {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

void adapt(const std::function<double(double)>& f, double a, double fa, double b, double fb,
           double fm, double whole, double tol, int depth, QuadratureResult& out) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        out.value += left + right + delta / 15.0;
        out.error_estimate += std::abs(delta) / 15.0;
        return;
    }
    adapt(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1, out);
    adapt(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1, out);
}

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights come
// from the first components of the eigenvectors.
GaussRule golub_welsch(const std::vector<double>& off_diagonal, double weight_mass) {
    const auto n = off_diagonal.size() + 1;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i + 1 < n; ++i) {
        J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + 1)) = off_diagonal[i];
        J(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(i)) = off_diagonal[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        rule.nodes[i] = es.eigenvalues()(static_cast<Eigen::Index>(i));
        const double v0 = es.eigenvectors()(0, static_cast<Eigen::Index>(i));
        rule.weights[i] = weight_mass * v0 * v0;
    }
    return rule;
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol, int max_depth) {
    if (!(b > a)) throw ValidationError("integrate_adaptive: empty interval");
    QuadratureResult out;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = simpson(a, fa, b, fb, fm);
    adapt(f, a, fa, b, fb, fm, whole, abs_tol, max_depth, out);
    return out;
}

const GaussRule& gauss_hermite(std::size_t n) {
    static std::map<std::size_t, GaussRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) {
        if (n == 0) throw ValidationError("gauss_hermite: n must be positive");
        std::vector<double> off(n - 1);
        for (std::size_t i = 1; i < n; ++i) off[i - 1] = std::sqrt(static_cast<double>(i));
        it = cache.emplace(n, golub_welsch(off, 1.0)).first;
    }
    return it->second;
}

const GaussRule& gauss_legendre(std::size_t n) {
    static std::map<std::size_t, GaussRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) {
        if (n == 0) throw ValidationError("gauss_legendre: n must be positive");
        std::vector<double> off(n - 1);
        for (std::size_t i = 1; i < n; ++i) {
            const double k = static_cast<double>(i);
            off[i - 1] = k / std::sqrt(4.0 * k * k - 1.0);
        }
        it = cache.emplace(n, golub_welsch(off, 2.0)).first;
    }
    return it->second;
}

}  // namespace marlab
