#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace marlab {

inline double normal_pdf(double x, double mu = 0.0, double sigma = 1.0) {
    const double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * 2.5066282746310005024);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;  // accumulated Richardson estimates
};

/// Adaptive Simpson on [a, b] with absolute tolerance.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol = 1e-10, int max_depth = 42);

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Probabilists' Gauss-Hermite rule: E[g(Z)] for Z ~ N(0,1) as sum w_i g(x_i).
const GaussRule& gauss_hermite(std::size_t n);

/// Gauss-Legendre rule on [-1, 1].
const GaussRule& gauss_legendre(std::size_t n);

}  // namespace marlab
