#pragma once

#include <optional>
#include <string>
#include <vector>

#include "marlab/common.hpp"
#include "marlab/quadrature.hpp"

namespace marlab {

/// Smoothing kernel: nonnegative, unit mass. Three built-in families. The
/// uniform (indicator) kernel is deliberately not Lipschitz; it exists to
/// exercise the failure branch of check_kernel.
struct KernelSpec {
    enum class Kind { Gaussian, Epanechnikov, Uniform };
    Kind kind = Kind::Gaussian;

    double operator()(double u) const {
        switch (kind) {
            case Kind::Gaussian: return normal_pdf(u);
            case Kind::Epanechnikov: return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
            case Kind::Uniform: return std::abs(u) <= 1.0 ? 0.5 : 0.0;
        }
        return 0.0;
    }

    /// Exact sup of K (analytic, used as oracle against the grid search).
    double sup_K() const {
        switch (kind) {
            case Kind::Gaussian: return 0.3989422804014327;  // 1/sqrt(2 pi)
            case Kind::Epanechnikov: return 0.75;
            case Kind::Uniform: return 0.5;
        }
        return 0.0;
    }

    /// Exact Lipschitz constant, or nullopt when the kernel is not Lipschitz.
    std::optional<double> lipschitz() const {
        switch (kind) {
            case Kind::Gaussian: return 0.24197072451914337;  // |K'| max at u = +-1
            case Kind::Epanechnikov: return 1.5;
            case Kind::Uniform: return std::nullopt;
        }
        return std::nullopt;
    }

    bool compact_support() const { return kind != Kind::Gaussian; }
    /// Radius beyond which K vanishes (infinite for Gaussian).
    double support_radius() const { return compact_support() ? 1.0 : kInf; }

    std::string name() const;
    static KernelSpec parse(const std::string& name);
    static KernelSpec gaussian() { return {Kind::Gaussian}; }
    static KernelSpec epanechnikov() { return {Kind::Epanechnikov}; }
    static KernelSpec uniform() { return {Kind::Uniform}; }
};

/// Numeric verdicts for the three kernel conditions: boundedness, vanishing
/// tail of |u|K(u), and a finite Lipschitz quotient. Witnesses record where
/// each extremum was found.
struct KernelCheck {
    bool bounded = false;
    double sup_value = 0.0;
    double sup_at = 0.0;

    bool tail = false;
    double tail_value = 0.0;  // max |u|K(u) over the outer edge of the grid
    double tail_at = 0.0;

    bool lipschitz = false;
    double lipschitz_estimate = 0.0;  // stable under refinement iff Lipschitz
    double lipschitz_at = 0.0;
};

/// Grid search with local refinement. The Lipschitz quotient is re-estimated
/// on successively finer grids around its argmax; a jump makes the estimate
/// grow with refinement and fails the verdict.
KernelCheck check_kernel(const KernelSpec& spec, const std::vector<double>& grid);

/// Quadrature of the kernel mass; should be 1 within 1e-8.
double kernel_mass(const KernelSpec& spec);

/// Evenly spaced grid with `count` points, endpoints included.
std::vector<double> linspace(double a, double b, std::size_t count);

/// Default verification grid for kernel and moment-growth checks.
inline std::vector<double> default_check_grid() { return linspace(-30.0, 30.0, 10000); }

}  // namespace marlab
