#include "marlab/kernel.hpp"

namespace marlab {

std::string KernelSpec::name() const {
    switch (kind) {
        case Kind::Gaussian: return "gaussian";
        case Kind::Epanechnikov: return "epanechnikov";
        case Kind::Uniform: return "uniform";
    }
    return "?";
}

KernelSpec KernelSpec::parse(const std::string& name) {
    if (name == "gaussian") return gaussian();
    if (name == "epanechnikov") return epanechnikov();
    if (name == "uniform") return uniform();
    throw ValidationError("unknown kernel: " + name);
}

std::vector<double> linspace(double a, double b, std::size_t count) {
    if (count < 2) throw ValidationError("linspace: need at least 2 points");
    std::vector<double> g(count);
    const double step = (b - a) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) g[i] = a + step * static_cast<double>(i);
    g.back() = b;
    return g;
}

namespace {

struct SlopeScan {
    double max_slope = 0.0;
    double at = 0.0;
};

SlopeScan max_slope_on(const KernelSpec& spec, double lo, double hi, std::size_t pieces) {
    SlopeScan scan;
    const double step = (hi - lo) / static_cast<double>(pieces);
    double xprev = lo, kprev = spec(lo);
    for (std::size_t i = 1; i <= pieces; ++i) {
        const double x = lo + step * static_cast<double>(i);
        const double k = spec(x);
        const double slope = std::abs(k - kprev) / (x - xprev);
        if (slope > scan.max_slope) {
            scan.max_slope = slope;
            scan.at = 0.5 * (xprev + x);
        }
        xprev = x;
        kprev = k;
    }
    return scan;
}

}  // namespace

KernelCheck check_kernel(const KernelSpec& spec, const std::vector<double>& grid) {
    if (grid.size() < 8) throw ValidationError("check_kernel: grid too small");
    KernelCheck out;

    double absmax = 0.0;
    for (double x : grid) {
        const double k = spec(x);
        if (k > out.sup_value) {
            out.sup_value = k;
            out.sup_at = x;
        }
        absmax = std::max(absmax, std::abs(x));
    }
    out.bounded = std::isfinite(out.sup_value);

    // tail: |u|K(u) on the outer 10% of the grid must be negligible against
    // its overall maximum
    double t_all = 0.0, t_outer = 0.0;
    for (double x : grid) {
        const double t = std::abs(x) * spec(x);
        t_all = std::max(t_all, t);
        if (std::abs(x) >= 0.9 * absmax && t >= t_outer) {
            t_outer = t;
            out.tail_at = x;
        }
    }
    out.tail_value = t_outer;
    out.tail = t_outer <= std::max(1e-8, 1e-3 * t_all);

    // Lipschitz quotient on consecutive pairs, then refined around the
    // argmax; a discontinuity doubles the estimate every refinement
    SlopeScan scan;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double dx = grid[i] - grid[i - 1];
        if (dx <= 0.0) throw ValidationError("check_kernel: grid must be increasing");
        const double slope = std::abs(spec(grid[i]) - spec(grid[i - 1])) / dx;
        if (slope > scan.max_slope) {
            scan.max_slope = slope;
            scan.at = 0.5 * (grid[i - 1] + grid[i]);
        }
    }
    double window = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
    bool stable = true;
    for (int level = 0; level < 3; ++level) {
        window /= 8.0;
        const SlopeScan fine = max_slope_on(spec, scan.at - 4.0 * window, scan.at + 4.0 * window, 64);
        if (fine.max_slope > 2.0 * scan.max_slope) stable = false;
        if (fine.max_slope > scan.max_slope) scan = fine;
    }
    out.lipschitz_estimate = scan.max_slope;
    out.lipschitz_at = scan.at;
    out.lipschitz = stable && std::isfinite(scan.max_slope);
    return out;
}

double kernel_mass(const KernelSpec& spec) {
    const double w = spec.compact_support() ? spec.support_radius() : 12.0;
    return integrate_adaptive([&](double u) { return spec(u); }, -w, w, 1e-12).value;
}

}  // namespace marlab
