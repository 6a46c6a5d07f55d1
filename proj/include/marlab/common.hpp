#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace marlab {

/// Raised when a configuration, parameter, or model precondition fails.
/// The harness maps this to exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Neumaier-compensated accumulator. All Monte Carlo reductions go through
/// this so that reported numbers are insensitive to summation order at ~1e-12.
class KahanSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }
    void reset() { sum_ = 0.0; comp_ = 0.0; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double kahan_total(const std::vector<double>& xs) {
    KahanSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

inline double mean(const std::vector<double>& xs) {
    if (xs.empty()) throw ValidationError("mean of empty sample");
    return kahan_total(xs) / static_cast<double>(xs.size());
}

/// Unbiased sample variance (n-1 denominator).
inline double sample_variance(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    if (n < 2) return 0.0;
    const double m = mean(xs);
    KahanSum s;
    for (double x : xs) s.add((x - m) * (x - m));
    return s.value() / static_cast<double>(n - 1);
}

/// Standard error of the sample mean.
inline double std_error(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    return std::sqrt(sample_variance(xs) / static_cast<double>(xs.size()));
}

/// Quantile with linear interpolation between order statistics
/// (R type-7). q in [0,1].
inline double quantile(std::vector<double> xs, double q) {
    if (xs.empty()) throw ValidationError("quantile of empty sample");
    if (q < 0.0 || q > 1.0) throw ValidationError("quantile level outside [0,1]");
    std::sort(xs.begin(), xs.end());
    const double pos = q * static_cast<double>(xs.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
    const double w = pos - static_cast<double>(lo);
    return (1.0 - w) * xs[lo] + w * xs[hi];
}

inline double median(const std::vector<double>& xs) { return quantile(xs, 0.5); }

/// Least-squares line fit on (log x, log y). Points with y <= 0 are skipped;
/// `used` reports how many survived.
struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::size_t used = 0;
};

inline LogLogFit fit_log_log(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ValidationError("fit_log_log: size mismatch");
    KahanSum sx, sy, sxx, sxy;
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx.add(lx);
        sy.add(ly);
        sxx.add(lx * lx);
        sxy.add(lx * ly);
        ++n;
    }
    LogLogFit fit;
    fit.used = n;
    if (n < 2) return fit;
    const double dn = static_cast<double>(n);
    const double den = sxx.value() - sx.value() * sx.value() / dn;
    if (den == 0.0) return fit;
    fit.slope = (sxy.value() - sx.value() * sy.value() / dn) / den;
    fit.intercept = (sy.value() - fit.slope * sx.value()) / dn;
    return fit;
}

/// Shortest round-trippable decimal form of a double. Used everywhere a
/// number is written to CSV/JSON so identical doubles give identical bytes.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // prefer a shorter representation when it round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char cand[40];
        std::snprintf(cand, sizeof(cand), "%.*g", prec, v);
        if (std::strtod(cand, nullptr) == v) return cand;
    }
    return buf;
}

/// Whitespace-separated numeric rows from a plain text file. Blank lines and
/// lines starting with '#' are skipped. Any other parse failure throws.
inline std::vector<std::vector<double>> read_numeric_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::vector<double> row;
        std::string tok;
        while (ls >> tok) {
            if (tok[0] == '#') break;
            char* end = nullptr;
            const double v = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str() || *end != '\0')
                throw ValidationError(path + ":" + std::to_string(lineno) +
                                      ": not a number: " + tok);
            row.push_back(v);
        }
        if (!row.empty()) rows.push_back(std::move(row));
    }
    return rows;
}

/// Geometric grid {start, 2*start, 4*start, ...} capped at limit (limit is
/// always included as the last point).
inline std::vector<std::size_t> geometric_grid(std::size_t start, std::size_t limit) {
    if (start == 0 || limit < start) throw ValidationError("geometric_grid: bad range");
    std::vector<std::size_t> g;
    for (std::size_t n = start; n < limit; n *= 2) g.push_back(n);
    if (g.empty() || g.back() != limit) g.push_back(limit);
    return g;
}

}  // namespace marlab
