#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "marlab/common.hpp"
#include "marlab/regression.hpp"

namespace marlab {

/// Non-increasing positive weights c_n with a moment order p attached.
/// Construction is permissive about monotonicity (validate_schedule is the
/// contract for that); p >= 1 is enforced immediately.
struct WeightSchedule {
    enum class Kind { PowerLaw, Explicit };
    Kind kind = Kind::PowerLaw;
    double exponent = -1.0;      // PowerLaw: c_n = n^exponent
    std::vector<double> values;  // Explicit: values[n-1]
    double p = 2.0;

    double at(std::size_t n) const {
        if (n == 0) throw ValidationError("weight schedule: n must be >= 1");
        if (kind == Kind::PowerLaw) return std::pow(static_cast<double>(n), exponent);
        if (n > values.size()) throw ValidationError("weight schedule: index beyond explicit values");
        return values[n - 1];
    }
    /// Conjugate exponent; infinite when p = 1.
    double q() const { return p == 1.0 ? kInf : p / (p - 1.0); }

    std::string name() const;
    static WeightSchedule power(double exponent, double p);
    static WeightSchedule constant(double p) { return power(0.0, p); }
    static WeightSchedule explicit_values(std::vector<double> values, double p);
};

/// First index (1-based) violating positivity or monotonicity up to N, or
/// nullopt when the schedule is valid.
std::optional<std::size_t> validate_schedule(const WeightSchedule& w, std::size_t N);

/// Distribution of a martingale-difference triangular array. Four random
/// families plus explicit (fixed) rows:
///  - NestedIID: D_{n,i} = scale * Z_i with one shared Gaussian stream;
///  - RademacherNested: same with signs, so rows are prefixes of one walk;
///  - RademacherWeighted: sign innovations with row- and position-dependent
///    weights and a one-step history factor; rows genuinely change with n,
///    giving nonzero row increments while keeping the alphabet finite;
///  - ChainKernel: rows from the kernel-regression construction, entry
///    F_{h_n}(X_k, Y_k) minus its conditional mean given X_{k-1};
///  - Explicit: fixed triangular rows, no randomness.
struct ArrayDistribution {
    enum class Kind { NestedIID, RademacherNested, RademacherWeighted, ChainKernel, Explicit };
    Kind kind = Kind::RademacherNested;

    double scale = 1.0;  // NestedIID / RademacherNested
    // RademacherWeighted: amp (1 + row_scale/n) (1 + taper i/n) (1 + history xi_{i-1}) xi_i
    double amp = 1.0, row_scale = 0.5, taper = 0.5, history = 0.5;
    std::shared_ptr<const RegressionProblem> chain;  // ChainKernel
    std::vector<std::vector<double>> rows;           // Explicit

    bool enumerable() const {
        return kind == Kind::RademacherNested || kind == Kind::RademacherWeighted ||
               kind == Kind::Explicit;
    }
    /// Rows are prefixes of one sequence (row increments vanish identically).
    bool nested() const { return kind == Kind::NestedIID || kind == Kind::RademacherNested; }
    std::size_t alphabet_size() const;
    std::string name() const;

    static ArrayDistribution nested_iid(double scale = 1.0);
    static ArrayDistribution rademacher_nested(double scale = 1.0);
    static ArrayDistribution rademacher_weighted(double amp = 1.0, double row_scale = 0.5,
                                                 double taper = 0.5, double history = 0.5);
    static ArrayDistribution chain_kernel(RegressionProblem problem);
    static ArrayDistribution explicit_rows(std::vector<std::vector<double>> rows);
    static ArrayDistribution explicit_from_file(const std::string& path);
    static ArrayDistribution zeros(std::size_t N);
};

/// Realized randomness behind an array: one innovation stream shared by all
/// rows (this is what makes the filtration common across rows).
struct Innovations {
    std::vector<double> xi;                        // xi[i-1] is innovation i
    std::shared_ptr<const ChainKernelRows> chain;  // ChainKernel only
};

Innovations draw_innovations(const ArrayDistribution& dist, std::uint64_t seed, std::size_t N);

/// D_{n,i} as a deterministic function of the innovations; 1 <= i <= n.
double row_entry(const ArrayDistribution& dist, const Innovations& innov, std::size_t n,
                 std::size_t i);
void build_row(const ArrayDistribution& dist, const Innovations& innov, std::size_t n,
               std::vector<double>& out);

/// A realized array: distribution + seed + innovations. Rows are computed on
/// demand (never stored), so large horizons stay O(N) in memory.
class TriangularArray {
public:
    TriangularArray(ArrayDistribution dist, std::uint64_t seed, std::size_t horizon);

    const ArrayDistribution& distribution() const { return dist_; }
    const Innovations& innovations() const { return innov_; }
    std::size_t horizon() const { return horizon_; }
    std::uint64_t seed() const { return seed_; }

    double entry(std::size_t n, std::size_t i) const;
    std::vector<double> row(std::size_t n) const;
    double diagonal(std::size_t n) const { return entry(n, n); }

private:
    ArrayDistribution dist_;
    std::uint64_t seed_ = 0;
    std::size_t horizon_ = 0;
    Innovations innov_;
};

TriangularArray generate(const ArrayDistribution& dist, std::uint64_t seed, std::size_t N);

/// M_{n,k} for k = 1..n.
std::vector<double> partial_sums(const TriangularArray& arr, std::size_t n);
/// S_{n,k}: the running row-n sum for k <= n, continued along the diagonal
/// beyond the anchor row for k > n.
double extended_sum(const TriangularArray& arr, std::size_t n, std::size_t k);
/// R_n = sum_{j<n} (D_{n,j} - D_{n-1,j}); requires n >= 2.
double row_increment(const TriangularArray& arr, std::size_t n);
/// M_{m,m} for m = 1..N, with an O(N) fast path for nested families.
std::vector<double> diagonal_sums(const TriangularArray& arr, std::size_t N);

constexpr std::size_t kEnumerationCap = std::size_t{1} << 24;

/// Number of equally likely innovation assignments for horizon N; throws on
/// non-enumerable distributions or when the count exceeds the cap.
std::size_t enumeration_count(const ArrayDistribution& dist, std::size_t N);

/// Calls visit once per innovation assignment (each carries probability
/// 1 / enumeration_count). The vector passed to visit has length N and is
/// reused between calls.
void enumerate_paths(const ArrayDistribution& dist, std::size_t N,
                     const std::function<void(const std::vector<double>& xi)>& visit);

/// Exact max over (n, i, prefix) of |E[D_{n,i} | innovations 1..i-1]|.
double martingale_defect(const ArrayDistribution& dist, std::size_t N);
/// Exact max over (m, prefix) of |E[S_{n0,m} | innovations 1..m-1] - S_{n0,m-1}|.
double extended_sum_martingale_defect(const ArrayDistribution& dist, std::size_t n0,
                                      std::size_t N);
/// Exact conditional-mean defect of the cross-row difference sums
/// sum_{j<=k} (D_{N,j} - D_{N-1,j}); zero iff they form a martingale.
double cross_row_martingale_defect(const ArrayDistribution& dist, std::size_t N);

}  // namespace marlab
