#pragma once

#include <cstdint>
#include <vector>

#include "marlab/arrays.hpp"
#include "marlab/common.hpp"

namespace marlab {

enum class CheckMode { Exact, MonteCarlo };

struct McOptions {
    std::size_t replicates = 10000;
    std::uint64_t seed = 1;
};

/// One verified inequality instance. rhs = rhs_term1 + rhs_term2 + rhs_term3
/// (unused terms stay 0). In Exact mode a false `holds` means a bug, not a
/// counterexample; in MC mode the verdict allows 3 standard errors of slack
/// so that noise cannot produce false alarms.
struct InequalityReport {
    double lambda = 0.0;  // threshold; 1 for the single-martingale bound, 0 when n/a
    double lhs = 0.0;
    double rhs = 0.0;
    double rhs_term1 = 0.0;
    double rhs_term2 = 0.0;
    double rhs_term3 = 0.0;
    double margin = 0.0;  // rhs - lhs
    CheckMode mode = CheckMode::Exact;
    std::size_t replicates = 0;  // MC only
    double std_error = 0.0;      // MC std error of the margin
    bool holds = false;
};

/// Weighted maximal bound for the single martingale built from row N of the
/// distribution: lhs = P(sup_{n<=m<=N} c_m |S_m| >= 1) against the weighted
/// moment sum on the right. The event threshold is fixed at 1 and uses ">=".
InequalityReport cbm_bound(const ArrayDistribution& dist, const WeightSchedule& w, std::size_t n,
                           std::size_t N, CheckMode mode, const McOptions& mc = {});

/// Array maximal bound: lhs = 2^{-p} lambda^p P(max_{n<=m<=N} c_m |M_{m,m}| > lambda)
/// (strict ">"), rhs_term1 = c_N^p E|S_{n,N}|^p, rhs_term2 the weight-difference
/// sum, rhs_term3 = E[(sum_{j>n} c_j |R_j|)^p]. All lambdas share one
/// enumeration/replicate pass (common random numbers).
std::vector<InequalityReport> thm2_check_grid(const ArrayDistribution& dist,
                                              const WeightSchedule& w, std::size_t n,
                                              std::size_t N, const std::vector<double>& lambdas,
                                              CheckMode mode, const McOptions& mc = {});

InequalityReport thm2_check(const ArrayDistribution& dist, const WeightSchedule& w, std::size_t n,
                            std::size_t N, double lambda, CheckMode mode, const McOptions& mc = {});

/// (18 p q^{1/2})^p with 1/p + 1/q = 1; exact (integer arithmetic) for even
/// integer p. Rejects p <= 1, where q diverges.
double burkholder_constant(double p);

/// Moment bound E|M_{n,k}|^p <= C k^{max(p/2,1)-1} sum_j E|D_{n,j}|^p.
InequalityReport burkholder_check(const ArrayDistribution& dist, double p, std::size_t n,
                                  std::size_t k, CheckMode mode, const McOptions& mc = {});

}  // namespace marlab
