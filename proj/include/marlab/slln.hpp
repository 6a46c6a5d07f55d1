#pragma once

#include <cstdint>
#include <vector>

#include "marlab/arrays.hpp"
#include "marlab/common.hpp"

namespace marlab {

/// Empirical estimates of the two quantities whose decay drives almost-sure
/// convergence of c_n M_{n,n}: the anchored moment term
///   term_a(n) = c_n^p E|S_{n0,n}|^p
/// plus its tail companion term_b(n) = sum_{k=n}^{H-1} (c_k^p - c_{k+1}^p) E|S_{n,k}|^p
/// truncated at the horizon H, and the cross-row series with increments
///   r_increment(n) = c_n (E|R_n|^p)^{1/p}.
/// Tail sums beyond the horizon are extrapolated assuming geometric decay of
/// the last measured octaves and reported separately (term_b_tail); the
/// partial sums of the cross-row series interpolate a power law between
/// measured anchors (exact for n <= 16).
struct SllnReport {
    std::vector<std::size_t> grid;  // geometric anchor grid, ends at horizon
    std::vector<double> term_a;
    std::vector<double> term_b;       // truncated at the horizon
    std::vector<double> term_b_tail;  // extrapolated remainder (labelled estimate)
    std::vector<double> r_increment;
    std::vector<double> r_partial_sum;  // sum_{m<=n} c_m (E|R_m|^p)^{1/p}
    double term_a_slope = 0.0;          // log-log fit over the grid
    double r_increment_slope = 0.0;
    bool term_a_tends_zero = false;
    bool r_summable = false;
    std::size_t n0 = 1;
    double p = 2.0;
    std::size_t replicates = 0;
    std::size_t horizon = 0;
};

/// Measures both convergence conditions by simulation. The moment order p is
/// carried by the schedule; the explicit argument must agree with w.p.
/// Requires replicates >= 100 so that the reported means are stable enough
/// to fit.
SllnReport corollary1_terms(const ArrayDistribution& dist, const WeightSchedule& w, double p,
                            std::size_t n0, std::size_t horizon, std::size_t replicates,
                            std::uint64_t master_seed);

/// Scaled diagonal trajectories c_m |M_{m,m}| and their running suprema
/// sup_{m' in [m, horizon]} over a set of seeds, sampled on a report grid
/// (geometric by default).
struct DiagonalPaths {
    std::vector<std::size_t> grid;
    std::vector<std::vector<double>> scaled_diag;  // [seed][grid index]
    std::vector<std::vector<double>> running_sup;  // [seed][grid index]
    std::vector<double> running_sup_median;        // across seeds, per grid point
    std::vector<double> running_sup_q95;
    std::size_t horizon = 0;
};

DiagonalPaths diagonal_paths(const ArrayDistribution& dist, const WeightSchedule& w,
                             const std::vector<std::uint64_t>& seeds, std::size_t horizon,
                             std::vector<std::size_t> report_grid = {});

}  // namespace marlab
