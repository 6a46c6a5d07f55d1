#include "marlab/slln.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "marlab/rng.hpp"

namespace marlab {
namespace {

// Power-law interpolation of series increments between measured anchors:
// given v_a at a and v_b at b > a, returns sum_{m=a+1}^{b} v_a (m/a)^s with
// s matching both endpoints. Falls back to linear interpolation when an
// endpoint vanishes.
double interpolated_segment_sum(std::size_t a, double va, std::size_t b, double vb) {
    KahanSum acc;
    if (va > 0.0 && vb > 0.0) {
        const double s = std::log(vb / va) / std::log(static_cast<double>(b) /
                                                      static_cast<double>(a));
        for (std::size_t m = a + 1; m <= b; ++m)
            acc.add(va * std::pow(static_cast<double>(m) / static_cast<double>(a), s));
    } else {
        const double span = static_cast<double>(b - a);
        for (std::size_t m = a + 1; m <= b; ++m)
            acc.add(va + (vb - va) * static_cast<double>(m - a) / span);
    }
    return acc.value();
}

}  // namespace

SllnReport corollary1_terms(const ArrayDistribution& dist, const WeightSchedule& w, double p_arg,
                            std::size_t n0, std::size_t horizon, std::size_t replicates,
                            std::uint64_t master_seed) {
    if (std::fabs(p_arg - w.p) > 1e-12)
        throw ValidationError("moment order disagrees with the schedule (p=" +
                              format_double(p_arg) + " vs " + format_double(w.p) + ")");
    if (replicates < 100)
        throw ValidationError("need at least 100 replicates for stable term estimates, got " +
                              std::to_string(replicates));
    if (n0 == 0) throw ValidationError("anchor index n0 must be >= 1");
    if (horizon < 32 || horizon <= n0)
        throw ValidationError("horizon must be >= 32 and exceed n0, got " +
                              std::to_string(horizon));
    if (auto bad = validate_schedule(w, horizon))
        throw ValidationError("weight schedule violates positivity/monotonicity at index " +
                              std::to_string(*bad));
    if (dist.kind == ArrayDistribution::Kind::Explicit && dist.rows.size() < horizon)
        throw ValidationError("explicit distribution too short for horizon");

    SllnReport rep;
    rep.n0 = n0;
    rep.p = w.p;
    rep.replicates = replicates;
    rep.horizon = horizon;
    rep.grid = geometric_grid(std::max<std::size_t>(4, n0), horizon);
    const std::size_t g = rep.grid.size();
    const double p = w.p;

    // Anchors where E|R_m|^p is measured: every m in [2,16] (exact small-m
    // partial sums) plus the geometric grid beyond 16.
    std::vector<std::size_t> knots;
    for (std::size_t m = 2; m <= std::min<std::size_t>(16, horizon); ++m) knots.push_back(m);
    for (std::size_t gp : rep.grid)
        if (gp > 16) knots.push_back(gp);

    const std::size_t oct_hi = horizon / 2;  // last-octave window [oct_hi, horizon-1]
    const std::size_t oct_lo = horizon / 4;  // previous octave [oct_lo, oct_hi-1]

    std::vector<KahanSum> acc_a(g), acc_b(g), acc_last(g), acc_prev(g);
    std::vector<KahanSum> acc_r(knots.size());
    std::vector<double> diag(horizon + 1, 0.0);
    std::vector<double> row, prev_row;
    std::vector<double> cwp(horizon + 2, 0.0);  // c_k^p, 1-based
    for (std::size_t k = 1; k <= horizon; ++k) cwp[k] = std::pow(w.at(k), p);

    for (std::size_t r = 0; r < replicates; ++r) {
        const Innovations innov = draw_innovations(dist, derive_seed(master_seed, r, "slln"), horizon);
        for (std::size_t j = 1; j <= horizon; ++j) diag[j] = row_entry(dist, innov, j, j);

        // term_a: |S_{n0, n}|^p across the grid, one forward pass.
        build_row(dist, innov, n0, row);
        KahanSum s_acc;
        for (double d : row) s_acc.add(d);
        std::size_t gi = 0;
        for (std::size_t n = n0; n <= horizon; ++n) {
            if (n > n0) s_acc.add(diag[n]);
            while (gi < g && rep.grid[gi] == n) {
                acc_a[gi].add(std::pow(std::fabs(s_acc.value()), p));
                ++gi;
            }
        }

        // term_b: anchored tail sums, one pass per grid anchor.
        for (std::size_t a = 0; a < g; ++a) {
            const std::size_t n = rep.grid[a];
            build_row(dist, innov, n, row);
            KahanSum s;
            for (double d : row) s.add(d);
            KahanSum total, last, prev;
            for (std::size_t k = n; k < horizon; ++k) {
                if (k > n) s.add(diag[k]);
                const double piece = (cwp[k] - cwp[k + 1]) * std::pow(std::fabs(s.value()), p);
                total.add(piece);
                if (k >= oct_hi)
                    last.add(piece);
                else if (k >= oct_lo)
                    prev.add(piece);
            }
            acc_b[a].add(total.value());
            acc_last[a].add(last.value());
            acc_prev[a].add(prev.value());
        }

        // Cross-row increments at the knots.
        for (std::size_t ki = 0; ki < knots.size(); ++ki) {
            const std::size_t m = knots[ki];
            build_row(dist, innov, m - 1, prev_row);
            build_row(dist, innov, m, row);
            KahanSum rm;
            for (std::size_t t = 0; t + 1 < m; ++t) rm.add(row[t] - prev_row[t]);
            acc_r[ki].add(std::pow(std::fabs(rm.value()), p));
        }
    }

    const double inv = 1.0 / static_cast<double>(replicates);
    rep.term_a.resize(g);
    rep.term_b.resize(g);
    rep.term_b_tail.resize(g);
    for (std::size_t a = 0; a < g; ++a) {
        rep.term_a[a] = cwp[rep.grid[a]] * acc_a[a].value() * inv;
        rep.term_b[a] = acc_b[a].value() * inv;
        const double last = acc_last[a].value() * inv;
        const double prev = acc_prev[a].value() * inv;
        if (last <= 0.0 || prev <= 0.0) {
            rep.term_b_tail[a] = 0.0;
        } else {
            const double rho = last / prev;  // per-octave decay
            rep.term_b_tail[a] = rho < 1.0 ? last * rho / (1.0 - rho) : kInf;
        }
    }

    std::vector<double> knot_value(knots.size());
    for (std::size_t ki = 0; ki < knots.size(); ++ki)
        knot_value[ki] = w.at(knots[ki]) * std::pow(acc_r[ki].value() * inv, 1.0 / p);

    // Partial sums over all integers: exact up to 16, interpolated between
    // knots beyond. Values are recorded at the grid anchors.
    std::vector<double> partial_at_knot(knots.size());
    KahanSum run;
    for (std::size_t ki = 0; ki < knots.size(); ++ki) {
        if (knots[ki] <= 16)
            run.add(knot_value[ki]);
        else
            run.add(interpolated_segment_sum(knots[ki - 1], knot_value[ki - 1], knots[ki],
                                             knot_value[ki]));
        partial_at_knot[ki] = run.value();
    }
    rep.r_increment.resize(g);
    rep.r_partial_sum.resize(g);
    for (std::size_t a = 0; a < g; ++a) {
        const std::size_t n = rep.grid[a];
        double val = 0.0, part = 0.0;
        for (std::size_t ki = 0; ki < knots.size(); ++ki)
            if (knots[ki] <= n) {
                part = partial_at_knot[ki];
                if (knots[ki] == n) val = knot_value[ki];
            }
        rep.r_increment[a] = val;
        rep.r_partial_sum[a] = part;
    }

    std::vector<double> grid_d(rep.grid.begin(), rep.grid.end());
    rep.term_a_slope = fit_log_log(grid_d, rep.term_a).slope;
    rep.r_increment_slope = fit_log_log(grid_d, rep.r_increment).slope;
    const double a_max = *std::max_element(rep.term_a.begin(), rep.term_a.end());
    rep.term_a_tends_zero =
        a_max < 1e-12 ||
        (g >= 2 && rep.term_a_slope < -0.05 && rep.term_a.back() <= rep.term_a.front());
    const double r_max = *std::max_element(rep.r_increment.begin(), rep.r_increment.end());
    rep.r_summable = r_max < 1e-12 || rep.r_increment_slope < -1.0;
    return rep;
}

DiagonalPaths diagonal_paths(const ArrayDistribution& dist, const WeightSchedule& w,
                             const std::vector<std::uint64_t>& seeds, std::size_t horizon,
                             std::vector<std::size_t> report_grid) {
    if (seeds.empty()) throw ValidationError("need at least one seed");
    if (horizon < 2) throw ValidationError("horizon must be >= 2");
    if (auto bad = validate_schedule(w, horizon))
        throw ValidationError("weight schedule violates positivity/monotonicity at index " +
                              std::to_string(*bad));
    if (report_grid.empty()) report_grid = geometric_grid(4, horizon);
    for (std::size_t i = 0; i < report_grid.size(); ++i) {
        if (report_grid[i] == 0 || report_grid[i] > horizon)
            throw ValidationError("report grid entries must lie in [1, horizon]");
        if (i > 0 && report_grid[i] <= report_grid[i - 1])
            throw ValidationError("report grid must be strictly increasing");
    }

    DiagonalPaths out;
    out.grid = std::move(report_grid);
    out.horizon = horizon;
    const std::size_t g = out.grid.size();
    std::vector<double> stat(horizon + 1), runsup(horizon + 2, 0.0);
    for (std::uint64_t seed : seeds) {
        const TriangularArray arr = generate(dist, seed, horizon);
        const std::vector<double> dg = diagonal_sums(arr, horizon);
        for (std::size_t m = 1; m <= horizon; ++m) stat[m] = w.at(m) * std::fabs(dg[m - 1]);
        runsup[horizon + 1] = 0.0;
        for (std::size_t m = horizon; m >= 1; --m) runsup[m] = std::max(stat[m], runsup[m + 1]);
        std::vector<double> sd(g), rs(g);
        for (std::size_t a = 0; a < g; ++a) {
            sd[a] = stat[out.grid[a]];
            rs[a] = runsup[out.grid[a]];
        }
        out.scaled_diag.push_back(std::move(sd));
        out.running_sup.push_back(std::move(rs));
    }

    out.running_sup_median.resize(g);
    out.running_sup_q95.resize(g);
    std::vector<double> col(seeds.size());
    for (std::size_t a = 0; a < g; ++a) {
        for (std::size_t s = 0; s < seeds.size(); ++s) col[s] = out.running_sup[s][a];
        out.running_sup_median[a] = median(col);
        out.running_sup_q95[a] = quantile(col, 0.95);
    }
    return out;
}

}  // namespace marlab
