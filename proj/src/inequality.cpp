#include "marlab/inequality.hpp"

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

#include "marlab/rng.hpp"

namespace marlab {
namespace {

void check_common(const ArrayDistribution& dist, const WeightSchedule& w, std::size_t n,
                  std::size_t N) {
    if (n == 0 || N == 0 || n > N)
        throw ValidationError("need 1 <= n <= N, got n=" + std::to_string(n) +
                              " N=" + std::to_string(N));
    if (auto bad = validate_schedule(w, N))
        throw ValidationError("weight schedule violates positivity/monotonicity at index " +
                              std::to_string(*bad));
    if (dist.kind == ArrayDistribution::Kind::Explicit && dist.rows.size() < N)
        throw ValidationError("explicit distribution has " + std::to_string(dist.rows.size()) +
                              " rows, need " + std::to_string(N));
}

// Per-realization statistics for the array maximal inequality.
struct Thm2Stats {
    double max_stat = 0.0;  // max_{n<=m<=N} c_m |M_{m,m}|
    double term1 = 0.0;     // c_N^p |S_{n,N}|^p
    double term2 = 0.0;     // sum_{j=n}^{N-1} (c_j^p - c_{j+1}^p) |S_{n,j}|^p
    double term3 = 0.0;     // (sum_{j=n+1}^N c_j |R_j|)^p
};

Thm2Stats thm2_stats(const ArrayDistribution& dist, const Innovations& innov,
                     const WeightSchedule& w, std::size_t n, std::size_t N,
                     std::vector<double>& row, std::vector<double>& prev) {
    Thm2Stats st;
    const double p = w.p;
    double s_ext = 0.0;    // S_{n,j}
    double r_weight = 0.0; // sum c_j |R_j|
    KahanSum term2;

    for (std::size_t j = n; j <= N; ++j) {
        build_row(dist, innov, j, row);
        KahanSum diag;
        for (double d : row) diag.add(d);
        const double m_jj = diag.value();

        if (j == n) {
            s_ext = m_jj;
        } else {
            s_ext += row[j - 1];
            KahanSum rj;
            for (std::size_t t = 0; t + 1 < j; ++t) rj.add(row[t] - prev[t]);
            r_weight += w.at(j) * std::fabs(rj.value());
        }

        const double stat = w.at(j) * std::fabs(m_jj);
        if (stat > st.max_stat) st.max_stat = stat;

        const double sp = std::pow(std::fabs(s_ext), p);
        if (j == N)
            st.term1 = std::pow(w.at(N), p) * sp;
        else
            term2.add((std::pow(w.at(j), p) - std::pow(w.at(j + 1), p)) * sp);

        row.swap(prev);
    }
    st.term2 = term2.value();
    st.term3 = std::pow(r_weight, p);
    return st;
}

// Runs `visit` over every realization, either by exact enumeration (weight
// 1/count each) or by seeded Monte Carlo. Returns the number of realizations.
std::size_t for_each_realization(const ArrayDistribution& dist, std::size_t N, CheckMode mode,
                                 const McOptions& mc, const char* stream,
                                 const std::function<void(const Innovations&)>& visit) {
    if (mode == CheckMode::Exact) {
        if (!dist.enumerable())
            throw ValidationError("exact mode needs a finite-alphabet distribution, got " +
                                  dist.name());
        const std::size_t count = enumeration_count(dist, N);
        Innovations innov;
        enumerate_paths(dist, N, [&](const std::vector<double>& xi) {
            innov.xi = xi;  // reuses capacity between paths
            visit(innov);
        });
        return count;
    }
    if (mc.replicates == 0) throw ValidationError("monte carlo mode needs replicates >= 1");
    for (std::size_t r = 0; r < mc.replicates; ++r)
        visit(draw_innovations(dist, derive_seed(mc.seed, r, stream), N));
    return mc.replicates;
}

bool exact_holds(double margin, double rhs) {
    // Exact-mode arithmetic is rational but rounded to doubles; allow dust.
    return margin >= -1e-9 * std::max(1.0, std::fabs(rhs));
}

}  // namespace

InequalityReport cbm_bound(const ArrayDistribution& dist, const WeightSchedule& w, std::size_t n,
                           std::size_t N, CheckMode mode, const McOptions& mc) {
    check_common(dist, w, n, N);
    const double p = w.p;

    std::vector<double> row;
    std::vector<double> margins;  // per-realization margin, for the MC verdict
    KahanSum t1_sum, t2_sum, hit_sum;
    const std::size_t count = for_each_realization(
        dist, N, mode, mc, "cbm", [&](const Innovations& innov) {
            build_row(dist, innov, N, row);
            double s = 0.0;
            double max_stat = 0.0;
            double t1 = 0.0;
            KahanSum t2;
            KahanSum acc;
            for (std::size_t m = 1; m <= N; ++m) {
                acc.add(row[m - 1]);
                s = acc.value();
                if (m < n) continue;
                const double stat = w.at(m) * std::fabs(s);
                if (stat > max_stat) max_stat = stat;
                const double sp = std::pow(std::fabs(s), p);
                if (m == N)
                    t1 = std::pow(w.at(N), p) * sp;
                else
                    t2.add((std::pow(w.at(m), p) - std::pow(w.at(m + 1), p)) * sp);
            }
            const double hit = max_stat >= 1.0 ? 1.0 : 0.0;
            t1_sum.add(t1);
            t2_sum.add(t2.value());
            hit_sum.add(hit);
            margins.push_back(t1 + t2.value() - hit);
        });

    InequalityReport rep;
    rep.lambda = 1.0;
    rep.mode = mode;
    const double inv = 1.0 / static_cast<double>(count);
    rep.rhs_term1 = t1_sum.value() * inv;
    rep.rhs_term2 = t2_sum.value() * inv;
    rep.rhs = rep.rhs_term1 + rep.rhs_term2;
    rep.lhs = hit_sum.value() * inv;
    rep.margin = rep.rhs - rep.lhs;
    if (mode == CheckMode::Exact) {
        rep.holds = exact_holds(rep.margin, rep.rhs);
    } else {
        rep.replicates = count;
        rep.std_error = std_error(margins);
        rep.holds = rep.margin >= -3.0 * rep.std_error;
    }
    return rep;
}

std::vector<InequalityReport> thm2_check_grid(const ArrayDistribution& dist,
                                              const WeightSchedule& w, std::size_t n,
                                              std::size_t N, const std::vector<double>& lambdas,
                                              CheckMode mode, const McOptions& mc) {
    check_common(dist, w, n, N);
    if (lambdas.empty()) throw ValidationError("lambda grid is empty");
    for (double l : lambdas)
        if (!(l > 0.0)) throw ValidationError("lambda must be positive, got " + format_double(l));
    const double p = w.p;

    std::vector<double> row, prev;
    std::vector<double> rhs_r, max_r;  // per-realization, shared across lambdas
    KahanSum t1_sum, t2_sum, t3_sum;
    const std::size_t count = for_each_realization(
        dist, N, mode, mc, "thm2", [&](const Innovations& innov) {
            const Thm2Stats st = thm2_stats(dist, innov, w, n, N, row, prev);
            t1_sum.add(st.term1);
            t2_sum.add(st.term2);
            t3_sum.add(st.term3);
            rhs_r.push_back(st.term1 + st.term2 + st.term3);
            max_r.push_back(st.max_stat);
        });

    const double inv = 1.0 / static_cast<double>(count);
    const double term1 = t1_sum.value() * inv;
    const double term2 = t2_sum.value() * inv;
    const double term3 = t3_sum.value() * inv;
    const double scale = std::pow(2.0, -p);

    std::vector<InequalityReport> out;
    out.reserve(lambdas.size());
    std::vector<double> margins(count);
    for (double lambda : lambdas) {
        InequalityReport rep;
        rep.lambda = lambda;
        rep.mode = mode;
        rep.rhs_term1 = term1;
        rep.rhs_term2 = term2;
        rep.rhs_term3 = term3;
        rep.rhs = term1 + term2 + term3;
        const double lam_p = scale * std::pow(lambda, p);
        KahanSum hit;
        for (std::size_t r = 0; r < count; ++r) {
            const double ind = max_r[r] > lambda ? 1.0 : 0.0;
            hit.add(ind);
            margins[r] = rhs_r[r] - lam_p * ind;
        }
        rep.lhs = lam_p * hit.value() * inv;
        rep.margin = rep.rhs - rep.lhs;
        if (mode == CheckMode::Exact) {
            rep.holds = exact_holds(rep.margin, rep.rhs);
        } else {
            rep.replicates = count;
            rep.std_error = std_error(margins);
            rep.holds = rep.margin >= -3.0 * rep.std_error;
        }
        out.push_back(rep);
    }
    return out;
}

InequalityReport thm2_check(const ArrayDistribution& dist, const WeightSchedule& w, std::size_t n,
                            std::size_t N, double lambda, CheckMode mode, const McOptions& mc) {
    return thm2_check_grid(dist, w, n, N, {lambda}, mode, mc).front();
}

double burkholder_constant(double p) {
    if (!(p > 1.0)) throw ValidationError("moment order must satisfy p > 1, got " +
                                          format_double(p));
    const double q = p / (p - 1.0);
    const long ip = static_cast<long>(std::lround(p));
    if (std::fabs(p - static_cast<double>(ip)) < 1e-12 && ip % 2 == 0) {
        // (18 p sqrt(q))^p = (324 p^2 q)^(p/2), exact for even integer p.
        const double base = 324.0 * p * p * q;
        double out = 1.0;
        for (long i = 0; i < ip / 2; ++i) out *= base;
        return out;
    }
    return std::pow(18.0 * p * std::sqrt(q), p);
}

InequalityReport burkholder_check(const ArrayDistribution& dist, double p, std::size_t n,
                                  std::size_t k, CheckMode mode, const McOptions& mc) {
    if (k == 0 || k > n)
        throw ValidationError("need 1 <= k <= n, got k=" + std::to_string(k) +
                              " n=" + std::to_string(n));
    const double c = burkholder_constant(p);  // also rejects p <= 1
    const double k_factor = std::pow(static_cast<double>(k), std::max(p / 2.0, 1.0) - 1.0);

    std::vector<double> row, margins;
    KahanSum lhs_sum, dsum_sum;
    const std::size_t count = for_each_realization(
        dist, n, mode, mc, "burkholder", [&](const Innovations& innov) {
            build_row(dist, innov, n, row);
            KahanSum m, d;
            for (std::size_t j = 0; j < k; ++j) {
                m.add(row[j]);
                d.add(std::pow(std::fabs(row[j]), p));
            }
            const double lhs_r = std::pow(std::fabs(m.value()), p);
            lhs_sum.add(lhs_r);
            dsum_sum.add(d.value());
            margins.push_back(c * k_factor * d.value() - lhs_r);
        });

    InequalityReport rep;
    rep.mode = mode;
    const double inv = 1.0 / static_cast<double>(count);
    rep.lhs = lhs_sum.value() * inv;
    rep.rhs_term1 = c * k_factor * dsum_sum.value() * inv;
    rep.rhs = rep.rhs_term1;
    rep.margin = rep.rhs - rep.lhs;
    if (mode == CheckMode::Exact) {
        rep.holds = exact_holds(rep.margin, rep.rhs);
    } else {
        rep.replicates = count;
        rep.std_error = std_error(margins);
        rep.holds = rep.margin >= -3.0 * rep.std_error;
    }
    return rep;
}

}  // namespace marlab
