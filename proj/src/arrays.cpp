#include "marlab/arrays.hpp"

#include "marlab/rng.hpp"

namespace marlab {

std::string WeightSchedule::name() const {
    if (kind == Kind::Explicit) return "explicit";
    if (exponent == 0.0) return "constant";
    return "n^" + format_double(exponent);
}

WeightSchedule WeightSchedule::power(double exponent, double p) {
    if (!(p >= 1.0)) throw ValidationError("weight schedule: p must be >= 1");
    WeightSchedule w;
    w.kind = Kind::PowerLaw;
    w.exponent = exponent;
    w.p = p;
    return w;
}

WeightSchedule WeightSchedule::explicit_values(std::vector<double> values, double p) {
    if (!(p >= 1.0)) throw ValidationError("weight schedule: p must be >= 1");
    if (values.empty()) throw ValidationError("weight schedule: empty explicit values");
    WeightSchedule w;
    w.kind = Kind::Explicit;
    w.values = std::move(values);
    w.p = p;
    return w;
}

std::optional<std::size_t> validate_schedule(const WeightSchedule& w, std::size_t N) {
    if (N == 0) throw ValidationError("validate_schedule: N must be >= 1");
    double prev = 0.0;
    for (std::size_t n = 1; n <= N; ++n) {
        const double c = w.at(n);
        if (!(c > 0.0)) return n;
        if (n > 1 && c > prev) return n;
        prev = c;
    }
    return std::nullopt;
}

std::size_t ArrayDistribution::alphabet_size() const {
    switch (kind) {
        case Kind::RademacherNested:
        case Kind::RademacherWeighted: return 2;
        case Kind::Explicit: return 1;
        default:
            throw ValidationError("array distribution " + name() +
                                  " has no finite innovation alphabet");
    }
}

std::string ArrayDistribution::name() const {
    switch (kind) {
        case Kind::NestedIID: return "nested-iid";
        case Kind::RademacherNested: return "rademacher-nested";
        case Kind::RademacherWeighted: return "rademacher-weighted";
        case Kind::ChainKernel: return "chain-kernel";
        case Kind::Explicit: return "explicit";
    }
    return "?";
}

ArrayDistribution ArrayDistribution::nested_iid(double scale) {
    ArrayDistribution d;
    d.kind = Kind::NestedIID;
    d.scale = scale;
    return d;
}

ArrayDistribution ArrayDistribution::rademacher_nested(double scale) {
    ArrayDistribution d;
    d.kind = Kind::RademacherNested;
    d.scale = scale;
    return d;
}

ArrayDistribution ArrayDistribution::rademacher_weighted(double amp, double row_scale,
                                                         double taper, double history) {
    ArrayDistribution d;
    d.kind = Kind::RademacherWeighted;
    d.amp = amp;
    d.row_scale = row_scale;
    d.taper = taper;
    d.history = history;
    return d;
}

ArrayDistribution ArrayDistribution::chain_kernel(RegressionProblem problem) {
    problem.model.validate();
    ArrayDistribution d;
    d.kind = Kind::ChainKernel;
    d.chain = std::make_shared<const RegressionProblem>(std::move(problem));
    return d;
}

ArrayDistribution ArrayDistribution::explicit_rows(std::vector<std::vector<double>> rows) {
    for (std::size_t n = 0; n < rows.size(); ++n)
        if (rows[n].size() != n + 1)
            throw ValidationError("explicit array: row " + std::to_string(n + 1) + " has " +
                                  std::to_string(rows[n].size()) + " entries, expected " +
                                  std::to_string(n + 1));
    ArrayDistribution d;
    d.kind = Kind::Explicit;
    d.rows = std::move(rows);
    return d;
}

ArrayDistribution ArrayDistribution::explicit_from_file(const std::string& path) {
    return explicit_rows(read_numeric_rows(path));
}

ArrayDistribution ArrayDistribution::zeros(std::size_t N) {
    std::vector<std::vector<double>> rows(N);
    for (std::size_t n = 0; n < N; ++n) rows[n].assign(n + 1, 0.0);
    return explicit_rows(std::move(rows));
}

Innovations draw_innovations(const ArrayDistribution& dist, std::uint64_t seed, std::size_t N) {
    Innovations innov;
    switch (dist.kind) {
        case ArrayDistribution::Kind::NestedIID: {
            Rng rng(seed);
            innov.xi.resize(N);
            for (auto& x : innov.xi) x = rng.normal();
            break;
        }
        case ArrayDistribution::Kind::RademacherNested:
        case ArrayDistribution::Kind::RademacherWeighted: {
            Rng rng(seed);
            innov.xi.resize(N);
            for (auto& x : innov.xi) x = rng.rademacher();
            break;
        }
        case ArrayDistribution::Kind::ChainKernel: {
            innov.chain = std::make_shared<const ChainKernelRows>(
                *dist.chain, dist.chain->model.simulate(N, seed));
            break;
        }
        case ArrayDistribution::Kind::Explicit: {
            if (N > dist.rows.size())
                throw ValidationError("explicit array has only " +
                                      std::to_string(dist.rows.size()) + " rows, need " +
                                      std::to_string(N));
            break;
        }
    }
    return innov;
}

double row_entry(const ArrayDistribution& dist, const Innovations& innov, std::size_t n,
                 std::size_t i) {
    if (i < 1 || i > n) throw ValidationError("row_entry: index out of range");
    switch (dist.kind) {
        case ArrayDistribution::Kind::NestedIID:
        case ArrayDistribution::Kind::RademacherNested:
            return dist.scale * innov.xi.at(i - 1);
        case ArrayDistribution::Kind::RademacherWeighted: {
            const double dn = static_cast<double>(n);
            const double hist = i >= 2 ? 1.0 + dist.history * innov.xi.at(i - 2) : 1.0;
            return dist.amp * (1.0 + dist.row_scale / dn) *
                   (1.0 + dist.taper * static_cast<double>(i) / dn) * hist * innov.xi.at(i - 1);
        }
        case ArrayDistribution::Kind::ChainKernel: return innov.chain->entry(n, i);
        case ArrayDistribution::Kind::Explicit: return dist.rows.at(n - 1).at(i - 1);
    }
    return 0.0;
}

void build_row(const ArrayDistribution& dist, const Innovations& innov, std::size_t n,
               std::vector<double>& out) {
    if (dist.kind == ArrayDistribution::Kind::ChainKernel) {
        innov.chain->row(n, out);
        return;
    }
    out.resize(n);
    for (std::size_t i = 1; i <= n; ++i) out[i - 1] = row_entry(dist, innov, n, i);
}

TriangularArray::TriangularArray(ArrayDistribution dist, std::uint64_t seed, std::size_t horizon)
    : dist_(std::move(dist)), seed_(seed), horizon_(horizon) {
    if (horizon == 0) throw ValidationError("triangular array: horizon must be >= 1");
    innov_ = draw_innovations(dist_, seed_, horizon_);
}

double TriangularArray::entry(std::size_t n, std::size_t i) const {
    if (n < 1 || n > horizon_) throw ValidationError("triangular array: row out of range");
    return row_entry(dist_, innov_, n, i);
}

std::vector<double> TriangularArray::row(std::size_t n) const {
    if (n < 1 || n > horizon_) throw ValidationError("triangular array: row out of range");
    std::vector<double> out;
    build_row(dist_, innov_, n, out);
    return out;
}

TriangularArray generate(const ArrayDistribution& dist, std::uint64_t seed, std::size_t N) {
    return TriangularArray(dist, seed, N);
}

std::vector<double> partial_sums(const TriangularArray& arr, std::size_t n) {
    const std::vector<double> r = arr.row(n);
    std::vector<double> sums(n);
    KahanSum acc;
    for (std::size_t i = 0; i < n; ++i) {
        acc.add(r[i]);
        sums[i] = acc.value();
    }
    return sums;
}

double extended_sum(const TriangularArray& arr, std::size_t n, std::size_t k) {
    if (k < 1) throw ValidationError("extended_sum: k must be >= 1");
    if (std::max(n, k) > arr.horizon())
        throw ValidationError("extended_sum: rows up to " + std::to_string(std::max(n, k)) +
                              " required, horizon is " + std::to_string(arr.horizon()));
    KahanSum acc;
    const std::vector<double> r = arr.row(n);
    for (std::size_t i = 0; i < std::min(n, k); ++i) acc.add(r[i]);
    for (std::size_t j = n + 1; j <= k; ++j) acc.add(arr.entry(j, j));
    return acc.value();
}

double row_increment(const TriangularArray& arr, std::size_t n) {
    if (n < 2) throw ValidationError("row_increment: n must be >= 2");
    if (n > arr.horizon()) throw ValidationError("row_increment: row out of range");
    const std::vector<double> cur = arr.row(n);
    const std::vector<double> prev = arr.row(n - 1);
    KahanSum acc;
    for (std::size_t j = 0; j + 1 < n; ++j) acc.add(cur[j] - prev[j]);
    return acc.value();
}

std::vector<double> diagonal_sums(const TriangularArray& arr, std::size_t N) {
    if (N < 1 || N > arr.horizon()) throw ValidationError("diagonal_sums: bad horizon");
    std::vector<double> sums(N);
    if (arr.distribution().nested()) {
        KahanSum acc;
        for (std::size_t m = 1; m <= N; ++m) {
            acc.add(arr.entry(m, m));
            sums[m - 1] = acc.value();
        }
        return sums;
    }
    std::vector<double> row;
    for (std::size_t m = 1; m <= N; ++m) {
        build_row(arr.distribution(), arr.innovations(), m, row);
        KahanSum acc;
        for (double v : row) acc.add(v);
        sums[m - 1] = acc.value();
    }
    return sums;
}

std::size_t enumeration_count(const ArrayDistribution& dist, std::size_t N) {
    const std::size_t a = dist.alphabet_size();
    std::size_t count = 1;
    for (std::size_t i = 0; i < N; ++i) {
        if (count > kEnumerationCap / std::max<std::size_t>(a, 1))
            throw ValidationError("enumeration overflow: alphabet^N exceeds 2^24");
        count *= a;
    }
    return count;
}

void enumerate_paths(const ArrayDistribution& dist, std::size_t N,
                     const std::function<void(const std::vector<double>&)>& visit) {
    const std::size_t count = enumeration_count(dist, N);
    std::vector<double> xi(N);
    if (dist.alphabet_size() == 1) {
        visit(xi);  // Explicit: innovations are unused
        return;
    }
    for (std::size_t c = 0; c < count; ++c) {
        for (std::size_t i = 0; i < N; ++i) xi[i] = (c >> i) & 1 ? 1.0 : -1.0;
        visit(xi);
    }
}

namespace {

// Enumerates prefixes of length `len` and reports the worst conditional-mean
// defect of `fn(xi)` over the final innovation; fn may read xi[0..len-1].
double prefix_defect(const ArrayDistribution& dist, std::size_t len,
                     const std::function<double(const std::vector<double>&)>& fn) {
    const std::size_t a = dist.alphabet_size();
    std::vector<double> xi(len, 0.0);
    double worst = 0.0;
    if (a == 1) {  // Explicit: conditioning is trivial
        return std::abs(fn(xi));
    }
    const std::size_t prefixes = std::size_t{1} << (len - 1);
    for (std::size_t c = 0; c < prefixes; ++c) {
        for (std::size_t i = 0; i + 1 < len; ++i) xi[i] = (c >> i) & 1 ? 1.0 : -1.0;
        KahanSum mean;
        for (double letter : {-1.0, 1.0}) {
            xi[len - 1] = letter;
            mean.add(fn(xi));
        }
        worst = std::max(worst, std::abs(mean.value() / 2.0));
    }
    return worst;
}

}  // namespace

double martingale_defect(const ArrayDistribution& dist, std::size_t N) {
    enumeration_count(dist, N);  // validates enumerability and size
    Innovations innov;           // filled per prefix below
    double worst = 0.0;
    for (std::size_t n = 1; n <= N; ++n) {
        for (std::size_t i = 1; i <= n; ++i) {
            const double d = prefix_defect(dist, i, [&](const std::vector<double>& xi) {
                innov.xi = xi;
                return row_entry(dist, innov, n, i);
            });
            worst = std::max(worst, d);
        }
    }
    return worst;
}

double extended_sum_martingale_defect(const ArrayDistribution& dist, std::size_t n0,
                                      std::size_t N) {
    if (n0 < 1 || n0 > N) throw ValidationError("extended defect: need 1 <= n0 <= N");
    enumeration_count(dist, N);
    Innovations innov;
    const auto s_val = [&](const std::vector<double>& xi, std::size_t m) {
        innov.xi = xi;
        KahanSum acc;
        for (std::size_t i = 1; i <= n0; ++i) acc.add(row_entry(dist, innov, n0, i));
        for (std::size_t j = n0 + 1; j <= m; ++j) acc.add(row_entry(dist, innov, j, j));
        return acc.value();
    };
    double worst = 0.0;
    for (std::size_t m = n0 + 1; m <= N; ++m) {
        const double d = prefix_defect(dist, m, [&](const std::vector<double>& xi) {
            return s_val(xi, m) - s_val(xi, m - 1);
        });
        worst = std::max(worst, d);
    }
    return worst;
}

double cross_row_martingale_defect(const ArrayDistribution& dist, std::size_t N) {
    if (N < 2) throw ValidationError("cross-row defect: N must be >= 2");
    enumeration_count(dist, N);
    Innovations innov;
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 <= N; ++k) {
        const double d = prefix_defect(dist, k, [&](const std::vector<double>& xi) {
            innov.xi = xi;
            return row_entry(dist, innov, N, k) - row_entry(dist, innov, N - 1, k);
        });
        worst = std::max(worst, d);
    }
    return worst;
}

}  // namespace marlab
