#include "marlab/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "marlab/inequality.hpp"
#include "marlab/markov.hpp"
#include "marlab/regression.hpp"
#include "marlab/rng.hpp"
#include "marlab/slln.hpp"

namespace marlab {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ValidationError(path.empty() ? msg : path + ": " + msg);
}

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known) fail(join(path, it.key()), "unknown key");
    }
}

double need_num(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) fail(join(path, key), "missing required number");
    const json& v = obj.at(key);
    if (!v.is_number()) fail(join(path, key), "expected a number");
    return v.get<double>();
}

double opt_num(const json& obj, const std::string& path, const char* key, double def) {
    if (!obj.contains(key)) return def;
    const json& v = obj.at(key);
    if (!v.is_number()) fail(join(path, key), "expected a number");
    return v.get<double>();
}

std::size_t as_size(const json& v, const std::string& where) {
    if (!v.is_number_integer() || v.get<long long>() < 0)
        fail(where, "expected a nonnegative integer");
    return static_cast<std::size_t>(v.get<long long>());
}

std::size_t need_size(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) fail(join(path, key), "missing required integer");
    return as_size(obj.at(key), join(path, key));
}

std::size_t opt_size(const json& obj, const std::string& path, const char* key, std::size_t def) {
    if (!obj.contains(key)) return def;
    return as_size(obj.at(key), join(path, key));
}

std::uint64_t opt_u64(const json& obj, const std::string& path, const char* key,
                      std::uint64_t def) {
    if (!obj.contains(key)) return def;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail(join(path, key), "expected an integer");
    return v.get<std::uint64_t>();
}

std::string need_str(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) fail(join(path, key), "missing required string");
    const json& v = obj.at(key);
    if (!v.is_string()) fail(join(path, key), "expected a string");
    return v.get<std::string>();
}

std::string opt_str(const json& obj, const std::string& path, const char* key,
                    const std::string& def) {
    if (!obj.contains(key)) return def;
    const json& v = obj.at(key);
    if (!v.is_string()) fail(join(path, key), "expected a string");
    return v.get<std::string>();
}

std::vector<double> need_num_array(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) fail(join(path, key), "missing required array");
    const json& v = obj.at(key);
    if (!v.is_array() || v.empty()) fail(join(path, key), "expected a non-empty array");
    std::vector<double> out;
    for (const json& e : v) {
        if (!e.is_number()) fail(join(path, key), "expected numbers only");
        out.push_back(e.get<double>());
    }
    return out;
}

// ---------------------------------------------------------------- CSV table

std::string cell(double v) { return format_double(v); }
std::string cell(std::size_t v) { return std::to_string(v); }
std::string cell(bool v) { return v ? "true" : "false"; }

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string text() const {
        std::string out;
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) out += ',';
            out += header[i];
        }
        out += '\n';
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out += ',';
                out += row[i];
            }
            out += '\n';
        }
        return out;
    }
};

// ------------------------------------------------------------- sub-configs

Ar1Model parse_model(const json& j, const std::string& path) {
    require_object(j, path);
    check_keys(j, path, {"phi", "sigma", "tau", "tau_kind"});
    Ar1Model model;
    model.phi = need_num(j, path, "phi");
    model.sigma = need_num(j, path, "sigma");
    const double tau0 = opt_num(j, path, "tau", 0.5);
    const std::string tk = opt_str(j, path, "tau_kind", "constant");
    if (tk == "constant")
        model.tau = TauSpec::constant(tau0);
    else if (tk == "wave")
        model.tau = TauSpec::wave(tau0);
    else
        fail(join(path, "tau_kind"), "expected constant|wave");
    return model;
}

FiniteChain parse_chain(const json& j, const std::string& path) {
    require_object(j, path);
    const std::string type = need_str(j, path, "type");
    if (type == "two-state") {
        check_keys(j, path, {"type", "a", "b"});
        return FiniteChain::two_state(need_num(j, path, "a"), need_num(j, path, "b"));
    }
    if (type == "file") {
        check_keys(j, path, {"type", "path"});
        return FiniteChain::from_file(need_str(j, path, "path"));
    }
    if (type == "rows") {
        check_keys(j, path, {"type", "rows"});
        if (!j.contains("rows") || !j.at("rows").is_array())
            fail(join(path, "rows"), "expected an array of rows");
        std::vector<std::vector<double>> rows;
        for (const json& r : j.at("rows")) {
            if (!r.is_array()) fail(join(path, "rows"), "expected arrays of numbers");
            std::vector<double> row;
            for (const json& e : r) {
                if (!e.is_number()) fail(join(path, "rows"), "expected numbers only");
                row.push_back(e.get<double>());
            }
            rows.push_back(std::move(row));
        }
        return FiniteChain::from_rows(rows);
    }
    if (type == "random") {
        check_keys(j, path, {"type", "m", "seed"});
        Rng rng(opt_u64(j, path, "seed", 1));
        return FiniteChain::random_ergodic(need_size(j, path, "m"), rng);
    }
    fail(join(path, "type"), "expected two-state|file|rows|random");
}

}  // namespace

RegressionProblem parse_problem_config(const json& j, const std::string& path) {
    require_object(j, path);
    check_keys(j, path, {"chain", "r", "psi", "kernel", "beta", "x0"});
    if (!j.contains("chain")) fail(join(path, "chain"), "missing required object");
    RegressionProblem problem;
    problem.model = parse_model(j.at("chain"), join(path, "chain"));
    problem.model.r = RegressionFn::parse(opt_str(j, path, "r", "sin"));
    problem.psi = PsiSpec::parse(opt_str(j, path, "psi", "one"));
    problem.kernel = KernelSpec::parse(opt_str(j, path, "kernel", "gaussian"));
    problem.bandwidth = BandwidthSchedule(opt_num(j, path, "beta", 0.2));
    problem.x0 = opt_num(j, path, "x0", 0.0);
    return problem;
}

WeightSchedule parse_schedule_config(const json& j, const std::string& path) {
    require_object(j, path);
    const std::string type = need_str(j, path, "type");
    const double p = need_num(j, path, "p");
    if (type == "power") {
        check_keys(j, path, {"type", "exponent", "p"});
        return WeightSchedule::power(need_num(j, path, "exponent"), p);
    }
    if (type == "explicit") {
        check_keys(j, path, {"type", "values", "p"});
        return WeightSchedule::explicit_values(need_num_array(j, path, "values"), p);
    }
    fail(join(path, "type"), "expected power|explicit");
}

ArrayDistribution parse_generator_config(const json& j, const std::string& path) {
    require_object(j, path);
    const std::string type = need_str(j, path, "type");
    if (type == "rademacher-nested") {
        check_keys(j, path, {"type", "scale"});
        return ArrayDistribution::rademacher_nested(opt_num(j, path, "scale", 1.0));
    }
    if (type == "nested-iid") {
        check_keys(j, path, {"type", "scale"});
        return ArrayDistribution::nested_iid(opt_num(j, path, "scale", 1.0));
    }
    if (type == "rademacher-weighted") {
        check_keys(j, path, {"type", "amp", "row_scale", "taper", "history"});
        return ArrayDistribution::rademacher_weighted(
            opt_num(j, path, "amp", 1.0), opt_num(j, path, "row_scale", 0.5),
            opt_num(j, path, "taper", 0.5), opt_num(j, path, "history", 0.5));
    }
    if (type == "chain-kernel") {
        check_keys(j, path, {"type", "chain", "r", "psi", "kernel", "beta", "x0"});
        json problem = j;
        problem.erase("type");
        return ArrayDistribution::chain_kernel(parse_problem_config(problem, path));
    }
    if (type == "explicit") {
        check_keys(j, path, {"type", "rows", "file"});
        if (j.contains("file")) return ArrayDistribution::explicit_from_file(need_str(j, path, "file"));
        if (!j.contains("rows") || !j.at("rows").is_array())
            fail(join(path, "rows"), "expected an array of rows");
        std::vector<std::vector<double>> rows;
        for (const json& r : j.at("rows")) {
            if (!r.is_array()) fail(join(path, "rows"), "expected arrays of numbers");
            std::vector<double> row;
            for (const json& e : r) {
                if (!e.is_number()) fail(join(path, "rows"), "expected numbers only");
                row.push_back(e.get<double>());
            }
            rows.push_back(std::move(row));
        }
        return ArrayDistribution::explicit_rows(std::move(rows));
    }
    fail(join(path, "type"),
         "expected rademacher-nested|nested-iid|rademacher-weighted|chain-kernel|explicit");
}

nlohmann::json schedule_shorthand(const std::string& text, double p) {
    json j;
    j["type"] = "power";
    j["p"] = p;
    if (text == "1/n") {
        j["exponent"] = -1.0;
    } else if (text == "const" || text == "constant") {
        j["exponent"] = 0.0;
    } else if (text.rfind("n^", 0) == 0) {
        char* end = nullptr;
        const std::string rest = text.substr(2);
        const double e = std::strtod(rest.c_str(), &end);
        if (end == rest.c_str() || *end != '\0')
            throw ValidationError("schedule: cannot parse exponent in '" + text + "'");
        j["exponent"] = e;
    } else {
        throw ValidationError("schedule: expected 1/n, const, or n^<exponent>, got '" + text + "'");
    }
    return j;
}

namespace {

json report_row(const InequalityReport& r) {
    json row;
    row["lambda"] = r.lambda;
    row["lhs"] = r.lhs;
    row["rhs"] = r.rhs;
    row["margin"] = r.margin;
    row["holds"] = r.holds;
    if (r.mode == CheckMode::MonteCarlo) {
        row["replicates"] = r.replicates;
        row["std_error"] = r.std_error;
    }
    return row;
}

void csv_inequality_row(Csv& csv, const InequalityReport& r) {
    csv.rows.push_back({cell(r.lambda), cell(r.lhs), cell(r.rhs_term1), cell(r.rhs_term2),
                        cell(r.rhs_term3), cell(r.holds)});
}

// Each runner fills the CSV and verdicts and returns overall pass.

bool run_inequality(const json& cfg, std::uint64_t seed, Csv& csv, json& verdicts) {
    check_keys(cfg, "", {"kind", "name", "out", "seed", "check", "generator", "schedule", "n", "N",
                         "lambda_grid", "p", "k", "mode", "replicates"});
    const std::string check = opt_str(cfg, "", "check", "thm2");
    if (!cfg.contains("generator")) fail("generator", "missing required object");
    const ArrayDistribution dist = parse_generator_config(cfg.at("generator"), "generator");
    const std::string mode_s = opt_str(cfg, "", "mode", "exact");
    if (mode_s != "exact" && mode_s != "mc") fail("mode", "expected exact|mc");
    const CheckMode mode = mode_s == "exact" ? CheckMode::Exact : CheckMode::MonteCarlo;
    McOptions mc;
    mc.replicates = opt_size(cfg, "", "replicates", 10000);
    mc.seed = seed;

    csv.header = {"lambda", "lhs", "rhs_term1", "rhs_term2", "rhs_term3", "holds"};
    if ((check == "thm2" || check == "cbm") && !cfg.contains("schedule"))
        fail("schedule", "missing required object");
    bool pass = true;
    if (check == "thm2") {
        const WeightSchedule w = parse_schedule_config(cfg.at("schedule"), "schedule");
        const std::size_t n = need_size(cfg, "", "n");
        const std::size_t N = need_size(cfg, "", "N");
        std::vector<double> lambdas = need_num_array(cfg, "", "lambda_grid");
        const auto reports = thm2_check_grid(dist, w, n, N, lambdas, mode, mc);
        for (const auto& r : reports) {
            csv_inequality_row(csv, r);
            verdicts["checks"].push_back(report_row(r));
            pass = pass && r.holds;
        }
    } else if (check == "cbm") {
        const WeightSchedule w = parse_schedule_config(cfg.at("schedule"), "schedule");
        const auto r = cbm_bound(dist, w, need_size(cfg, "", "n"), need_size(cfg, "", "N"), mode, mc);
        csv_inequality_row(csv, r);
        verdicts["checks"].push_back(report_row(r));
        pass = r.holds;
    } else if (check == "burkholder") {
        const double p = need_num(cfg, "", "p");
        const auto r =
            burkholder_check(dist, p, need_size(cfg, "", "n"), need_size(cfg, "", "k"), mode, mc);
        csv_inequality_row(csv, r);
        verdicts["checks"].push_back(report_row(r));
        verdicts["constant"] = burkholder_constant(p);
        pass = r.holds;
    } else {
        fail("check", "expected thm2|cbm|burkholder");
    }
    return pass;
}

bool run_slln(const json& cfg, std::uint64_t seed, Csv& csv, json& verdicts) {
    check_keys(cfg, "", {"kind", "name", "out", "seed", "generator", "schedule", "p", "n0",
                         "horizon", "replicates", "trajectory_seeds"});
    if (!cfg.contains("generator")) fail("generator", "missing required object");
    const ArrayDistribution dist = parse_generator_config(cfg.at("generator"), "generator");
    if (!cfg.contains("schedule")) fail("schedule", "missing required object");
    const WeightSchedule w = parse_schedule_config(cfg.at("schedule"), "schedule");
    const double p = opt_num(cfg, "", "p", w.p);
    const std::size_t n0 = opt_size(cfg, "", "n0", 1);
    const std::size_t horizon = need_size(cfg, "", "horizon");
    const std::size_t replicates = opt_size(cfg, "", "replicates", 200);
    const std::size_t n_seeds = opt_size(cfg, "", "trajectory_seeds", 20);
    if (n_seeds == 0) fail("trajectory_seeds", "expected at least 1");

    const SllnReport rep = corollary1_terms(dist, w, p, n0, horizon, replicates, seed);
    std::vector<std::uint64_t> seeds;
    for (std::size_t i = 0; i < n_seeds; ++i) seeds.push_back(derive_seed(seed, i, "slln-path"));
    const DiagonalPaths dp = diagonal_paths(dist, w, seeds, horizon, rep.grid);

    csv.header = {"n", "term_a", "term_b", "r_partial_sum", "running_sup_median",
                  "running_sup_q95"};
    for (std::size_t i = 0; i < rep.grid.size(); ++i)
        csv.rows.push_back({cell(rep.grid[i]), cell(rep.term_a[i]), cell(rep.term_b[i]),
                            cell(rep.r_partial_sum[i]), cell(dp.running_sup_median[i]),
                            cell(dp.running_sup_q95[i])});

    verdicts["term_a_slope"] = rep.term_a_slope;
    verdicts["r_increment_slope"] = rep.r_increment_slope;
    verdicts["term_a_tends_zero"] = rep.term_a_tends_zero;
    verdicts["r_summable"] = rep.r_summable;
    verdicts["term_b_tail"] = rep.term_b_tail;
    return rep.term_a_tends_zero && rep.r_summable;
}

bool run_drift(const json& cfg, std::uint64_t seed, Csv& csv, json& verdicts) {
    check_keys(cfg, "", {"kind", "name", "out", "seed", "phi", "sigma", "lambda_d", "b",
                         "small_set", "grid", "n_max", "replicates"});
    Ar1Model model;
    model.phi = opt_num(cfg, "", "phi", 0.5);
    model.sigma = opt_num(cfg, "", "sigma", 1.0);
    DriftSpec spec = DriftSpec::ar1_default(model.phi, model.sigma);
    if (cfg.contains("lambda_d")) spec.lambda_d = need_num(cfg, "", "lambda_d");
    if (cfg.contains("b")) spec.b = need_num(cfg, "", "b");
    if (cfg.contains("small_set")) {
        const auto ss = need_num_array(cfg, "", "small_set");
        if (ss.size() != 2 || ss[0] >= ss[1]) fail("small_set", "expected [lo, hi] with lo < hi");
        spec.small_set_lo = ss[0];
        spec.small_set_hi = ss[1];
    }
    double lo = -10.0, hi = 10.0;
    std::size_t points = 401;
    if (cfg.contains("grid")) {
        const auto g = need_num_array(cfg, "", "grid");
        if (g.size() != 3 || g[0] >= g[1] || g[2] < 2) fail("grid", "expected [lo, hi, points]");
        lo = g[0];
        hi = g[1];
        points = static_cast<std::size_t>(g[2]);
    }
    const std::size_t n_max = opt_size(cfg, "", "n_max", 200);
    const std::size_t replicates = opt_size(cfg, "", "replicates", 2000);

    const DriftReport dr = drift_margin(model, spec, linspace(lo, hi, points));
    const MomentBoundReport mb = stationary_moment_bound(model, spec, n_max, replicates, seed);

    csv.header = {"x", "V", "PV", "margin"};
    for (std::size_t i = 0; i < dr.grid.size(); ++i) {
        const double x = dr.grid[i];
        const double v = spec.V(x);
        csv.rows.push_back(
            {cell(x), cell(v), cell(apply_kernel_to_V(model, spec.V, x)), cell(dr.margin[i])});
    }
    verdicts["min_margin"] = dr.min_margin;
    verdicts["argmin_x"] = dr.argmin_x;
    verdicts["drift_holds"] = dr.holds;
    verdicts["moment_bound"] = mb.bound;
    verdicts["moment_mu_V"] = mb.mu_V;
    verdicts["moment_sup_estimate"] = mb.sup_estimate;
    verdicts["moment_std_error"] = mb.std_error_at_sup;
    verdicts["moment_holds"] = mb.holds;
    return dr.holds && mb.holds;
}

bool run_poisson(const json& cfg, std::uint64_t, Csv& csv, json& verdicts) {
    check_keys(cfg, "", {"kind", "name", "out", "seed", "chain", "f", "L"});
    if (!cfg.contains("chain")) fail("chain", "missing required object");
    const FiniteChain chain = parse_chain(cfg.at("chain"), "chain");
    const std::vector<double> f = need_num_array(cfg, "", "f");
    if (f.size() != chain.size()) fail("f", "length must match the chain size");
    const std::size_t L = opt_size(cfg, "", "L", 0);

    const PoissonSolution sol = poisson_solve_finite(chain, f, L);
    csv.header = {"state", "f", "g_solve", "g_series"};
    for (std::size_t s = 0; s < chain.size(); ++s)
        csv.rows.push_back({cell(s), cell(f[s]), cell(sol.g_solve[s]), cell(sol.g_series[s])});

    double max_diff = 0.0;
    for (std::size_t s = 0; s < chain.size(); ++s)
        max_diff = std::max(max_diff, std::fabs(sol.g_solve[s] - sol.g_series[s]));
    verdicts["pi_f"] = sol.pi_f;
    verdicts["rho"] = sol.rho;
    verdicts["terms_used"] = sol.terms_used;
    verdicts["residual_solve"] = sol.residual_solve;
    verdicts["residual_series"] = sol.residual_series;
    verdicts["series_tail_bound"] = sol.series_tail_bound;
    verdicts["solve_series_max_diff"] = max_diff;
    return sol.residual_solve <= 1e-10 && max_diff <= std::max(1e-8, 10.0 * sol.series_tail_bound);
}

bool run_ergodicity(const json& cfg, std::uint64_t, Csv& csv, json& verdicts) {
    check_keys(cfg, "", {"kind", "name", "out", "seed", "chain"});
    if (!cfg.contains("chain")) fail("chain", "missing required object");
    const FiniteChain chain = parse_chain(cfg.at("chain"), "chain");
    const ErgodicityReport er = ergodicity_rate(chain);

    csv.header = {"rho", "ergodic", "prefactor", "decay_slope", "fit_points"};
    csv.rows.push_back({cell(er.rho), cell(er.ergodic), cell(er.prefactor), cell(er.decay_slope),
                        cell(er.fit_points)});
    verdicts["rho"] = er.rho;
    verdicts["ergodic"] = er.ergodic;
    verdicts["decay_slope"] = er.decay_slope;
    bool slope_ok = true;
    if (er.rho > 1e-12 && er.fit_points >= 3) {
        const double target = std::log(er.rho);
        slope_ok = std::fabs(er.decay_slope - target) <= std::max(0.15 * std::fabs(target), 1e-6);
    }
    verdicts["decay_slope_matches_rho"] = slope_ok;
    return er.ergodic && slope_ok;
}

bool run_regression(const json& cfg, std::uint64_t seed, Csv& csv, json& verdicts) {
    check_keys(cfg, "", {"kind", "name", "out", "seed", "chain", "r", "psi", "kernel", "beta",
                         "x0", "n_grid", "seeds"});
    json pj;
    for (const char* k : {"chain", "r", "psi", "kernel", "beta", "x0"})
        if (cfg.contains(k)) pj[k] = cfg.at(k);
    const RegressionProblem problem = parse_problem_config(pj, "");
    if (!cfg.contains("n_grid") || !cfg.at("n_grid").is_array() || cfg.at("n_grid").empty())
        fail("n_grid", "expected a non-empty array");
    std::vector<std::size_t> n_grid;
    for (const json& e : cfg.at("n_grid")) n_grid.push_back(as_size(e, "n_grid"));
    const std::size_t seeds = opt_size(cfg, "", "seeds", 20);

    const ConsistencyReport rep = consistency_experiment(problem, n_grid, seeds, seed);
    csv.header = {"n", "seed", "r_hat_psi", "r_hat", "bias", "boundary", "error"};
    for (const ConsistencyPoint& pt : rep.points)
        csv.rows.push_back({cell(pt.n), cell(pt.seed), cell(pt.r_hat_psi), cell(pt.r_hat),
                            cell(pt.bias), cell(pt.boundary), cell(pt.error)});

    verdicts["target"] = rep.target;
    verdicts["median_error"] = rep.median_error;
    verdicts["q95_error"] = rep.q95_error;
    verdicts["median_non_increasing"] = rep.median_non_increasing;
    return rep.median_non_increasing;
}

std::string resolve_out_dir(const json& cfg, const RunOptions& opts) {
    if (opts.out_dir) return *opts.out_dir;
    if (const char* env = std::getenv(kOutDirEnv))
        if (*env) return env;
    return opt_str(cfg, "", "out", ".");
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open output file " + path);
    out << text;
}

}  // namespace

RunResult run_config(const json& config, const RunOptions& opts) {
    require_object(config, "");
    const std::string kind = need_str(config, "", "kind");
    const std::uint64_t seed = opts.seed ? *opts.seed : opt_u64(config, "", "seed", 1);
    const std::string name = opt_str(config, "", "name", kind);

    const auto start = std::chrono::steady_clock::now();
    Csv csv;
    json verdicts = json::object();
    bool pass = false;
    if (kind == "inequality")
        pass = run_inequality(config, seed, csv, verdicts);
    else if (kind == "slln")
        pass = run_slln(config, seed, csv, verdicts);
    else if (kind == "drift")
        pass = run_drift(config, seed, csv, verdicts);
    else if (kind == "poisson")
        pass = run_poisson(config, seed, csv, verdicts);
    else if (kind == "ergodicity")
        pass = run_ergodicity(config, seed, csv, verdicts);
    else if (kind == "regression")
        pass = run_regression(config, seed, csv, verdicts);
    else
        fail("kind", "expected inequality|slln|drift|poisson|ergodicity|regression");
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const std::string dir = resolve_out_dir(config, opts);
    std::filesystem::create_directories(dir);

    RunResult result;
    result.pass = pass;
    result.csv_path = dir + "/" + name + ".csv";
    result.json_path = dir + "/" + name + ".json";

    json resolved = config;
    resolved["seed"] = seed;
    result.report["version"] = kVersion;
    result.report["kind"] = kind;
    result.report["pass"] = pass;
    result.report["config"] = resolved;
    result.report["verdicts"] = verdicts;
    result.report["wall_clock_seconds"] = elapsed;
    result.report["outputs"] = {{"csv", result.csv_path}};

    write_file(result.csv_path, csv.text());
    write_file(result.json_path, result.report.dump(2) + "\n");
    return result;
}

RunResult run_config_file(const std::string& path, const RunOptions& opts) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file " + path);
    json config;
    try {
        config = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(path + ": " + e.what());
    }
    return run_config(config, opts);
}

}  // namespace marlab
