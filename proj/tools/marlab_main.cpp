#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "marlab/harness.hpp"

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

void add_common(CLI::App* sub, Common& c, bool config_required = true) {
    auto* opt = sub->add_option("--config", c.config, "JSON experiment config");
    if (config_required) opt->required();
    sub->add_option("--seed", [&c](const CLI::results_t& r) {
        c.seed = std::stoull(r.at(0));
        return true;
    }, "master seed override");
    sub->add_option("--out", [&c](const CLI::results_t& r) {
        c.out = r.at(0);
        return true;
    }, "output directory override");
}

int run(const Common& c, const std::optional<nlohmann::json>& inline_cfg = {}) {
    marlab::RunOptions opts;
    opts.seed = c.seed;
    opts.out_dir = c.out;
    const marlab::RunResult result = inline_cfg
                                         ? marlab::run_config(*inline_cfg, opts)
                                         : marlab::run_config_file(c.config, opts);
    std::cout << (result.pass ? "pass" : "FAIL") << "  csv=" << result.csv_path
              << "  json=" << result.json_path << "\n";
    return result.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"martingale-array laboratory"};
    app.require_subcommand(1);

    Common c_ineq, c_slln, c_drift, c_poisson, c_ergo, c_reg;

    // verify-inequality accepts either a config file or direct flags.
    auto* ineq = app.add_subcommand("verify-inequality", "maximal/moment inequality checks");
    add_common(ineq, c_ineq, false);
    std::string g_name = "rademacher-nested", schedule = "1/n", mode = "exact", check = "thm2";
    double p = 2.0;
    std::size_t n = 1, N = 8, k = 0, replicates = 10000;
    std::vector<double> lambda_grid;
    ineq->add_option("--check", check, "thm2|cbm|burkholder");
    ineq->add_option("--generator", g_name, "rademacher-nested|nested-iid|rademacher-weighted");
    ineq->add_option("--p", p, "moment order");
    ineq->add_option("--schedule", schedule, "1/n | const | n^<exponent>");
    ineq->add_option("--n", n, "start index");
    ineq->add_option("--N", N, "horizon");
    ineq->add_option("--k", k, "moment-bound prefix length (defaults to N)");
    ineq->add_option("--lambda-grid", lambda_grid, "thresholds")->delimiter(',');
    ineq->add_option("--mode", mode, "exact|mc");
    ineq->add_option("--replicates", replicates, "MC replicates");

    auto* slln = app.add_subcommand("slln", "convergence-condition diagnostics");
    add_common(slln, c_slln);
    auto* drift = app.add_subcommand("check-drift", "drift condition and moment bound");
    add_common(drift, c_drift);
    auto* poisson = app.add_subcommand("poisson", "finite-chain Poisson equation solver");
    add_common(poisson, c_poisson);
    auto* ergo = app.add_subcommand("ergodicity", "finite-chain ergodicity rate");
    add_common(ergo, c_ergo);
    auto* reg = app.add_subcommand("kernel-regression", "estimator consistency experiment");
    add_common(reg, c_reg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (ineq->parsed()) {
            if (!c_ineq.config.empty()) return run(c_ineq);
            nlohmann::json cfg;
            cfg["kind"] = "inequality";
            cfg["check"] = check;
            cfg["generator"] = {{"type", g_name}};
            cfg["mode"] = mode;
            cfg["replicates"] = replicates;
            if (check == "burkholder") {
                // the moment bound takes a row index and a prefix length
                cfg["p"] = p;
                cfg["n"] = N;
                cfg["k"] = k == 0 ? N : k;
            } else {
                cfg["n"] = n;
                cfg["N"] = N;
                cfg["schedule"] = marlab::schedule_shorthand(schedule, p);
                if (check == "thm2")
                    cfg["lambda_grid"] = lambda_grid.empty()
                                             ? nlohmann::json::array({0.5, 1.0, 2.0})
                                             : nlohmann::json(lambda_grid);
            }
            return run(c_ineq, cfg);
        }
        if (slln->parsed()) return run(c_slln);
        if (drift->parsed()) return run(c_drift);
        if (poisson->parsed()) return run(c_poisson);
        if (ergo->parsed()) return run(c_ergo);
        if (reg->parsed()) return run(c_reg);
    } catch (const marlab::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
