// Command-line front end: stock (figures 1-4), divest (figures 5-6),
// minimax-check (small-instance certification), filter-sim (posterior
// diagnostics). Exit codes: 0 success, 2 usage, 3 data error, 4 numerical
// failure.

#include "ambistop/experiments.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace {

using namespace ambistop;

struct Overrides {
    std::map<std::string, std::string> kv;

    static Overrides parse(const std::vector<std::string>& pairs) {
        Overrides o;
        for (const std::string& s : pairs) {
            auto eq = s.find('=');
            if (eq == std::string::npos || eq == 0)
                throw UsageError("--set expects key=value, got '" + s + "'");
            o.kv[s.substr(0, eq)] = s.substr(eq + 1);
        }
        return o;
    }

    bool take(const std::string& key, double& out) {
        auto it = kv.find(key);
        if (it == kv.end()) return false;
        out = std::stod(it->second);
        kv.erase(it);
        return true;
    }

    bool take(const std::string& key, Vector& out) {
        auto it = kv.find(key);
        if (it == kv.end()) return false;
        std::vector<double> vals;
        std::string cur;
        for (char c : it->second + ",") {
            if (c == ',') {
                if (!cur.empty()) vals.push_back(std::stod(cur));
                cur.clear();
            } else {
                cur += c;
            }
        }
        out = Eigen::Map<Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
        kv.erase(it);
        return true;
    }

    void reject_unknown() const {
        if (!kv.empty()) throw UsageError("unknown --set key '" + kv.begin()->first + "'");
    }
};

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir);
}

void report(const std::vector<std::string>& files) {
    for (const std::string& f : files) std::cout << "wrote " << f << "\n";
}

int run_stock(const ExperimentSpec& spec_in, Overrides ov, const std::string& out_dir) {
    ExperimentSpec spec = spec_in;
    ov.take("s0", spec.stock_s0);
    ov.take("r", spec.stock_r);
    ov.take("T", spec.stock_horizon);
    ov.take("drifts", spec.stock_drifts);
    ov.take("outer_tol", spec.outer_tol);
    ov.reject_unknown();

    ResultTable table;
    table.append(run_stock_ambiguity_sweep(spec));
    table.append(run_stock_boundaries(spec));
    table.append(run_sigma_sweep(spec));
    ensure_dir(out_dir);
    report(emit_results(table, out_dir, {"fig2", "fig3"},
                        {"fig1", "fig2", "fig3", "fig4"}));
    return 0;
}

int run_divest(const ExperimentSpec& spec, Overrides ov, const std::string& scenarios,
               const std::string& out_dir) {
    DivestParams params;
    ov.take("sigma_s", params.sigma_s);
    ov.take("beta", params.beta);
    ov.take("phi_diag", params.phi_diag);
    ov.take("vol_diag", params.vol_diag);
    ov.take("revenue_weights", params.revenue_weights);
    ov.take("revenue_const", params.revenue_const);
    ov.take("capital_cost", params.capital_cost);
    ov.take("salvage_fraction", params.salvage_fraction);
    ov.reject_unknown();

    ScenarioPack pack = load_scenarios(scenarios);
    DivestModel model = build_divest_model(pack, params);
    ResultTable table = run_divest_pipeline(spec, model);
    ensure_dir(out_dir);
    report(emit_results(table, out_dir, {"fig5"},
                        {"fig5", "fig6_revealed", "fig6_learning", "fig6_ambiguity"}));
    return 0;
}

int run_minimax(const ExperimentSpec& spec, Overrides ov, const std::string& out_dir) {
    ov.reject_unknown();
    ResultTable table = run_minimax_check(spec);
    ensure_dir(out_dir);
    report(emit_results(table, out_dir));
    double worst_gap = 0.0, worst_viol = 0.0;
    for (const ResultRow& row : table.rows) {
        if (row.quantity.rfind("gap", 0) == 0) worst_gap = std::max(worst_gap, row.value);
        if (row.quantity.rfind("saddle_violation", 0) == 0)
            worst_viol = std::max(worst_viol, row.value);
    }
    std::cout << "worst |max-min - min-max| gap: " << format_double(worst_gap) << "\n"
              << "worst saddle inequality violation: " << format_double(worst_viol) << "\n";
    return 0;
}

int run_filter(const ExperimentSpec& spec, Overrides ov, const std::string& scenarios,
               int n_paths, const std::string& out_dir) {
    DivestParams params;
    ov.take("sigma_s", params.sigma_s);
    ov.take("beta", params.beta);
    ov.reject_unknown();
    ScenarioPack pack = scenarios.empty() ? synthetic_scenario_pack() : load_scenarios(scenarios);
    DivestModel model = build_divest_model(pack, params);
    ResultTable table = run_filter_sim(spec, model, n_paths);
    ensure_dir(out_dir);
    report(emit_results(table, out_dir));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal stopping and divestment under smooth scenario ambiguity"};
    app.require_subcommand(1);

    ExperimentSpec spec;
    std::string out_dir = "out";
    std::vector<std::string> set_pairs;
    std::string scenarios_path;
    int filter_paths = 10000;

    app.add_option("--seed", spec.seed, "master RNG seed");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--set", set_pairs, "model overrides as key=value")->take_all();

    auto* stock = app.add_subcommand("stock", "stock example pipelines (figures 1-4)");
    stock->add_option("--lambda", spec.lambdas, "ambiguity exponents")->take_all();
    stock->add_option("--sigma", spec.sigmas, "volatilities")->take_all();
    stock->add_option("--nx", spec.fd_nx, "space grid points");
    stock->add_option("--steps-per-year", spec.fd_steps_per_year, "time steps per year");
    stock->add_flag("--bermudan", spec.bermudan, "restrict exercise to yearly dates");

    auto* divest = app.add_subcommand("divest", "divestment pipelines (figures 5-6)");
    divest->add_option("--scenarios", scenarios_path, "scenario pack CSV")->required();
    divest->add_option("--lambda", spec.lambdas, "ambiguity exponents")->take_all();
    divest->add_option("--paths", spec.lsmc_paths, "Monte Carlo paths");
    divest->add_option("--basis-degree", spec.lsmc_basis_degree, "regression basis degree");
    divest->add_option("--hist-lambda", spec.hist_lambda, "aversion for the histogram run");

    auto* minimax = app.add_subcommand("minimax-check", "small-instance certification");
    minimax->add_option("--grid-step", spec.grid_step, "simplex grid step");
    minimax->add_option("--instances", spec.n_instances, "number of random instances");

    auto* filter = app.add_subcommand("filter-sim", "posterior filter diagnostics");
    filter->add_option("--scenarios", scenarios_path, "scenario pack CSV (default synthetic)");
    filter->add_option("--paths", filter_paths, "simulated paths");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        Overrides ov = Overrides::parse(set_pairs);
        if (stock->parsed()) {
            // single-sigma figures use the first requested volatility
            if (!spec.sigmas.empty()) spec.sigma = spec.sigmas.back();
            return run_stock(spec, std::move(ov), out_dir);
        }
        if (divest->parsed()) return run_divest(spec, std::move(ov), scenarios_path, out_dir);
        if (minimax->parsed()) return run_minimax(spec, std::move(ov), out_dir);
        if (filter->parsed())
            return run_filter(spec, std::move(ov), scenarios_path, filter_paths, out_dir);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const SchemaError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const LengthMismatch& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    }
    return 2;
}
