#include "ambistop/experiments.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <memory>

namespace ambistop {

namespace {

std::vector<long long> measure_key(const SimplexPoint& q) {
    std::vector<long long> key(static_cast<std::size_t>(q.size()));
    for (Eigen::Index i = 0; i < q.size(); ++i)
        key[static_cast<std::size_t>(i)] = llround(q[i] * 4e12);
    return key;
}

}  // namespace

InnerSolver make_stock_inner(const GbmStockModel& model, const FdGrid& grid,
                             const FdOptions& opts) {
    auto cache = std::make_shared<std::map<std::vector<long long>, InnerResult>>();
    return [model, grid, opts, cache](const SimplexPoint& q) -> InnerResult {
        auto key = measure_key(q);
        auto it = cache->find(key);
        if (it != cache->end()) return it->second;
        ValueSurface surface = solve_vi(model, q, grid, opts);
        InnerResult res;
        res.expectations = scenario_expectations(model, surface);
        res.value = model.s0 + std::max(0.0, surface_value_at(surface, 0, model.x0()));
        (*cache)[key] = res;
        return res;
    };
}

InnerSolver make_divest_inner(const DivestModel& model, const LsmcConfig& cfg) {
    auto cache = std::make_shared<std::map<std::vector<long long>, InnerResult>>();
    auto model_ptr = std::make_shared<DivestModel>(model);
    return [model_ptr, cfg, cache](const SimplexPoint& q) -> InnerResult {
        auto key = measure_key(q);
        auto it = cache->find(key);
        if (it != cache->end()) return it->second;
        DivestSolution sol = lsmc_value(*model_ptr, q, cfg, InfoMode::Learning);
        InnerResult res;
        res.expectations = sol.scenario_values;
        res.value = sol.value;
        (*cache)[key] = res;
        return res;
    };
}

ResultTable run_stock_ambiguity_sweep(const ExperimentSpec& spec) {
    GbmStockModel model = spec.stock_model(spec.sigma);
    FdGrid grid = default_grid(model, spec.fd_nx, spec.fd_steps_per_year);
    FdOptions opts;
    opts.bermudan = spec.bermudan;
    InnerSolver inner = make_stock_inner(model, grid, opts);
    SimplexPoint p = SimplexPoint::uniform(model.n_scenarios());

    ResultTable table;
    double prev = -std::numeric_limits<double>::infinity();
    for (double lambda : spec.lambdas) {
        AmbiguityFunction f = AmbiguityFunction::power(lambda);
        OuterResult res = outer_minimize(inner, f, p, spec.outer_tol);
        table.add("fig2", "lambda", lambda, "dual_value", res.dual_value);
        for (Eigen::Index i = 0; i < res.q_star.size(); ++i)
            table.add("fig2", "lambda", lambda, "q" + std::to_string(i + 1), res.q_star[i]);
        if (std::isfinite(prev))
            table.add("fig2", "lambda", lambda, "value_increment", res.dual_value - prev);
        prev = res.dual_value;
    }
    return table;
}

ResultTable run_sigma_sweep(const ExperimentSpec& spec) {
    ResultTable table;
    for (double lambda : spec.lambdas) {
        AmbiguityFunction f = AmbiguityFunction::power(lambda);
        double prev = std::numeric_limits<double>::infinity();
        for (double sigma : spec.sigmas) {
            GbmStockModel model = spec.stock_model(sigma);
            FdGrid grid = default_grid(model, spec.fd_nx, spec.fd_steps_per_year);
            FdOptions opts;
            opts.bermudan = spec.bermudan;
            InnerSolver inner = make_stock_inner(model, grid, opts);
            SimplexPoint p = SimplexPoint::uniform(model.n_scenarios());
            OuterResult res = outer_minimize(inner, f, p, spec.outer_tol);
            const std::string tag = "[lambda=" + format_double(lambda) + "]";
            table.add("fig3", "sigma", sigma, "dual_value" + tag, res.dual_value);
            if (std::isfinite(prev))
                table.add("fig3", "sigma", sigma, "value_decrement" + tag, prev - res.dual_value);
            prev = res.dual_value;
        }
    }
    return table;
}

ResultTable run_stock_boundaries(const ExperimentSpec& spec) {
    GbmStockModel model = spec.stock_model(spec.sigma);
    FdGrid grid = default_grid(model, spec.fd_nx, spec.fd_steps_per_year);
    FdOptions opts;
    opts.bermudan = spec.bermudan;
    SimplexPoint p = SimplexPoint::uniform(model.n_scenarios());
    const double dt = grid.dt(model.horizon_T);

    ResultTable table;
    {
        ValueSurface s = solve_vi(model, p, grid, opts);
        auto boundary = extract_boundary(s);
        // posterior mean stock drift along x = x0 (arithmetic parametrization)
        DriftPrior prior(model.drifts, p, model.sigma, model.x0());
        for (std::size_t n = 0; n < boundary.size(); ++n) {
            const double t = static_cast<double>(n) * dt;
            if (boundary[n])
                table.add("fig1", "t", t, "boundary_x", *boundary[n]);
            table.add("fig1", "t", t, "posterior_drift_at_x0", gamma_drift(prior, t, model.x0()));
        }
        table.add("fig1", "t", 0.0, "stock_value",
                  model.s0 + std::max(0.0, surface_value_at(s, 0, model.x0())));
    }

    InnerSolver inner = make_stock_inner(model, grid, opts);
    for (double lambda : spec.lambdas) {
        AmbiguityFunction f = AmbiguityFunction::power(lambda);
        OuterResult res = outer_minimize(inner, f, p, spec.outer_tol);
        ValueSurface s = solve_vi(model, res.q_star, grid, opts);
        auto boundary = extract_boundary(s);
        const std::string tag = "[lambda=" + format_double(lambda) + "]";
        for (std::size_t n = 0; n < boundary.size(); ++n) {
            if (!boundary[n]) continue;
            table.add("fig4", "t", static_cast<double>(n) * dt, "boundary_x" + tag, *boundary[n]);
        }
    }
    return table;
}

ResultTable run_divest_pipeline(const ExperimentSpec& spec, const DivestModel& model) {
    SimplexPoint p = SimplexPoint::uniform(model.n_scenarios());
    LsmcConfig cfg;
    cfg.n_paths = spec.lsmc_paths;
    cfg.basis_degree = spec.lsmc_basis_degree;
    cfg.seed = spec.seed;

    ResultTable table;
    DivestSolution revealed = lsmc_value(model, p, cfg, InfoMode::Revealed);
    DivestSolution learning = lsmc_value(model, p, cfg, InfoMode::Learning);
    DivestSolution frozen = lsmc_value(model, p, cfg, InfoMode::FrozenPrior);

    InnerSolver inner = make_divest_inner(model, cfg);
    std::map<double, OuterResult> sweep;
    for (double lambda : spec.lambdas) {
        AmbiguityFunction f = AmbiguityFunction::power(lambda);
        sweep[lambda] = outer_minimize(inner, f, p, spec.outer_tol);
    }

    for (double lambda : spec.lambdas) {
        const OuterResult& res = sweep[lambda];
        table.add("fig5", "lambda", lambda, "value_ambiguity", res.dual_value);
        table.add("fig5", "lambda", lambda, "value_revealed", revealed.value);
        table.add("fig5", "lambda", lambda, "value_learning", learning.value);
        table.add("fig5", "lambda", lambda, "value_frozen_prior", frozen.value);
        for (Eigen::Index i = 0; i < res.q_star.size(); ++i)
            table.add("fig5", "lambda", lambda,
                      "q[" + model.scenario_labels[static_cast<std::size_t>(i)] + "]",
                      res.q_star[i]);
    }

    auto hist_rows = [&](const std::string& experiment, const DivestSolution& sol) {
        for (int t = 0; t <= model.horizon_T; ++t)
            for (int i = 0; i < model.n_scenarios(); ++i)
                table.add(experiment, "year", t,
                          "freq[" + model.scenario_labels[static_cast<std::size_t>(i)] + "]",
                          sol.closure_freq(t, i));
    };
    hist_rows("fig6_revealed", revealed);
    hist_rows("fig6_learning", learning);
    {
        AmbiguityFunction f = AmbiguityFunction::power(spec.hist_lambda);
        OuterResult res = sweep.count(spec.hist_lambda)
                              ? sweep[spec.hist_lambda]
                              : outer_minimize(inner, f, p, spec.outer_tol);
        DivestSolution averse = lsmc_value(model, res.q_star, cfg, InfoMode::Learning);
        hist_rows("fig6_ambiguity", averse);
        double mean_learning = 0.0, mean_averse = 0.0;
        for (std::size_t pth = 0; pth < learning.stop_times.size(); ++pth)
            mean_learning += learning.stop_times[pth];
        for (std::size_t pth = 0; pth < averse.stop_times.size(); ++pth)
            mean_averse += averse.stop_times[pth];
        mean_learning /= static_cast<double>(learning.stop_times.size());
        mean_averse /= static_cast<double>(averse.stop_times.size());
        table.add("fig6_ambiguity", "year", 0, "mean_closure_time", mean_averse);
        table.add("fig6_learning", "year", 0, "mean_closure_time", mean_learning);
    }
    return table;
}

ResultTable run_filter_sim(const ExperimentSpec& spec, const DivestModel& model, int n_paths) {
    SimplexPoint p = SimplexPoint::uniform(model.n_scenarios());
    LearningPaths paths = simulate_learning_paths(model, p, n_paths, spec.seed,
                                                  ScenarioDraw::Redrawn);
    const int T = model.horizon_T;
    const int N = model.n_scenarios();

    ResultTable table;
    double worst_ratio = 0.0;
    for (int i = 0; i < N; ++i) {
        for (int t = 0; t < T; ++t) {
            double m0 = 0.0, m1 = 0.0, s1 = 0.0;
            for (int pth = 0; pth < n_paths; ++pth) {
                double a = paths.pi[static_cast<std::size_t>(pth)](t, i);
                double b = paths.pi[static_cast<std::size_t>(pth)](t + 1, i);
                m0 += a;
                m1 += b;
                s1 += (b - a) * (b - a);
            }
            m0 /= n_paths;
            m1 /= n_paths;
            double se = std::sqrt(std::max(s1 / n_paths - (m1 - m0) * (m1 - m0), 0.0) /
                                  n_paths);
            double ratio = se > 0.0 ? std::abs(m1 - m0) / se : 0.0;
            worst_ratio = std::max(worst_ratio, ratio);
            table.add("filter", "t", t,
                      "mean_pi[" + model.scenario_labels[static_cast<std::size_t>(i)] + "]", m0);
        }
    }
    table.add("filter", "t", T, "max_martingale_drift_se_ratio", worst_ratio);

    // terminal concentration on the redrawn scenario
    LearningPaths labeled = simulate_learning_paths(model, p, n_paths, spec.seed,
                                                    ScenarioDraw::Fixed);
    int concentrated = 0;
    for (int pth = 0; pth < n_paths; ++pth) {
        int th = labeled.theta(pth, 0);
        if (labeled.pi[static_cast<std::size_t>(pth)](T, th) > 0.99) ++concentrated;
    }
    table.add("filter", "t", T, "frac_terminal_posterior_above_0.99",
              static_cast<double>(concentrated) / n_paths);
    return table;
}

std::vector<AmbiguityFunction> certification_functionals() {
    return {AmbiguityFunction::power(-2.0), AmbiguityFunction::power(-0.5),
            AmbiguityFunction::power(0.5), AmbiguityFunction::exponential(1.0)};
}

SmallInstance random_small_instance(std::uint64_t seed) {
    Rng rng(derive_seed(seed, 7));
    const int n_scen = 2 + static_cast<int>(rng.next() % 2);     // 2 or 3
    const int depth = 2 + static_cast<int>(rng.next() % 2);      // decision periods
    SmallInstance inst;
    inst.n_scenarios = n_scen;

    // binary tree with `depth` decision levels plus a forced terminal level;
    // payoffs follow a multiplicative walk so rules have moderate dispersion
    struct Pending {
        int node;
        int level;
        double level_payoff;
    };
    inst.nodes.push_back({1.0, 0, {}, Matrix()});
    std::vector<Pending> queue{{0, 0, 1.0}};
    while (!queue.empty()) {
        Pending cur = queue.back();
        queue.pop_back();
        if (cur.level == depth) continue;  // terminal level reached
        auto& nd = inst.nodes[static_cast<std::size_t>(cur.node)];
        nd.trans = Matrix(n_scen, 2);
        for (int i = 0; i < n_scen; ++i) {
            double up = 0.25 + 0.5 * rng.uniform();  // in [0.25, 0.75]
            nd.trans(i, 0) = up;
            nd.trans(i, 1) = 1.0 - up;
        }
        for (int c = 0; c < 2; ++c) {
            double shock = (c == 0 ? 1.0 : -1.0) * (0.10 + 0.10 * rng.uniform());
            double pay = cur.level_payoff * (1.0 + shock) * (0.98 + 0.04 * rng.uniform());
            int id = static_cast<int>(inst.nodes.size());
            inst.nodes.push_back({pay, cur.level + 1, {}, Matrix()});
            inst.nodes[static_cast<std::size_t>(cur.node)].children.push_back(id);
            queue.push_back({id, cur.level + 1, pay});
        }
    }
    inst.validate();
    return inst;
}

ResultTable run_minimax_check(const ExperimentSpec& spec) {
    ResultTable table;
    for (int k = 0; k < spec.n_instances; ++k) {
        SmallInstance inst = random_small_instance(spec.seed + static_cast<std::uint64_t>(k));
        SimplexPoint p = SimplexPoint::uniform(inst.n_scenarios);
        int fi = 0;
        for (const AmbiguityFunction& f : certification_functionals()) {
            DualResult dual = dual_value(inst, p, f, spec.grid_step);
            PrimalResult primal = primal_value(inst, p, f);
            const std::string tag = "[f=" + std::to_string(fi) + "]";
            table.add("minimax_check", "instance", k, "gap" + tag,
                      std::abs(dual.certificate.gap));
            table.add("minimax_check", "instance", k, "saddle_violation" + tag,
                      dual.certificate.max_violation);
            table.add("minimax_check", "instance", k, "primal_minus_supinf" + tag,
                      primal.value - dual.certificate.maxmin_pure);
            table.add("minimax_check", "instance", k, "minmax" + tag, dual.value);
            ++fi;
        }
    }
    return table;
}

ScenarioPack synthetic_scenario_pack() {
    ScenarioPack pack;
    pack.labels = {"current_policies", "ndc", "net_zero_2050", "divergent_net_zero"};
    pack.horizon_T = 10;
    pack.n_factors = 2;
    const int T = pack.horizon_T;
    // factor 0: power margin index; factor 1: carbon price index
    auto path = [&](double m0, double mslope, double c0, double cslope) {
        Matrix m(T + 1, 2);
        for (int t = 0; t <= T; ++t) {
            m(t, 0) = m0 + mslope * t;
            m(t, 1) = c0 + cslope * t;
        }
        return m;
    };
    pack.mu_paths.push_back(path(50.0, 0.0, 10.0, 0.0));
    pack.mu_paths.push_back(path(50.0, -1.0, 10.0, 3.0));
    pack.mu_paths.push_back(path(45.0, -2.0, 15.0, 8.0));
    pack.mu_paths.push_back(path(40.0, -5.0, 30.0, 15.0));
    // emissions-style signal: flat under current policies, steep decline
    // under divergent net zero
    pack.signal_means = Matrix(4, T + 1);
    const double rates[4] = {0.0, 2.0, 5.0, 8.0};
    for (int i = 0; i < 4; ++i)
        for (int t = 0; t <= T; ++t) pack.signal_means(i, t) = 100.0 - rates[i] * t;
    return pack;
}

DivestModel build_divest_model(const ScenarioPack& pack, const DivestParams& params) {
    const int K = pack.n_factors;
    DivestModel model;
    model.phi = Matrix::Identity(K, K) * params.phi_diag;
    Vector vol = params.vol_diag;
    if (vol.size() == 0) {
        vol = Vector::Constant(K, 2.0);
        if (K >= 1) vol[0] = 4.0;
    }
    if (vol.size() != K) throw std::invalid_argument("build_divest_model: vol_diag size");
    model.vol = vol.asDiagonal();
    model.mu_paths = pack.mu_paths;
    model.signal_means = pack.signal_means;
    model.sigma_s = params.sigma_s;
    model.beta = params.beta;
    model.horizon_T = pack.horizon_T;
    model.scenario_labels = pack.labels;
    model.noise = params.noise;

    Vector w = params.revenue_weights;
    if (w.size() == 0) {
        w = Vector::Constant(K, 0.0);
        w[0] = 1.0;
        if (K >= 2) w[1] = -0.8;
    }
    if (w.size() != K) throw std::invalid_argument("build_divest_model: revenue weight size");
    const double c = params.revenue_const;
    model.revenue = [w, c](const Vector& x) { return w.dot(x) + c; };
    const double salvage = -params.salvage_fraction * params.capital_cost;
    model.closure_cost = [salvage](int) { return salvage; };
    model.validate();
    return model;
}

}  // namespace ambistop
