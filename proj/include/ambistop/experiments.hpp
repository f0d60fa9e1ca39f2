#pragma once

#include "ambistop/csv_io.hpp"
#include "ambistop/minimax.hpp"
#include "ambistop/stopping_fd.hpp"
#include "ambistop/stopping_lsmc.hpp"

namespace ambistop {

// Desk-scale configuration shared by the pipelines. Lists correspond to the
// sweeps of the stock figures; LSMC settings drive the divestment runs.
struct ExperimentSpec {
    std::uint64_t seed = 42;

    // stock example
    std::vector<double> lambdas{-5.0, -2.0, -1.0, -0.5, 0.5, 0.9};
    std::vector<double> sigmas{0.10, 0.15, 0.20, 0.25, 0.30};
    double sigma = 0.30;     // volatility for the single-sigma figures
    double stock_s0 = 1.0;
    double stock_r = 0.02;
    double stock_horizon = 5.0;
    Vector stock_drifts;     // defaults to the (-5%, 5%, 15%) configuration
    int fd_nx = 301;
    int fd_steps_per_year = 24;
    bool bermudan = false;
    double outer_tol = 1e-7;

    GbmStockModel stock_model(double sigma_) const {
        Vector b = stock_drifts;
        if (b.size() == 0) {
            b = Vector(3);
            b << -0.05, 0.05, 0.15;
        }
        return GbmStockModel(stock_s0, sigma_, stock_r, stock_horizon, std::move(b));
    }

    // divestment example
    int lsmc_paths = 4000;
    int lsmc_basis_degree = 2;
    double hist_lambda = -2.0;  // aversion used for the figure-6 style run

    // minimax certification
    double grid_step = 0.01;
    int n_instances = 5;
};

// Inner solver for the stock dual: variational-inequality solve under q,
// then per-scenario expectations of the induced rule. Caches by measure so
// lambda sweeps share the expensive solves.
InnerSolver make_stock_inner(const GbmStockModel& model, const FdGrid& grid,
                             const FdOptions& opts);

// Inner solver for the divestment dual via LSMC under common random numbers.
InnerSolver make_divest_inner(const DivestModel& model, const LsmcConfig& cfg);

// Figure 2: dual stock value and minimizing measure per lambda.
ResultTable run_stock_ambiguity_sweep(const ExperimentSpec& spec);

// Figure 3: dual stock value over (sigma, lambda), with per-step decrements
// as the monotonicity diagnostic.
ResultTable run_sigma_sweep(const ExperimentSpec& spec);

// Figures 1 and 4: exercise boundary without ambiguity and boundaries at the
// minimizing measures for each lambda.
ResultTable run_stock_boundaries(const ExperimentSpec& spec);

// Figures 5 and 6: divestment value by information mode and lambda sweep,
// plus closure-time histograms per mode.
ResultTable run_divest_pipeline(const ExperimentSpec& spec, const DivestModel& model);

// Posterior filter diagnostics (martingale drift, terminal concentration).
ResultTable run_filter_sim(const ExperimentSpec& spec, const DivestModel& model, int n_paths);

// Small-instance certification table over the standard functional set.
ResultTable run_minimax_check(const ExperimentSpec& spec);

// Deterministic random instances for certification: binary trees with 2-3
// decision periods, 2-3 scenarios, positive payoffs.
SmallInstance random_small_instance(std::uint64_t seed);

// The four ambiguity functionals exercised by the certification runs.
std::vector<AmbiguityFunction> certification_functionals();

// In-repo synthetic stand-in for the scenario data: four scenarios ordered
// from business-as-usual to steep carbon price, ten annual steps, two risk
// factors (margin index and carbon price index).
ScenarioPack synthetic_scenario_pack();

struct DivestParams {
    double sigma_s = 6.0;
    double beta = 0.95;
    double phi_diag = 0.7;
    Vector vol_diag;        // defaults to (4, 2) sized to the pack
    Vector revenue_weights; // defaults to (1, -0.8)
    double revenue_const = 0.0;
    double capital_cost = 300.0;
    double salvage_fraction = 0.3;  // K(t) = -salvage_fraction * capital_cost
    NoiseKind noise = NoiseKind::Gaussian;
};

DivestModel build_divest_model(const ScenarioPack& pack, const DivestParams& params = {});

}  // namespace ambistop
