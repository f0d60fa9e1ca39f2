#pragma once

#include "ambistop/learning.hpp"
#include "ambistop/stock_model.hpp"

#include <optional>

namespace ambistop {

// Space-time grid for the log-price variational inequality.
struct FdGrid {
    double x_min = -2.0;
    double x_max = 2.0;
    int nx = 401;  // space points
    int nt = 200;  // time steps

    double dx() const { return (x_max - x_min) / (nx - 1); }
    double dt(double horizon) const { return horizon / nt; }

    void validate(double x0) const {
        if (!(x_min < x0 && x0 < x_max))
            throw std::invalid_argument("FdGrid: x0 must lie inside (x_min, x_max)");
        if (nx < 3 || nt < 1) throw std::invalid_argument("FdGrid: nx >= 3, nt >= 1");
    }
};

// Truncation at log S0 +/- 6 sigma sqrt(T); nt is a multiple of the yearly
// exercise dates so the Bermudan variant aligns with the grid.
FdGrid default_grid(const GbmStockModel& model, int nx = 401, int steps_per_year = 40);

struct ValueSurface {
    Matrix values;                               // (nt+1) x nx, v(t_n, x_j) >= 0
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> continuation_mask;
    FdGrid grid;
    double horizon = 0.0;
};

struct FdOptions {
    double theta = 0.5;       // Crank-Nicolson
    double psor_tol = 1e-9;
    int psor_max_iter = 10000;
    double psor_omega = 1.3;
    bool bermudan = false;    // restrict exercise to yearly dates {0,1,...,T}
    double mask_tol = 1e-7;   // continuation where v > mask_tol
};

// Solves max{ v_t + (sigma^2/2) v_xx + Gamma v_x - r v
//             + e^x (Gamma - r + sigma^2/2), 0 } = 0, v(T, .) = 0,
// where Gamma is the posterior mean drift built from weights q. Implicit
// theta-scheme with projected SOR; Dirichlet v = 0 at x_min and a Neumann
// condition matched to the hold-to-horizon asymptote at x_max.
ValueSurface solve_vi(const GbmStockModel& model, const SimplexPoint& q, const FdGrid& grid,
                      const FdOptions& opts = {});

// Continuation-region edge per time step: the x of the first mask transition,
// absent when the region is empty or covers the whole grid line.
std::vector<std::optional<double>> extract_boundary(const ValueSurface& surface);

// v(t_n, x) with linear interpolation in x.
double surface_value_at(const ValueSurface& surface, int time_index, double x);

// S0 + v(0, log S0), interpolated linearly in x. Never below S0.
double stock_value(const GbmStockModel& model, const SimplexPoint& q, const FdGrid& grid,
                   const FdOptions& opts = {});

// Per-scenario expectations E^i[e^{-r tau} S_tau] of the stopping rule
// induced by the surface's continuation mask: one masked linear PDE per
// scenario under that scenario's own drift.
Vector scenario_expectations(const GbmStockModel& model, const ValueSurface& surface);

// Independent check: recombining trinomial discretization of
// dX = Gamma(t, X) dt + sigma dW, solved by exact backward induction.
// Returns sup_tau E[e^{-r tau} S_tau] from the root.
double tree_oracle_value(const GbmStockModel& model, const SimplexPoint& q, int n_steps);

}  // namespace ambistop
