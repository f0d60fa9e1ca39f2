#pragma once

#include "ambistop/learning.hpp"

namespace ambistop {

struct LsmcConfig {
    int n_paths = 10000;       // >= 100
    int basis_degree = 2;      // polynomial total degree, in {1, 2, 3}
    std::uint64_t seed = 1;
    double stop_tolerance = 0.0;

    void validate() const {
        if (n_paths < 100) throw std::invalid_argument("LsmcConfig: n_paths >= 100");
        if (basis_degree < 1 || basis_degree > 3)
            throw std::invalid_argument("LsmcConfig: basis_degree in {1,2,3}");
    }
};

// What the stopping rule is allowed to condition on.
//   Learning:    posterior pi_t evolves with the signal (the full problem)
//   FrozenPrior: pi pinned at the initial weights, signal ignored
//   Revealed:    the true scenario is known from t = 0
enum class InfoMode { Learning, FrozenPrior, Revealed };

struct DivestSolution {
    double value = 0.0;            // time-0 value of the induced rule
    double std_error = 0.0;        // MC standard error of value
    Vector scenario_values;        // E^i[reward] of the same rule, one per scenario
    std::vector<int> stop_times;   // tau per path
    std::vector<int> true_scenarios;  // per-path scenario label
    Matrix closure_freq;           // (T+1) x N, frequencies summing to 1
    bool ridge_fallback = false;   // a regression needed the ridge rescue
};

// Least-squares Monte Carlo for
//   max_tau E[ sum_{t=1}^tau beta^t g(X_t) - beta^tau K(tau) ],
// backward-inducting on simulated (Xtilde, pi) paths with the realized
// future cumulative discounted reward as the regression target. The rule is
// then re-evaluated per scenario on common random numbers to produce the
// per-scenario expectation vector. Deterministic given cfg.seed.
DivestSolution lsmc_value(const DivestModel& model, const SimplexPoint& q,
                          const LsmcConfig& cfg, InfoMode mode = InfoMode::Learning);

// Exact backward induction over the full scenario-signal-factor tree of a
// small instance with three-point noise. Requires T <= 4, N <= 3 and
// three-point noise; throws StateSpaceTooLarge otherwise.
double tree_oracle_divest(const DivestModel& model, const SimplexPoint& q);

// (year x scenario) stopping frequency table; cells sum to 1.
Matrix closure_histogram(const DivestSolution& solution, int horizon_T, int n_scenarios);

}  // namespace ambistop
