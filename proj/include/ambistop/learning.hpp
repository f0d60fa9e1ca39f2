#pragma once

#include "ambistop/divest_model.hpp"
#include "ambistop/scenario.hpp"

namespace ambistop {

// Finite mixture-of-Diracs prior over the drift parameter, the continuous
// time filter's input. sigma is the observation (price) volatility. The
// filter weights carry a sigma^2 t/2 compensator, which makes them the exact
// scenario posterior when the mixed values are arithmetic stock drifts; the
// stock solvers pass those (see stopping_fd.cpp).
struct DriftPrior {
    Vector mus;            // drift values entering the filter weights, per year
    SimplexPoint weights;  // prior scenario probabilities
    double sigma = 0.3;    // > 0
    double x0 = 0.0;       // initial log-price

    DriftPrior(Vector m, SimplexPoint w, double sig, double x0_)
        : mus(std::move(m)), weights(std::move(w)), sigma(sig), x0(x0_) {
        if (!(sigma > 0.0)) throw std::invalid_argument("DriftPrior: sigma > 0 required");
        if (mus.size() != weights.size())
            throw std::invalid_argument("DriftPrior: size mismatch");
    }
};

// F_m(t, x) = sum_i w_i exp(-t mu_i^2 / (2 sigma^2)
//                            + mu_i (x - x0 + sigma^2 t / 2) / sigma^2),
// evaluated with max-subtraction. Strictly positive.
double f_m(const DriftPrior& prior, double t, double x);

// Posterior mean drift Gamma(t, x) = sigma^2 d/dx log F_m; a weight-softmax
// over the mu_i, so the value lies in [min mu, max mu].
double gamma_drift(const DriftPrior& prior, double t, double x);

// Discrete-time posterior over scenarios.
struct PosteriorState {
    SimplexPoint pi;
    int t = 0;
};

// One Bayes step of the signal recursion, computed in log domain so small
// sigma_s cannot underflow the weights. Zero entries are absorbing.
Vector bayes_update(const Ref<const Vector>& pi, const DivestModel& model, int t, double s);

PosteriorState posterior_update(const PosteriorState& state, const DivestModel& model,
                                double s);

// Smallest index i with sum_{j<=i} pi_j >= u (inclusive boundary).
int sample_scenario(const SimplexPoint& pi_prev, double u);

// How the latent scenario is produced along a simulated path. Redrawn is the
// per-step resampling from pi_{t-1}; Fixed draws once at t = 0 and keeps it.
// The two give the same law of the observable process (Xtilde, S, pi); Fixed
// additionally labels each path with a true scenario.
enum class ScenarioDraw { Redrawn, Fixed };

struct LearningPaths {
    std::vector<Matrix> xtilde;  // per path, (T+1) x K
    std::vector<Matrix> pi;      // per path, (T+1) x N
    Matrix signals;              // n_paths x (T+1); column 0 unused
    Eigen::MatrixXi theta;       // n_paths x (T+1); scenario draw per step

    int n_paths() const { return static_cast<int>(xtilde.size()); }
};

// Simulates the coupled (Xtilde, S, pi, Theta) dynamics under mixing prior q.
// The (eps), (eta), (U) streams come from independently derived substreams of
// the master seed; paths use per-path derived seeds, so the bundle does not
// depend on the worker count.
LearningPaths simulate_learning_paths(const DivestModel& model, const SimplexPoint& q,
                                      int n_paths, std::uint64_t seed,
                                      ScenarioDraw draw = ScenarioDraw::Redrawn);

// Same noise streams as simulate_learning_paths(..., Fixed), but the latent
// scenario is pinned to `scenario` on every path while the filter still
// starts from q. Used to evaluate a fixed rule scenario by scenario under
// common random numbers.
LearningPaths simulate_forced_scenario_paths(const DivestModel& model, const SimplexPoint& q,
                                             int scenario, int n_paths, std::uint64_t seed);

}  // namespace ambistop
