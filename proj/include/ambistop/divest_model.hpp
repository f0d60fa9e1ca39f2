#pragma once

#include "ambistop/common.hpp"

#include <functional>
#include <string>
#include <vector>

namespace ambistop {

// Noise law for the VAR innovations and the signal noise. ThreePoint is the
// Gauss-Hermite discretization {-sqrt(3), 0, +sqrt(3)} with weights
// {1/6, 2/3, 1/6}; it matches the standard normal moments through order 5
// and makes small instances amenable to exact tree induction.
enum class NoiseKind { Gaussian, ThreePoint };

// Discrete-time divestment problem: K-dimensional risk factors
//   X_t = Xtilde_t + mu^i_t,   Xtilde_t = Phi Xtilde_{t-1} + Vol eps_t,
// a scalar scenario signal S_t = signal_mu^i_t + sigma_s eta_t, revenue g,
// closure cost K(t), and per-step discount factor beta.
struct DivestModel {
    Matrix phi;                         // K x K
    Matrix vol;                         // K x K, nonsingular
    std::vector<Matrix> mu_paths;       // N matrices of (T+1) x K scenario means
    Matrix signal_means;                // N x (T+1)
    double sigma_s = 1.0;               // signal noise level, > 0
    double beta = 0.95;                 // discount per step, in (0, 1]
    int horizon_T = 10;                 // steps; decisions at t = 0..T
    std::function<double(const Vector&)> revenue;      // g(x)
    std::function<double(int)> closure_cost;           // K(t)
    std::vector<std::string> scenario_labels;
    NoiseKind noise = NoiseKind::Gaussian;

    int n_scenarios() const { return static_cast<int>(mu_paths.size()); }
    int n_factors() const { return static_cast<int>(phi.rows()); }

    void validate() const {
        if (mu_paths.empty()) throw std::invalid_argument("DivestModel: need >= 1 scenario");
        if (!(sigma_s > 0.0)) throw std::invalid_argument("DivestModel: sigma_s > 0 required");
        if (!(beta > 0.0) || beta > 1.0)
            throw std::invalid_argument("DivestModel: beta in (0,1] required");
        if (horizon_T < 1) throw std::invalid_argument("DivestModel: horizon >= 1 required");
        const int k = n_factors();
        if (phi.cols() != k || vol.rows() != k || vol.cols() != k)
            throw std::invalid_argument("DivestModel: Phi/Vol must be K x K");
        if (std::abs(vol.determinant()) < 1e-12)
            throw std::invalid_argument("DivestModel: Vol must be nonsingular");
        for (const Matrix& m : mu_paths)
            if (m.rows() != horizon_T + 1 || m.cols() != k)
                throw std::invalid_argument("DivestModel: mean path shape mismatch");
        if (signal_means.rows() != n_scenarios() || signal_means.cols() != horizon_T + 1)
            throw std::invalid_argument("DivestModel: signal mean shape mismatch");
        if (!revenue || !closure_cost)
            throw std::invalid_argument("DivestModel: revenue and closure cost required");
    }

    // scenario-i risk factor at step t given the observable part
    Vector risk_factor(int scenario, int t, const Vector& xtilde) const {
        return xtilde + mu_paths[static_cast<std::size_t>(scenario)].row(t).transpose();
    }

    // posterior-weighted revenue, the F_t-measurable cash flow
    double projected_revenue(int t, const Vector& xtilde, const Ref<const Vector>& pi) const {
        double g = 0.0;
        for (int i = 0; i < n_scenarios(); ++i)
            if (pi[i] > 0.0) g += pi[i] * revenue(risk_factor(i, t, xtilde));
        return g;
    }
};

// Unnormalized per-scenario Gaussian signal weights
// exp(-(s - signal_mu^i_t)^2 / (2 sigma_s^2)), entries in (0, 1].
Vector signal_likelihood(const DivestModel& model, int t, double s);

}  // namespace ambistop
