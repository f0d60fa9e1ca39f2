#include "ambistop/learning.hpp"

#include <cmath>
#include <limits>

namespace ambistop {

Vector signal_likelihood(const DivestModel& model, int t, double s) {
    if (t < 0 || t > model.horizon_T)
        throw std::invalid_argument("signal_likelihood: step out of range");
    const int n = model.n_scenarios();
    Vector w(n);
    const double inv2v = 1.0 / (2.0 * model.sigma_s * model.sigma_s);
    for (int i = 0; i < n; ++i) {
        double d = s - model.signal_means(i, t);
        w[i] = std::exp(-d * d * inv2v);
    }
    return w;
}

namespace {

// per-scenario filter exponents of F_m at (t, x)
Vector filter_exponents(const DriftPrior& prior, double t, double x) {
    const double s2 = prior.sigma * prior.sigma;
    const double z = x - prior.x0 + 0.5 * s2 * t;
    return (-0.5 * t / s2) * prior.mus.array().square().matrix() + (z / s2) * prior.mus;
}

}  // namespace

double f_m(const DriftPrior& prior, double t, double x) {
    if (t < 0.0) throw std::invalid_argument("f_m: t >= 0 required");
    Vector e = filter_exponents(prior, t, x);
    double m = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < e.size(); ++i)
        if (prior.weights[i] > 0.0) m = std::max(m, e[i]);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < e.size(); ++i)
        if (prior.weights[i] > 0.0) acc += prior.weights[i] * std::exp(e[i] - m);
    return std::exp(m) * acc;
}

double gamma_drift(const DriftPrior& prior, double t, double x) {
    if (t < 0.0) throw std::invalid_argument("gamma_drift: t >= 0 required");
    Vector e = filter_exponents(prior, t, x);
    double m = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < e.size(); ++i)
        if (prior.weights[i] > 0.0) m = std::max(m, e[i]);
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < e.size(); ++i) {
        if (prior.weights[i] <= 0.0) continue;
        double w = prior.weights[i] * std::exp(e[i] - m);
        num += prior.mus[i] * w;
        den += w;
    }
    return num / den;
}

Vector bayes_update(const Ref<const Vector>& pi, const DivestModel& model, int t, double s) {
    const int n = model.n_scenarios();
    const double inv2v = 1.0 / (2.0 * model.sigma_s * model.sigma_s);
    Vector logw(n);
    double m = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        if (pi[i] <= 0.0) {
            logw[i] = -std::numeric_limits<double>::infinity();
            continue;
        }
        double d = s - model.signal_means(i, t);
        logw[i] = std::log(pi[i]) - d * d * inv2v;
        m = std::max(m, logw[i]);
    }
    if (!std::isfinite(m))
        throw DegenerateUpdate("bayes_update: posterior has no support");
    Vector out(n);
    double z = 0.0;
    for (int i = 0; i < n; ++i) {
        out[i] = std::isfinite(logw[i]) ? std::exp(logw[i] - m) : 0.0;
        z += out[i];
    }
    out /= z;
    return out;
}

PosteriorState posterior_update(const PosteriorState& state, const DivestModel& model,
                                double s) {
    if (state.t >= model.horizon_T)
        throw std::invalid_argument("posterior_update: past horizon");
    Vector pi = bayes_update(state.pi.weights(), model, state.t + 1, s);
    return PosteriorState{make_simplex(pi), state.t + 1};
}

int sample_scenario(const SimplexPoint& pi_prev, double u) {
    if (u < 0.0 || u > 1.0) throw std::invalid_argument("sample_scenario: u in [0,1]");
    double cum = 0.0;
    const Eigen::Index n = pi_prev.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        cum += pi_prev[i];
        if (cum >= u) return static_cast<int>(i);
    }
    return static_cast<int>(n - 1);  // rounding guard
}

namespace {

double draw_noise(Rng& rng, NoiseKind kind) {
    if (kind == NoiseKind::Gaussian) return rng.normal();
    // Gauss-Hermite three point discretization of N(0,1)
    double u = rng.uniform();
    constexpr double kSqrt3 = 1.7320508075688772;
    if (u < 1.0 / 6.0) return -kSqrt3;
    if (u < 5.0 / 6.0) return 0.0;
    return kSqrt3;
}

}  // namespace

namespace {

// Shared path kernel. forced_scenario < 0 means draw per `draw`; otherwise
// every step uses the given scenario. The U stream is consumed identically
// in all modes so paths stay coupled across them.
LearningPaths simulate_paths_impl(const DivestModel& model, const SimplexPoint& q,
                                  int n_paths, std::uint64_t seed, ScenarioDraw draw,
                                  int forced_scenario) {
    if (n_paths < 1) throw std::invalid_argument("simulate_learning_paths: n_paths >= 1");
    if (q.size() != model.n_scenarios())
        throw std::invalid_argument("simulate_learning_paths: prior size mismatch");
    const int T = model.horizon_T;
    const int K = model.n_factors();
    const int N = model.n_scenarios();

    LearningPaths out;
    out.xtilde.resize(static_cast<std::size_t>(n_paths));
    out.pi.resize(static_cast<std::size_t>(n_paths));
    out.signals = Matrix::Zero(n_paths, T + 1);
    out.theta = Eigen::MatrixXi::Zero(n_paths, T + 1);

    parallel_for(static_cast<std::size_t>(n_paths), [&](std::size_t p) {
        Rng rng_eps(derive_seed(seed, 1, p));
        Rng rng_eta(derive_seed(seed, 2, p));
        Rng rng_u(derive_seed(seed, 3, p));

        Matrix xt = Matrix::Zero(T + 1, K);
        Matrix pis = Matrix::Zero(T + 1, N);
        pis.row(0) = q.weights().transpose();

        int theta_fixed = forced_scenario;
        if (forced_scenario >= 0) {
            rng_u.uniform();  // slot of the t = 0 draw
        } else if (draw == ScenarioDraw::Fixed) {
            theta_fixed = sample_scenario(q, rng_u.uniform());
        }
        out.theta(static_cast<Eigen::Index>(p), 0) = std::max(theta_fixed, 0);

        Vector pi_prev = q.weights();
        Vector x_prev = Vector::Zero(K);
        Vector eps(K);
        for (int t = 1; t <= T; ++t) {
            int th;
            if (theta_fixed < 0) {
                th = sample_scenario(make_simplex(pi_prev), rng_u.uniform());
            } else {
                rng_u.uniform();  // keep the U stream aligned across modes
                th = theta_fixed;
            }
            double s = model.signal_means(th, t) + model.sigma_s * draw_noise(rng_eta, model.noise);
            Vector pi_new = bayes_update(pi_prev, model, t, s);

            for (int k = 0; k < K; ++k) eps[k] = draw_noise(rng_eps, model.noise);
            Vector x_new = model.phi * x_prev + model.vol * eps;

            out.theta(static_cast<Eigen::Index>(p), t) = th;
            out.signals(static_cast<Eigen::Index>(p), t) = s;
            pis.row(t) = pi_new.transpose();
            xt.row(t) = x_new.transpose();
            pi_prev = pi_new;
            x_prev = x_new;
        }
        out.xtilde[p] = std::move(xt);
        out.pi[p] = std::move(pis);
    });
    return out;
}

}  // namespace

LearningPaths simulate_learning_paths(const DivestModel& model, const SimplexPoint& q,
                                      int n_paths, std::uint64_t seed, ScenarioDraw draw) {
    return simulate_paths_impl(model, q, n_paths, seed, draw, -1);
}

LearningPaths simulate_forced_scenario_paths(const DivestModel& model, const SimplexPoint& q,
                                             int scenario, int n_paths, std::uint64_t seed) {
    if (scenario < 0 || scenario >= model.n_scenarios())
        throw std::invalid_argument("simulate_forced_scenario_paths: bad scenario");
    return simulate_paths_impl(model, q, n_paths, seed, ScenarioDraw::Fixed, scenario);
}

}  // namespace ambistop
