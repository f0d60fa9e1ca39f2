#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ambistop/learning.hpp"

#include <cmath>

using namespace ambistop;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

DivestModel signal_model(Matrix signal_means, double sigma_s) {
    DivestModel m;
    const int n = static_cast<int>(signal_means.rows());
    const int T = static_cast<int>(signal_means.cols()) - 1;
    m.phi = Matrix::Identity(1, 1) * 0.5;
    m.vol = Matrix::Identity(1, 1);
    for (int i = 0; i < n; ++i) m.mu_paths.push_back(Matrix::Zero(T + 1, 1));
    m.signal_means = std::move(signal_means);
    m.sigma_s = sigma_s;
    m.beta = 1.0;
    m.horizon_T = T;
    m.revenue = [](const Vector&) { return 0.0; };
    m.closure_cost = [](int) { return 0.0; };
    for (int i = 0; i < n; ++i) m.scenario_labels.push_back("s" + std::to_string(i));
    return m;
}

}  // namespace

TEST_CASE("f_m closed-form points") {
    DriftPrior prior(vec({-1.0, 1.0}), SimplexPoint::uniform(2), 1.0, 0.0);
    CHECK(f_m(prior, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f_m(prior, 1.0, 0.0) == doctest::Approx(0.5 * (std::exp(-1.0) + 1.0)).epsilon(1e-12));

    DriftPrior single(vec({0.3}), SimplexPoint::uniform(1), 0.5, 0.2);
    double t = 1.7, x = 0.9;
    double expo = -t * 0.09 / (2 * 0.25) + 0.3 * (x - 0.2 + 0.125 * t) / 0.25;
    CHECK(f_m(single, t, x) == doctest::Approx(std::exp(expo)).epsilon(1e-12));
    CHECK(f_m(single, t, x) > 0.0);
}

TEST_CASE("gamma_drift pointwise values and saturation") {
    DriftPrior single(vec({0.3}), SimplexPoint::uniform(1), 0.5, 0.2);
    CHECK(gamma_drift(single, 2.0, -1.0) == doctest::Approx(0.3));

    DriftPrior prior(vec({-1.0, 1.0}), SimplexPoint::uniform(2), 1.0, 0.0);
    CHECK(gamma_drift(prior, 0.0, 0.0) == doctest::Approx(0.0).epsilon(1e-14));  // prior mean
    CHECK(gamma_drift(prior, 1.0, 10.0) == doctest::Approx(1.0).epsilon(1e-6));  // saturated

    // mixed prior mean at t = 0
    DriftPrior skew(vec({-0.5, 0.25}), make_simplex(vec({0.25, 0.75})), 0.4, 1.0);
    CHECK(gamma_drift(skew, 0.0, 1.0) == doctest::Approx(-0.5 * 0.25 + 0.25 * 0.75));
}

TEST_CASE("gamma_drift bounded by the extreme drifts and monotone in x") {
    DriftPrior prior(vec({-0.06, 0.03, 0.13}), make_simplex(vec({0.25, 0.4, 0.35})), 0.3, 0.0);
    Rng rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        double t = 5.0 * rng.uniform();
        double x = 4.0 * rng.uniform() - 2.0;
        double g = gamma_drift(prior, t, x);
        CHECK(g >= -0.06 - 1e-12);
        CHECK(g <= 0.13 + 1e-12);
        CHECK(gamma_drift(prior, t, x + 0.05) >= g - 1e-12);
    }
}

TEST_CASE("gamma equals sigma^2 times the log-F slope") {
    DriftPrior prior(vec({-0.06, 0.03, 0.13}), SimplexPoint::uniform(3), 0.3, 0.0);
    const double h = 1e-5;
    for (double t : {0.0, 0.7, 3.2}) {
        for (double x : {-1.0, 0.0, 0.4}) {
            double slope = (std::log(f_m(prior, t, x + h)) - std::log(f_m(prior, t, x - h))) /
                           (2.0 * h);
            CHECK(gamma_drift(prior, t, x) ==
                  doctest::Approx(0.09 * slope).epsilon(1e-4));
        }
    }
}

TEST_CASE("posterior_update fixed points and the derived example") {
    Matrix eq(2, 3);
    eq.setConstant(1.0);
    DivestModel equal_means = signal_model(eq, 1.0);
    PosteriorState st{make_simplex(vec({0.3, 0.7})), 0};
    PosteriorState st1 = posterior_update(st, equal_means, 0.4);
    CHECK(st1.pi[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(st1.t == 1);

    // absorbing corner
    Matrix m2(2, 3);
    m2.row(0).setConstant(0.0);
    m2.row(1).setConstant(1.0);
    DivestModel model = signal_model(m2, 1.0);
    PosteriorState corner{make_simplex(vec({1.0, 0.0})), 0};
    PosteriorState c1 = posterior_update(corner, model, 123.0);
    CHECK(c1.pi[0] == doctest::Approx(1.0));
    CHECK(c1.pi[1] == 0.0);

    // pi=(1/2,1/2), means (0,1), sigma_s=1, s=1
    PosteriorState half{SimplexPoint::uniform(2), 0};
    PosteriorState h1 = posterior_update(half, model, 1.0);
    const double denom = 1.0 + std::exp(0.5);
    CHECK(h1.pi[0] == doctest::Approx(1.0 / denom).epsilon(1e-10));
    CHECK(h1.pi[1] == doctest::Approx(std::exp(0.5) / denom).epsilon(1e-10));
}

TEST_CASE("posterior_update stays on the simplex under tiny signal noise") {
    Matrix means(3, 6);
    for (int i = 0; i < 3; ++i) means.row(i).setConstant(10.0 * i);
    DivestModel model = signal_model(means, 1e-4);  // extreme likelihood ratios
    PosteriorState st{SimplexPoint::uniform(3), 0};
    for (int t = 0; t < 5; ++t) {
        st = posterior_update(st, model, 10.0 + 0.1 * t);
        double sum = 0.0;
        for (int i = 0; i < 3; ++i) sum += st.pi[i];
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("sample_scenario cumulative rule") {
    CHECK(sample_scenario(SimplexPoint::vertex(3, 0), 0.99) == 0);
    CHECK(sample_scenario(SimplexPoint::uniform(2), 0.5) == 0);  // inclusive boundary
    CHECK(sample_scenario(make_simplex(vec({0.2, 0.3, 0.5})), 0.6) == 2);
}

TEST_CASE("uninformative signal leaves the posterior at the prior") {
    Matrix means(2, 6);
    means.row(0).setConstant(0.0);
    means.row(1).setConstant(1.0);
    DivestModel model = signal_model(means, 1e6);
    SimplexPoint q = make_simplex(vec({0.35, 0.65}));
    LearningPaths paths = simulate_learning_paths(model, q, 200, 4, ScenarioDraw::Redrawn);
    double worst = 0.0;
    for (const Matrix& pi : paths.pi)
        worst = std::max(worst, (pi.row(5) - pi.row(0)).cwiseAbs().maxCoeff());
    CHECK(worst < 1e-3);
}

TEST_CASE("single scenario is degenerate") {
    Matrix means(1, 4);
    means.setConstant(3.0);
    DivestModel model = signal_model(means, 1.0);
    LearningPaths paths = simulate_learning_paths(model, SimplexPoint::uniform(1), 50, 9);
    for (const Matrix& pi : paths.pi) CHECK(pi.minCoeff() == doctest::Approx(1.0));
    CHECK(paths.theta.maxCoeff() == 0);
}

TEST_CASE("strong signal concentrates the posterior on the true scenario") {
    Matrix means(2, 6);
    for (int t = 0; t <= 5; ++t) {
        means(0, t) = 0.0;
        means(1, t) = 10.0;  // spaced 10 sigma_s apart
    }
    DivestModel model = signal_model(means, 1.0);
    const int n = 10000;
    LearningPaths paths = simulate_learning_paths(model, SimplexPoint::uniform(2), n, 21,
                                                  ScenarioDraw::Fixed);
    int concentrated = 0;
    for (int p = 0; p < n; ++p) {
        int th = paths.theta(p, 0);
        if (paths.pi[static_cast<std::size_t>(p)](5, th) > 0.99) ++concentrated;
    }
    CHECK(static_cast<double>(concentrated) / n > 0.95);
}

TEST_CASE("posterior is a martingale under the mixture") {
    Matrix means(3, 7);
    for (int t = 0; t <= 6; ++t) {
        means(0, t) = 0.0;
        means(1, t) = 1.0;
        means(2, t) = 2.5;
    }
    DivestModel model = signal_model(means, 2.0);
    SimplexPoint q = make_simplex(vec({0.5, 0.3, 0.2}));
    const int n = 10000;
    LearningPaths paths = simulate_learning_paths(model, q, n, 31, ScenarioDraw::Redrawn);
    for (int i = 0; i < 3; ++i) {
        for (int t = 0; t < 6; ++t) {
            double mean_d = 0.0, var_d = 0.0;
            for (int p = 0; p < n; ++p) {
                double d = paths.pi[static_cast<std::size_t>(p)](t + 1, i) -
                           paths.pi[static_cast<std::size_t>(p)](t, i);
                mean_d += d;
            }
            mean_d /= n;
            for (int p = 0; p < n; ++p) {
                double d = paths.pi[static_cast<std::size_t>(p)](t + 1, i) -
                           paths.pi[static_cast<std::size_t>(p)](t, i);
                var_d += (d - mean_d) * (d - mean_d);
            }
            double se = std::sqrt(var_d / (n - 1) / n);
            CHECK(std::abs(mean_d) <= 3.0 * se + 1e-12);
        }
    }
}

TEST_CASE("paths are deterministic given the seed and independent of workers") {
    Matrix means(2, 5);
    means.row(0).setConstant(0.0);
    means.row(1).setConstant(2.0);
    DivestModel model = signal_model(means, 1.5);
    SimplexPoint q = SimplexPoint::uniform(2);
    setenv("AMBISTOP_THREADS", "1", 1);
    LearningPaths a = simulate_learning_paths(model, q, 64, 77, ScenarioDraw::Fixed);
    setenv("AMBISTOP_THREADS", "3", 1);
    LearningPaths b = simulate_learning_paths(model, q, 64, 77, ScenarioDraw::Fixed);
    unsetenv("AMBISTOP_THREADS");
    for (std::size_t p = 0; p < 64; ++p) {
        CHECK((a.xtilde[p] - b.xtilde[p]).cwiseAbs().maxCoeff() == 0.0);
        CHECK((a.pi[p] - b.pi[p]).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK((a.signals - b.signals).cwiseAbs().maxCoeff() == 0.0);
}
