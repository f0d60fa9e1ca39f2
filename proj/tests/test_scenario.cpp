#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ambistop/divest_model.hpp"
#include "ambistop/scenario.hpp"

using namespace ambistop;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

DivestModel tiny_model(Matrix signal_means, double sigma_s, int T) {
    DivestModel m;
    const int n = static_cast<int>(signal_means.rows());
    m.phi = Matrix::Identity(1, 1) * 0.5;
    m.vol = Matrix::Identity(1, 1);
    for (int i = 0; i < n; ++i) m.mu_paths.push_back(Matrix::Zero(T + 1, 1));
    m.signal_means = std::move(signal_means);
    m.sigma_s = sigma_s;
    m.beta = 0.95;
    m.horizon_T = T;
    m.revenue = [](const Vector&) { return 0.0; };
    m.closure_cost = [](int) { return 0.0; };
    for (int i = 0; i < n; ++i) m.scenario_labels.push_back("s" + std::to_string(i));
    return m;
}

}  // namespace

TEST_CASE("make_simplex keeps points already on the simplex") {
    SimplexPoint p = make_simplex(vec({1.0 / 3, 1.0 / 3, 1.0 / 3}));
    for (int i = 0; i < 3; ++i) CHECK(p[i] == doctest::Approx(1.0 / 3).epsilon(1e-14));
}

TEST_CASE("make_simplex renormalizes") {
    SimplexPoint p = make_simplex(vec({2.0, 1.0, 1.0}));
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(0.25));
    CHECK(p[2] == doctest::Approx(0.25));
}

TEST_CASE("make_simplex clips negatives then renormalizes") {
    SimplexPoint p = make_simplex(vec({-1.0, 1.0, 1.0}));
    CHECK(p[0] == 0.0);
    CHECK(p[1] == doctest::Approx(0.5));
    CHECK(p[2] == doctest::Approx(0.5));
}

TEST_CASE("make_simplex rejects vanishing mass and non-finite input") {
    CHECK_THROWS_AS(make_simplex(vec({-1.0, 0.0, -2.0})), ZeroMass);
    CHECK_THROWS_AS(make_simplex(vec({1.0, std::nan(""), 0.0})), std::invalid_argument);
}

TEST_CASE("make_simplex output always satisfies the simplex invariants") {
    Rng rng(123);
    for (int trial = 0; trial < 500; ++trial) {
        Vector raw(3);
        for (int i = 0; i < 3; ++i) raw[i] = 4.0 * rng.uniform() - 1.0;
        if (raw.cwiseMax(0.0).sum() <= 0.0) continue;
        SimplexPoint p = make_simplex(raw);
        double sum = 0.0;
        for (int i = 0; i < 3; ++i) {
            CHECK(p[i] >= 0.0);
            sum += p[i];
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("ScenarioSet validates labels") {
    CHECK_THROWS(ScenarioSet(std::vector<std::string>{}));
    CHECK_THROWS(ScenarioSet(std::vector<std::string>{"a", "a"}));
    ScenarioSet s(3);
    CHECK(s.size() == 3);
}

TEST_CASE("signal_likelihood trivial cases") {
    Matrix means(2, 4);
    means.setZero();  // all scenario means equal
    DivestModel m = tiny_model(means, 1.0, 3);
    Vector w = signal_likelihood(m, 1, 0.7);
    CHECK(w[0] == doctest::Approx(w[1]));

    Matrix means2(2, 4);
    means2.row(0).setConstant(0.0);
    means2.row(1).setConstant(1.0);
    DivestModel m2 = tiny_model(means2, 2.5, 3);
    Vector w2 = signal_likelihood(m2, 2, 0.0);  // observation at scenario-0 mean
    CHECK(w2[0] == doctest::Approx(1.0));
    CHECK(w2[1] < 1.0);
}

TEST_CASE("signal_likelihood matches the Gaussian weight formula") {
    Matrix means(2, 2);
    means.row(0).setConstant(0.0);
    means.row(1).setConstant(1.0);
    DivestModel m = tiny_model(means, 1.0, 1);
    Vector w = signal_likelihood(m, 1, 1.0);
    CHECK(w[0] == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK(w[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("signal_likelihood peaks at the nearest scenario mean") {
    Matrix means(3, 2);
    means.col(0) << -1.0, 0.0, 2.0;
    means.col(1) << -1.0, 0.0, 2.0;
    DivestModel m = tiny_model(means, 0.8, 1);
    Vector w = signal_likelihood(m, 1, 1.8);
    Eigen::Index arg = 0;
    w.maxCoeff(&arg);
    CHECK(arg == 2);
}
