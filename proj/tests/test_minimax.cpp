#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ambistop/experiments.hpp"
#include "ambistop/minimax.hpp"

#include <cmath>

using namespace ambistop;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

SmallInstance leaf_only() {
    SmallInstance inst;
    inst.n_scenarios = 2;
    inst.nodes.push_back({1.0, 0, {}, Matrix()});
    return inst;
}

// binary tree with the given number of decision levels; terminal level is
// forced. payoff(level, index) and per-scenario up-probabilities are callers'
SmallInstance binary_instance(int n_scen, int decision_levels,
                              const std::function<double(int, int)>& payoff,
                              const std::function<double(int, int, int)>& p_up) {
    SmallInstance inst;
    inst.n_scenarios = n_scen;
    struct Item {
        int node, level, index;
    };
    inst.nodes.push_back({payoff(0, 0), 0, {}, Matrix()});
    std::vector<Item> queue{{0, 0, 0}};
    while (!queue.empty()) {
        Item it = queue.front();
        queue.erase(queue.begin());
        if (it.level == decision_levels) continue;
        Matrix trans(n_scen, 2);
        for (int i = 0; i < n_scen; ++i) {
            double up = p_up(i, it.level, it.index);
            trans(i, 0) = up;
            trans(i, 1) = 1.0 - up;
        }
        inst.nodes[static_cast<std::size_t>(it.node)].trans = trans;
        for (int c = 0; c < 2; ++c) {
            int id = static_cast<int>(inst.nodes.size());
            int idx = 2 * it.index + c;
            inst.nodes.push_back({payoff(it.level + 1, idx), it.level + 1, {}, Matrix()});
            inst.nodes[static_cast<std::size_t>(it.node)].children.push_back(id);
            queue.push_back({id, it.level + 1, idx});
        }
    }
    return inst;
}

// price-tree payoffs, distinct per node
double walk_payoff(int level, int index) {
    double v = 1.0;
    for (int l = 0; l < level; ++l) {
        int bit = (index >> (level - 1 - l)) & 1;
        v *= bit == 0 ? 1.18 : 0.84;
    }
    return v;
}

// the one-decision instance whose saddle needs a randomized rule:
// root payoff 0.15, children payoffs (1, 0), antithetic transitions
SmallInstance kink_instance() {
    SmallInstance inst;
    inst.n_scenarios = 2;
    Matrix trans(2, 2);
    trans << 0.9, 0.1, 0.1, 0.9;
    inst.nodes.push_back({0.15, 0, {1, 2}, trans});
    inst.nodes.push_back({1.0, 1, {}, Matrix()});
    inst.nodes.push_back({0.0, 1, {}, Matrix()});
    return inst;
}

}  // namespace

TEST_CASE("rule enumeration counts") {
    CHECK(enumerate_stopping_rules(leaf_only()).size() == 1);

    auto up = [](int, int, int) { return 0.6; };
    SmallInstance two = binary_instance(2, 2, walk_payoff, up);
    CHECK(enumerate_stopping_rules(two).size() == 5);  // stop-at-root + 2^2 subtree choices

    // closed-form recursion f(l) = 1 + f(l-1)^2, f(0) = 1
    SmallInstance three = binary_instance(2, 3, walk_payoff, up);
    long f = 1;
    for (int l = 0; l < 3; ++l) f = 1 + f * f;
    CHECK(enumerate_stopping_rules(three).size() == static_cast<std::size_t>(f));
}

TEST_CASE("scenario values of pure rules") {
    auto up = [](int i, int, int) { return i == 0 ? 0.7 : 0.4; };
    SmallInstance inst = binary_instance(2, 1, walk_payoff, up);
    auto rules = enumerate_stopping_rules(inst);
    REQUIRE(rules.size() == 2);

    // first rule stops at the root
    Vector y0 = rule_scenario_values(inst, rules[0]);
    CHECK(y0[0] == doctest::Approx(1.0));
    CHECK(y0[1] == doctest::Approx(1.0));

    Vector y1 = rule_scenario_values(inst, rules[1]);
    CHECK(y1[0] == doctest::Approx(0.7 * 1.18 + 0.3 * 0.84));
    CHECK(y1[1] == doctest::Approx(0.4 * 1.18 + 0.6 * 0.84));
}

TEST_CASE("randomized rules: indicators, mixtures, and pure-sup equality") {
    auto up = [](int i, int, int) { return i == 0 ? 0.65 : 0.35; };
    SmallInstance inst = binary_instance(2, 2, walk_payoff, up);
    auto rules = enumerate_stopping_rules(inst);
    SimplexPoint p = SimplexPoint::uniform(2);
    SimplexPoint q = make_simplex(vec({0.3, 0.7}));
    AmbiguityFunction f = AmbiguityFunction::power(-1.0);

    for (const auto& rule : rules) {
        RandomizedStoppingRule rnd = RandomizedStoppingRule::from_pure(inst, rule);
        rnd.validate(inst);
        double a = randomized_g(inst, rnd, q, p, f).value();
        double b = g_value(f, q, p, rule_scenario_values(inst, rule)).value();
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }

    // s-argument is linear in the mixture weight
    RandomizedStoppingRule half =
        RandomizedStoppingRule::mixture(inst, {rules[0], rules[1]}, vec({0.5, 0.5}));
    half.validate(inst);
    Vector y_half = randomized_scenario_values(inst, half);
    Vector y_avg = 0.5 * (rule_scenario_values(inst, rules[0]) +
                          rule_scenario_values(inst, rules[1]));
    CHECK((y_half - y_avg).cwiseAbs().maxCoeff() < 1e-14);

    // for fixed q no mixture beats the best pure rule
    double best_pure = -1e300;
    for (const auto& rule : rules)
        best_pure = std::max(best_pure,
                             g_value(f, q, p, rule_scenario_values(inst, rule)).sentinel());
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        Vector w(rules.size());
        for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = rng.uniform() + 1e-3;
        w /= w.sum();
        RandomizedStoppingRule mix = RandomizedStoppingRule::mixture(inst, rules, w);
        CHECK(randomized_g(inst, mix, q, p, f).sentinel() <= best_pure + 1e-10);
    }
}

TEST_CASE("primal value trivial cases") {
    auto up = [](int i, int, int) { return i == 0 ? 0.7 : 0.3; };
    auto const_pay = [](int, int) { return 2.5; };
    SmallInstance flat = binary_instance(2, 2, const_pay, up);
    PrimalResult pr = primal_value(flat, SimplexPoint::uniform(2), AmbiguityFunction::power(-2.0));
    CHECK(pr.value == doctest::Approx(2.5).epsilon(1e-12));

    // degenerate prior reduces to single-scenario optimal stopping
    SmallInstance inst = binary_instance(2, 2, walk_payoff, up);
    SimplexPoint deg = make_simplex(vec({1.0, 0.0}));
    PrimalResult pd = primal_value(inst, deg, AmbiguityFunction::power(0.5));
    auto rules = enumerate_stopping_rules(inst);
    double best0 = -1e300;
    for (const auto& rule : rules)
        best0 = std::max(best0, rule_scenario_values(inst, rule)[0]);
    CHECK(pd.value == doctest::Approx(best0).epsilon(1e-12));
}

TEST_CASE("dual certification on the hand-solved kink instance") {
    SmallInstance inst = kink_instance();
    SimplexPoint p = SimplexPoint::uniform(2);
    AmbiguityFunction f = AmbiguityFunction::power(-1.0);

    DualResult dual = dual_value(inst, p, f, 0.01);
    PrimalResult primal = primal_value(inst, p, f);

    // harmonic mean of (0.9, 0.1): the pure sup-inf side
    CHECK(primal.value == doctest::Approx(0.18).epsilon(1e-12));
    CHECK(dual.certificate.maxmin_pure == doctest::Approx(0.18).epsilon(1e-7));

    // min-max sits at the kink q1 = 1/16 where the two rules tie
    const double expected = 0.3 / std::pow(0.25 + std::sqrt(0.9375), 2.0);
    CHECK(dual.value == doctest::Approx(expected).epsilon(1e-9));
    CHECK(dual.q_star[0] == doctest::Approx(0.0625).epsilon(1e-6));

    // the saddle needs a genuine mixture and certifies to 1e-9
    CHECK(dual.certificate.mixture.size() == 2);
    CHECK(dual.certificate.max_violation <= 1e-9);
    CHECK(std::abs(dual.certificate.gap) <= 1e-9);
    CHECK(dual.certificate.maxmin_randomized > dual.certificate.maxmin_pure + 0.01);
}

TEST_CASE("dual certification trivial cases") {
    auto up = [](int i, int, int) { return i == 0 ? 0.7 : 0.3; };
    auto const_pay = [](int, int) { return 1.5; };
    SmallInstance flat = binary_instance(2, 2, const_pay, up);
    SimplexPoint p = SimplexPoint::uniform(2);

    DualResult d = dual_value(flat, p, AmbiguityFunction::power(-1.0), 0.01);
    CHECK(d.value == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(std::abs(d.certificate.gap) <= 1e-9);

    // equal payoffs across scenarios: entropy penalty alone picks q* = p
    auto same_up = [](int, int, int) { return 0.55; };
    SmallInstance sym = binary_instance(2, 2, walk_payoff, same_up);
    DualResult de = dual_value(sym, p, AmbiguityFunction::exponential(1.0), 0.01);
    CHECK(std::abs(de.q_star[0] - 0.5) <= 1e-5);
    CHECK(std::abs(de.certificate.gap) <= 1e-9);
}

TEST_CASE("weak duality and certification on random instances") {
    for (std::uint64_t seed : {11u, 12u, 13u, 14u, 15u}) {
        SmallInstance inst = random_small_instance(seed);
        SimplexPoint p = SimplexPoint::uniform(inst.n_scenarios);
        double prev_power_dual = -1e300;
        for (const AmbiguityFunction& f : certification_functionals()) {
            DualResult d = dual_value(inst, p, f, 0.01);
            // weak duality chain: pure <= randomized <= minmax
            CHECK(d.certificate.maxmin_pure <= d.certificate.maxmin_randomized + 1e-9);
            CHECK(d.certificate.maxmin_randomized <= d.certificate.minmax + 1e-9);
            // certified saddle
            CHECK(d.certificate.max_violation <= 1e-9);
            CHECK(std::abs(d.certificate.gap) <= 5e-3);
            // the pure sup-inf equals the primal (dual representation per rule)
            PrimalResult pr = primal_value(inst, p, f);
            CHECK(pr.value == doctest::Approx(d.certificate.maxmin_pure).epsilon(1e-6));
            // dual value nondecreasing in lambda across the power entries
            if (f.kind == AmbiguityFunction::Kind::Power) {
                CHECK(d.value >= prev_power_dual - 1e-9);
                prev_power_dual = d.value;
            }
        }
    }
}

TEST_CASE("gap bound from Lipschitz sampling halves with the grid step") {
    SmallInstance inst = kink_instance();
    SimplexPoint p = SimplexPoint::uniform(2);
    AmbiguityFunction f = AmbiguityFunction::power(-1.0);

    // Lipschitz constant of the upper envelope sampled along the edge
    auto rules = enumerate_stopping_rules(inst);
    auto phi = [&](double q1) {
        SimplexPoint q = make_simplex(vec({q1, 1.0 - q1}));
        double best = -1e300;
        for (const auto& rule : rules)
            best = std::max(best, g_value(f, q, p, rule_scenario_values(inst, rule)).sentinel());
        return best;
    };
    double lip = 0.0;
    for (int i = 1; i < 100; ++i)
        lip = std::max(lip, std::abs(phi(i * 0.01) - phi((i + 1) * 0.01)) / 0.02);

    for (double step : {0.02, 0.01}) {
        DualResult d = dual_value(inst, p, f, step);
        CHECK(std::abs(d.certificate.gap) <= lip * step);
    }
}

TEST_CASE("outer_minimize agrees with brute force on a small instance") {
    SmallInstance inst = random_small_instance(3);
    SimplexPoint p = SimplexPoint::uniform(inst.n_scenarios);
    AmbiguityFunction f = AmbiguityFunction::power(-1.0);

    auto rules = enumerate_stopping_rules(inst);
    Matrix Y(static_cast<Eigen::Index>(rules.size()), inst.n_scenarios);
    for (std::size_t k = 0; k < rules.size(); ++k)
        Y.row(static_cast<Eigen::Index>(k)) = rule_scenario_values(inst, rules[k]).transpose();
    InnerSolver inner = [&](const SimplexPoint& q) {
        Vector s = Y * q.weights();
        Eigen::Index best = 0;
        s.maxCoeff(&best);
        return InnerResult{Y.row(best).transpose(), s[best]};
    };

    OuterResult outer = outer_minimize(inner, f, p, 1e-10);
    DualResult dual = dual_value(inst, p, f, 0.01);
    CHECK(outer.dual_value == doctest::Approx(dual.value).epsilon(1e-5));
    CHECK(outer.inner_evaluations <= 500);
}

TEST_CASE("outer_minimize trivial and budget paths") {
    // single scenario short-circuits
    InnerSolver trivial = [](const SimplexPoint&) {
        return InnerResult{Vector::Ones(1), 1.0};
    };
    OuterResult r = outer_minimize(trivial, AmbiguityFunction::power(-1.0),
                                   SimplexPoint::uniform(1), 1e-8);
    CHECK(r.dual_value == doctest::Approx(1.0));
    CHECK(r.q_star[0] == doctest::Approx(1.0));

    // a rapidly oscillating inner value never meets an impossible tolerance
    InnerSolver wiggly = [](const SimplexPoint& q) {
        double v = 1.0 + 0.2 * std::sin(1e7 * q[0]) + q[1];
        return InnerResult{Vector::Constant(3, v), v};
    };
    CHECK_THROWS_AS(
        outer_minimize(wiggly, AmbiguityFunction::power(-1.0), SimplexPoint::uniform(3), 1e-15),
        BudgetExhausted);
}
