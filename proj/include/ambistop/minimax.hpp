#pragma once

#include "ambistop/ambiguity.hpp"

#include <cstdint>
#include <utility>

namespace ambistop {

// ---------------------------------------------------------------------------
// Inner solver contract: maps a candidate measure q to the per-scenario
// expectations of the optimal stopping rule under P^q and the attained inner
// value sup_tau E^{P^q}[Y_tau]. Must be deterministic for a fixed
// configuration and seed.
// ---------------------------------------------------------------------------
struct InnerResult {
    Vector expectations;  // E^i[Y_{tau_q*}], one per scenario
    double value = 0.0;   // sup_tau E^{P^q}[Y_tau]
};
using InnerSolver = std::function<InnerResult(const SimplexPoint&)>;

struct OuterResult {
    SimplexPoint q_star;
    double dual_value = 0.0;
    int inner_evaluations = 0;
};

// Derivative-free minimization of q -> G(f; q, p, inner(q)) over the simplex
// through a softmax reparametrization with an interior floor q_i >= 1e-8.
// Nelder-Mead with three restarts (reference prior, worst-scenario blend,
// barycenter); inner evaluations are cached so common random numbers carry
// across candidate measures. Throws BudgetExhausted past 500 fresh inner
// evaluations.
OuterResult outer_minimize(const InnerSolver& inner, const AmbiguityFunction& f,
                           const SimplexPoint& p, double tol);

// ---------------------------------------------------------------------------
// Small explicit instances for brute-force certification
// ---------------------------------------------------------------------------

// Finite event tree. Node 0 is the root; terminal nodes (no children) force
// stopping. trans rows are per-scenario probabilities over children.
struct SmallInstance {
    struct Node {
        double payoff = 0.0;
        int time = 0;
        std::vector<int> children;
        Matrix trans;  // n_scenarios x children.size()
    };
    int n_scenarios = 0;
    std::vector<Node> nodes;

    void validate() const;
    int n_decision_nodes() const;
};

// A pure stopping rule: stop flag per node (terminal nodes stop regardless).
using StoppingRule = std::vector<std::uint8_t>;

// Complete enumeration of adapted pure stopping rules (one stop/continue
// choice per reachable decision node, absorbing once stopped). Throws
// StateSpaceTooLarge past 100000 rules or the instance size bounds.
std::vector<StoppingRule> enumerate_stopping_rules(const SmallInstance& inst);

// E^i[Y_tau] per scenario for a pure rule.
Vector rule_scenario_values(const SmallInstance& inst, const StoppingRule& rule);

// Fractional stop weights per node: f >= 0 and sum f = 1 along every
// root-to-leaf path; adapted by construction (one weight per tree node).
struct RandomizedStoppingRule {
    std::vector<double> weight;

    static RandomizedStoppingRule from_pure(const SmallInstance& inst, const StoppingRule& rule);
    static RandomizedStoppingRule mixture(const SmallInstance& inst,
                                          const std::vector<StoppingRule>& rules,
                                          const Ref<const Vector>& mix);
    void validate(const SmallInstance& inst) const;
};

Vector randomized_scenario_values(const SmallInstance& inst, const RandomizedStoppingRule& rule);

// G evaluated on a randomized rule; coincides with g_value on indicator
// weights.
ExtendedValue randomized_g(const SmallInstance& inst, const RandomizedStoppingRule& rule,
                           const SimplexPoint& q, const SimplexPoint& p,
                           const AmbiguityFunction& f);

// Exact sup over pure rules of the smooth objective, with the argmax rule.
struct PrimalResult {
    double value = 0.0;
    int rule_index = -1;
};
PrimalResult primal_value(const SmallInstance& inst, const SimplexPoint& p,
                          const AmbiguityFunction& f);

// Certificate of the minimax equality on one instance. The max-min side is
// reported twice: over pure rules (the primal dual representation) and as the
// value achieved by the certified randomized rule (the saddle object; pure
// rules need not attain the game value on an atomic tree).
struct SaddleCertificate {
    SimplexPoint q_star;
    int tau_star = -1;                               // heaviest rule of the mixture
    std::vector<std::pair<int, double>> mixture;     // (rule index, weight)
    double gap = 0.0;                                // minmax - maxmin_randomized
    long inequalities_checked = 0;
    double max_violation = 0.0;                      // worst saddle-inequality slack
    double minmax = 0.0;
    double maxmin_pure = 0.0;
    double maxmin_randomized = 0.0;
};

struct DualResult {
    double value = 0.0;  // min over measures of max over rules
    SimplexPoint q_star;
    SaddleCertificate certificate;
};

// Brute-force dual: scans a barycentric grid of the given step, refines the
// minimizer in the continuum, constructs the saddle mixture from the active
// rules, and verifies both saddle inequalities over all enumerated rules and
// all grid points.
DualResult dual_value(const SmallInstance& inst, const SimplexPoint& p,
                      const AmbiguityFunction& f, double grid_step);

// All barycentric grid points of mesh `step` on the (n-1)-simplex.
std::vector<Vector> simplex_grid(int n, double step);

}  // namespace ambistop
