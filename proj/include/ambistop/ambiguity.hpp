#pragma once

#include "ambistop/extended_value.hpp"
#include "ambistop/scenario.hpp"

namespace ambistop {

// Concave distortion applied to per-scenario expected payoffs. Three
// families are supported:
//   power:        v(x) = x^lambda           (lambda in (0,1), x >= 0)
//                 v(x) = -x^lambda          (lambda < 0, x >= 0)
//   logarithmic:  v(x) = log(x)             (x > 0)
//   exponential:  v(x) = -exp(-gamma x)     (gamma > 0)
// with v = -inf off the stated domains.
struct AmbiguityFunction {
    enum class Kind { Power, Log, Exponential };

    Kind kind = Kind::Power;
    double lambda = -1.0;  // power exponent, lambda != 0, lambda < 1
    double gamma = 1.0;    // exponential risk parameter, gamma > 0

    static AmbiguityFunction power(double lambda);
    static AmbiguityFunction log();
    static AmbiguityFunction exponential(double gamma);
};

ExtendedValue v_apply(const AmbiguityFunction& f, double x);

// Inverse of v on its range; throws OutOfRange for unattained values.
double v_inverse(const AmbiguityFunction& f, double y);

// Certainty equivalent v^{-1}( sum_i p_i v(values_i) ). A -inf branch in any
// positively weighted scenario propagates to -inf.
ExtendedValue smooth_objective(const AmbiguityFunction& f, const SimplexPoint& p,
                               const Ref<const Vector>& scenario_values);

// Divergence term of the dual representation.
//   power: ( sum_i p_i (q_i/p_i)^{lambda/(lambda-1)} )^{(1-lambda)/lambda},
//          +inf when the inner sum diverges (lambda in (0,1), q_i = 0 < p_i)
//   log:   exp( - sum_i p_i log(q_i/p_i) ), +inf when q_i = 0 < p_i
//   exponential: relative entropy sum_i q_i log(q_i/p_i)  (additive penalty)
// Throws AbsoluteContinuityViolated when q charges a scenario with p_i = 0.
ExtendedValue penalty_factor(const AmbiguityFunction& f, const SimplexPoint& q,
                             const SimplexPoint& p);

// R(q, s) of the dual representation:
//   power/log:   s 1_{s>0} * factor, with R = +inf for s >= 0 and R = 0 for
//                s < 0 whenever the factor is infinite
//   exponential: s + entropy(q||p) / gamma  (the entropic certainty
//                equivalent equals the infimum of this penalized mixture)
ExtendedValue r_value(const AmbiguityFunction& f, const SimplexPoint& q,
                      const SimplexPoint& p, double s);

// G(tau, q) = R(q, sum_i q_i E^i[Y_tau]) evaluated from the per-scenario
// expectation vector of a fixed stopping rule.
ExtendedValue g_value(const AmbiguityFunction& f, const SimplexPoint& q,
                      const SimplexPoint& p, const Ref<const Vector>& scenario_values);

}  // namespace ambistop
