#include "ambistop/ambiguity.hpp"

#include <cmath>
#include <limits>

namespace ambistop {

AmbiguityFunction AmbiguityFunction::power(double lambda) {
    if (lambda == 0.0 || lambda >= 1.0)
        throw std::invalid_argument("power distortion needs lambda in (-inf,0) u (0,1)");
    AmbiguityFunction f;
    f.kind = Kind::Power;
    f.lambda = lambda;
    return f;
}

AmbiguityFunction AmbiguityFunction::log() {
    AmbiguityFunction f;
    f.kind = Kind::Log;
    return f;
}

AmbiguityFunction AmbiguityFunction::exponential(double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("exponential distortion needs gamma > 0");
    AmbiguityFunction f;
    f.kind = Kind::Exponential;
    f.gamma = gamma;
    return f;
}

ExtendedValue v_apply(const AmbiguityFunction& f, double x) {
    switch (f.kind) {
        case AmbiguityFunction::Kind::Power:
            if (x < 0.0) return ExtendedValue::neg_inf();
            if (f.lambda > 0.0) return ExtendedValue::finite(std::pow(x, f.lambda));
            // lambda < 0: x^lambda blows up at zero
            if (x == 0.0) return ExtendedValue::neg_inf();
            return ExtendedValue::finite(-std::pow(x, f.lambda));
        case AmbiguityFunction::Kind::Log:
            if (x <= 0.0) return ExtendedValue::neg_inf();
            return ExtendedValue::finite(std::log(x));
        case AmbiguityFunction::Kind::Exponential:
            return ExtendedValue::finite(-std::exp(-f.gamma * x));
    }
    return ExtendedValue::neg_inf();  // unreachable
}

double v_inverse(const AmbiguityFunction& f, double y) {
    switch (f.kind) {
        case AmbiguityFunction::Kind::Power:
            if (f.lambda > 0.0) {
                if (y < 0.0) throw OutOfRange("v_inverse: power lambda>0 has range [0,inf)");
                return std::pow(y, 1.0 / f.lambda);
            }
            // lambda < 0: v maps (0,inf) onto (-inf,0)
            if (y >= 0.0) throw OutOfRange("v_inverse: power lambda<0 has range (-inf,0)");
            return std::pow(-y, 1.0 / f.lambda);
        case AmbiguityFunction::Kind::Log:
            return std::exp(y);
        case AmbiguityFunction::Kind::Exponential:
            if (y >= 0.0) throw OutOfRange("v_inverse: exponential has range (-inf,0)");
            return -std::log(-y) / f.gamma;
    }
    throw OutOfRange("v_inverse: unknown kind");
}

ExtendedValue smooth_objective(const AmbiguityFunction& f, const SimplexPoint& p,
                               const Ref<const Vector>& scenario_values) {
    if (p.size() != scenario_values.size())
        throw std::invalid_argument("smooth_objective: dimension mismatch");
    // Work in a stabilized form per family rather than summing raw v-values,
    // so extreme parameters (lambda = -50, large gamma) stay in range.
    const Eigen::Index n = p.size();
    switch (f.kind) {
        case AmbiguityFunction::Kind::Power: {
            double vmax = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (p[i] <= 0.0) continue;
                double x = scenario_values[i];
                if (x < 0.0 || (x == 0.0 && f.lambda < 0.0)) return ExtendedValue::neg_inf();
                vmax = std::max(vmax, x);
            }
            if (vmax == 0.0) return ExtendedValue::finite(0.0);
            // sum p_i (x_i/vmax)^lambda, then scale back
            double acc = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (p[i] <= 0.0) continue;
                double ratio = scenario_values[i] / vmax;
                if (ratio == 0.0 && f.lambda < 0.0) return ExtendedValue::neg_inf();
                acc += p[i] * std::pow(ratio, f.lambda);
            }
            return ExtendedValue::finite(vmax * std::pow(acc, 1.0 / f.lambda));
        }
        case AmbiguityFunction::Kind::Log: {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (p[i] <= 0.0) continue;
                double x = scenario_values[i];
                if (x <= 0.0) return ExtendedValue::neg_inf();
                acc += p[i] * std::log(x);
            }
            return ExtendedValue::finite(std::exp(acc));
        }
        case AmbiguityFunction::Kind::Exponential: {
            // -(1/gamma) log sum p_i exp(-gamma x_i), log-sum-exp stabilized
            double m = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < n; ++i)
                if (p[i] > 0.0) m = std::min(m, scenario_values[i]);
            double acc = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (p[i] <= 0.0) continue;
                acc += p[i] * std::exp(-f.gamma * (scenario_values[i] - m));
            }
            return ExtendedValue::finite(m - std::log(acc) / f.gamma);
        }
    }
    return ExtendedValue::neg_inf();  // unreachable
}

namespace {

// relative entropy sum q_i log(q_i/p_i) with 0 log 0 = 0
double relative_entropy(const SimplexPoint& q, const SimplexPoint& p) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        if (q[i] <= 0.0) continue;
        h += q[i] * std::log(q[i] / p[i]);
    }
    return h;
}

void check_support(const SimplexPoint& q, const SimplexPoint& p) {
    if (q.size() != p.size())
        throw std::invalid_argument("penalty_factor: dimension mismatch");
    for (Eigen::Index i = 0; i < q.size(); ++i)
        if (q[i] > 0.0 && p[i] <= 0.0)
            throw AbsoluteContinuityViolated("q charges a scenario outside supp(p)");
}

}  // namespace

ExtendedValue penalty_factor(const AmbiguityFunction& f, const SimplexPoint& q,
                             const SimplexPoint& p) {
    check_support(q, p);
    const Eigen::Index n = p.size();
    switch (f.kind) {
        case AmbiguityFunction::Kind::Power: {
            const double e = f.lambda / (f.lambda - 1.0);
            // lambda in (0,1): e < 0, a vanishing density ratio diverges
            if (f.lambda > 0.0) {
                for (Eigen::Index i = 0; i < n; ++i)
                    if (p[i] > 0.0 && q[i] <= 0.0) return ExtendedValue::pos_inf();
            }
            double acc = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (p[i] <= 0.0) continue;
                acc += p[i] * std::pow(q[i] / p[i], e);
            }
            return ExtendedValue::finite(std::pow(acc, (1.0 - f.lambda) / f.lambda));
        }
        case AmbiguityFunction::Kind::Log: {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (p[i] <= 0.0) continue;
                if (q[i] <= 0.0) return ExtendedValue::pos_inf();
                acc += p[i] * std::log(q[i] / p[i]);
            }
            return ExtendedValue::finite(std::exp(-acc));
        }
        case AmbiguityFunction::Kind::Exponential:
            return ExtendedValue::finite(relative_entropy(q, p));
    }
    return ExtendedValue::pos_inf();  // unreachable
}

ExtendedValue r_value(const AmbiguityFunction& f, const SimplexPoint& q,
                      const SimplexPoint& p, double s) {
    ExtendedValue factor = penalty_factor(f, q, p);
    if (f.kind == AmbiguityFunction::Kind::Exponential) {
        // additive entropic penalty; the penalty must enter with a plus sign
        // for inf_q R(q, q.y) to reproduce -(1/gamma) log E^p[e^{-gamma y}]
        return ExtendedValue::finite(s + factor.value() / f.gamma);
    }
    // power / log: multiplicative factor with the infinite-factor convention
    if (factor.is_pos_inf()) {
        if (s >= 0.0) return ExtendedValue::pos_inf();
        return ExtendedValue::finite(0.0);
    }
    return ExtendedValue::finite(s > 0.0 ? s * factor.value() : 0.0);
}

ExtendedValue g_value(const AmbiguityFunction& f, const SimplexPoint& q,
                      const SimplexPoint& p, const Ref<const Vector>& scenario_values) {
    if (q.size() != scenario_values.size())
        throw std::invalid_argument("g_value: dimension mismatch");
    const double s = q.weights().dot(scenario_values);
    return r_value(f, q, p, s);
}

}  // namespace ambistop
