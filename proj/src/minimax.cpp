#include "ambistop/minimax.hpp"

#include "ambistop/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace ambistop {

// ---------------------------------------------------------------------------
// Simplex parametrization helpers
// ---------------------------------------------------------------------------

namespace {

constexpr double kZClamp = 45.0;

// q = softmax(0, z_1, ..., z_{n-1}); strictly interior for finite z
Vector softmax_point(const Ref<const Vector>& z_free, int n) {
    Vector z(n);
    z[0] = 0.0;
    for (int i = 1; i < n; ++i) z[i] = std::clamp(z_free[i - 1], -kZClamp, kZClamp);
    double m = z.maxCoeff();
    Vector e = (z.array() - m).exp();
    return e / e.sum();
}

Vector z_from_point(const Ref<const Vector>& q) {
    const int n = static_cast<int>(q.size());
    Vector z(n - 1);
    double q0 = std::max(q[0], 1e-18);
    for (int i = 1; i < n; ++i)
        z[i - 1] = std::clamp(std::log(std::max(q[i], 1e-18) / q0), -kZClamp, kZClamp);
    return z;
}

void grid_rec(int n, int level, int remaining, Vector& cur, std::vector<Vector>& out) {
    if (level == n - 1) {
        cur[level] = remaining;
        out.push_back(cur);
        return;
    }
    for (int k = 0; k <= remaining; ++k) {
        cur[level] = k;
        grid_rec(n, level + 1, remaining - k, cur, out);
    }
}

}  // namespace

std::vector<Vector> simplex_grid(int n, double step) {
    if (!(step > 0.0) || step > 1.0) throw std::invalid_argument("simplex_grid: bad step");
    const int m = std::max(1, static_cast<int>(std::lround(1.0 / step)));
    std::vector<Vector> pts;
    Vector cur(n);
    grid_rec(n, 0, m, cur, pts);
    for (Vector& v : pts) v /= static_cast<double>(m);
    return pts;
}

// ---------------------------------------------------------------------------
// outer_minimize
// ---------------------------------------------------------------------------

OuterResult outer_minimize(const InnerSolver& inner, const AmbiguityFunction& f,
                           const SimplexPoint& p, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("outer_minimize: tol > 0 required");
    const int n = static_cast<int>(p.size());
    if (n == 1) {
        SimplexPoint q = SimplexPoint::uniform(1);
        InnerResult ir = inner(q);
        return OuterResult{q, ir.value, 1};
    }

    constexpr int kBudget = 500;
    constexpr double kFloor = 2e-8;
    int evals = 0;

    // cache keyed on the floored measure, quantized; keeps common random
    // numbers intact across repeated proposals
    std::map<std::vector<long long>, InnerResult> cache;
    auto inner_cached = [&](const SimplexPoint& q) -> const InnerResult& {
        std::vector<long long> key(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) key[static_cast<std::size_t>(i)] = llround(q[i] * 4e12);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        if (evals >= kBudget) throw BudgetExhausted("outer_minimize: inner evaluation budget");
        ++evals;
        return cache.emplace(std::move(key), inner(q)).first->second;
    };

    auto floored = [&](const Ref<const Vector>& raw) {
        Vector q = (raw.array() + kFloor) / (1.0 + n * kFloor);
        return make_simplex(q);
    };

    auto objective = [&](const Vector& z) {
        SimplexPoint q = floored(softmax_point(z, n));
        const InnerResult& ir = inner_cached(q);
        return g_value(f, q, p, ir.expectations).sentinel();
    };

    // restart points: reference prior, worst-scenario blend, barycenter
    std::vector<Vector> starts;
    starts.push_back(z_from_point(floored(p.weights()).weights()));
    {
        const InnerResult& at_p = inner_cached(floored(p.weights()));
        Eigen::Index worst = 0;
        at_p.expectations.minCoeff(&worst);
        Vector blend = Vector::Constant(n, 0.2 / n);
        blend[worst] += 0.8;
        starts.push_back(z_from_point(blend));
    }
    starts.push_back(Vector::Zero(n - 1));

    bool converged = false;
    double best_val = std::numeric_limits<double>::infinity();
    Vector best_z = starts[0];
    for (const Vector& z0 : starts) {
        NelderMeadResult r;
        try {
            r = nelder_mead(objective, z0, 0.5, tol, 1e-9, kBudget);
        } catch (const BudgetExhausted&) {
            if (converged) break;
            throw;
        }
        converged = converged || r.converged;
        if (r.value < best_val) {
            best_val = r.value;
            best_z = r.x;
        }
    }
    if (!converged && evals >= kBudget)
        throw BudgetExhausted("outer_minimize: inner evaluation budget");

    SimplexPoint q_star = floored(softmax_point(best_z, n));
    return OuterResult{q_star, best_val, evals};
}

// ---------------------------------------------------------------------------
// SmallInstance machinery
// ---------------------------------------------------------------------------

void SmallInstance::validate() const {
    if (n_scenarios < 1 || n_scenarios > 3)
        throw StateSpaceTooLarge("SmallInstance: 1 <= N <= 3 required");
    if (nodes.empty() || nodes.size() > 64)
        throw StateSpaceTooLarge("SmallInstance: node count <= 64 required");
    int max_time = 0;
    for (const Node& nd : nodes) {
        max_time = std::max(max_time, nd.time);
        if (nd.children.empty()) continue;
        if (nd.trans.rows() != n_scenarios ||
            nd.trans.cols() != static_cast<Eigen::Index>(nd.children.size()))
            throw std::invalid_argument("SmallInstance: transition shape mismatch");
        for (int i = 0; i < n_scenarios; ++i) {
            if (std::abs(nd.trans.row(i).sum() - 1.0) > 1e-9 || nd.trans.row(i).minCoeff() < 0.0)
                throw std::invalid_argument("SmallInstance: transition rows must be distributions");
        }
        for (int c : nd.children)
            if (c < 0 || c >= static_cast<int>(nodes.size()))
                throw std::invalid_argument("SmallInstance: child index out of range");
    }
    if (max_time > 4) throw StateSpaceTooLarge("SmallInstance: at most 4 periods");
}

int SmallInstance::n_decision_nodes() const {
    int k = 0;
    for (const Node& nd : nodes)
        if (!nd.children.empty()) ++k;
    return k;
}

namespace {

constexpr std::size_t kMaxRules = 100000;

std::vector<StoppingRule> enumerate_subtree(const SmallInstance& inst, int node) {
    const auto& nd = inst.nodes[static_cast<std::size_t>(node)];
    StoppingRule stop_here(inst.nodes.size(), 0);
    stop_here[static_cast<std::size_t>(node)] = 1;
    if (nd.children.empty()) return {stop_here};

    std::vector<StoppingRule> out{stop_here};
    std::vector<std::vector<StoppingRule>> child_rules;
    child_rules.reserve(nd.children.size());
    std::size_t combos = 1;
    for (int c : nd.children) {
        child_rules.push_back(enumerate_subtree(inst, c));
        combos *= child_rules.back().size();
        if (combos > kMaxRules) throw StateSpaceTooLarge("enumerate_stopping_rules: too many rules");
    }
    // cartesian product of the per-child rule sets
    std::vector<std::size_t> pick(nd.children.size(), 0);
    for (;;) {
        StoppingRule rule(inst.nodes.size(), 0);
        for (std::size_t ci = 0; ci < nd.children.size(); ++ci) {
            const StoppingRule& sub = child_rules[ci][pick[ci]];
            for (std::size_t j = 0; j < rule.size(); ++j) rule[j] |= sub[j];
        }
        out.push_back(std::move(rule));
        if (out.size() > kMaxRules) throw StateSpaceTooLarge("enumerate_stopping_rules: too many rules");
        std::size_t c = 0;
        while (c < pick.size()) {
            if (++pick[c] < child_rules[c].size()) break;
            pick[c] = 0;
            ++c;
        }
        if (c == pick.size()) break;
    }
    return out;
}

Matrix reach_probabilities(const SmallInstance& inst) {
    Matrix reach = Matrix::Zero(inst.n_scenarios, static_cast<Eigen::Index>(inst.nodes.size()));
    reach.col(0).setOnes();
    // nodes are in parent-before-child order by construction of the builders;
    // a forward sweep is enough
    for (std::size_t j = 0; j < inst.nodes.size(); ++j) {
        const auto& nd = inst.nodes[j];
        for (std::size_t ci = 0; ci < nd.children.size(); ++ci)
            reach.col(nd.children[ci]) +=
                reach.col(static_cast<Eigen::Index>(j)).cwiseProduct(nd.trans.col(static_cast<Eigen::Index>(ci)));
    }
    return reach;
}

}  // namespace

std::vector<StoppingRule> enumerate_stopping_rules(const SmallInstance& inst) {
    inst.validate();
    return enumerate_subtree(inst, 0);
}

Vector rule_scenario_values(const SmallInstance& inst, const StoppingRule& rule) {
    const int N = inst.n_scenarios;
    Vector out(N);
    std::function<double(int, int)> val = [&](int node, int i) -> double {
        const auto& nd = inst.nodes[static_cast<std::size_t>(node)];
        if (rule[static_cast<std::size_t>(node)] || nd.children.empty()) return nd.payoff;
        double acc = 0.0;
        for (std::size_t ci = 0; ci < nd.children.size(); ++ci)
            acc += nd.trans(i, static_cast<Eigen::Index>(ci)) * val(nd.children[ci], i);
        return acc;
    };
    for (int i = 0; i < N; ++i) out[i] = val(0, i);
    return out;
}

RandomizedStoppingRule RandomizedStoppingRule::from_pure(const SmallInstance& inst,
                                                         const StoppingRule& rule) {
    RandomizedStoppingRule r;
    r.weight.assign(inst.nodes.size(), 0.0);
    // keep only the first stop along each path
    std::function<void(int, bool)> mark = [&](int node, bool stopped_above) {
        const auto& nd = inst.nodes[static_cast<std::size_t>(node)];
        bool stops = !stopped_above && (rule[static_cast<std::size_t>(node)] || nd.children.empty());
        if (stops) r.weight[static_cast<std::size_t>(node)] = 1.0;
        for (int c : nd.children) mark(c, stopped_above || stops);
    };
    mark(0, false);
    return r;
}

RandomizedStoppingRule RandomizedStoppingRule::mixture(const SmallInstance& inst,
                                                       const std::vector<StoppingRule>& rules,
                                                       const Ref<const Vector>& mix) {
    if (static_cast<Eigen::Index>(rules.size()) != mix.size())
        throw std::invalid_argument("RandomizedStoppingRule::mixture: size mismatch");
    RandomizedStoppingRule out;
    out.weight.assign(inst.nodes.size(), 0.0);
    for (std::size_t k = 0; k < rules.size(); ++k) {
        RandomizedStoppingRule pure = from_pure(inst, rules[k]);
        for (std::size_t j = 0; j < out.weight.size(); ++j)
            out.weight[j] += mix[static_cast<Eigen::Index>(k)] * pure.weight[j];
    }
    return out;
}

void RandomizedStoppingRule::validate(const SmallInstance& inst) const {
    if (weight.size() != inst.nodes.size())
        throw std::invalid_argument("RandomizedStoppingRule: size mismatch");
    for (double w : weight)
        if (w < -1e-12 || w > 1.0 + 1e-12)
            throw std::invalid_argument("RandomizedStoppingRule: weights in [0,1]");
    std::function<void(int, double)> walk = [&](int node, double acc) {
        acc += weight[static_cast<std::size_t>(node)];
        const auto& nd = inst.nodes[static_cast<std::size_t>(node)];
        if (nd.children.empty()) {
            if (std::abs(acc - 1.0) > 1e-9)
                throw std::invalid_argument("RandomizedStoppingRule: path weights must sum to 1");
            return;
        }
        for (int c : nd.children) walk(c, acc);
    };
    walk(0, 0.0);
}

Vector randomized_scenario_values(const SmallInstance& inst, const RandomizedStoppingRule& rule) {
    Matrix reach = reach_probabilities(inst);
    Vector out = Vector::Zero(inst.n_scenarios);
    for (std::size_t j = 0; j < inst.nodes.size(); ++j) {
        if (rule.weight[j] == 0.0) continue;
        out += reach.col(static_cast<Eigen::Index>(j)) *
               (rule.weight[j] * inst.nodes[j].payoff);
    }
    return out;
}

ExtendedValue randomized_g(const SmallInstance& inst, const RandomizedStoppingRule& rule,
                           const SimplexPoint& q, const SimplexPoint& p,
                           const AmbiguityFunction& f) {
    Vector y = randomized_scenario_values(inst, rule);
    return g_value(f, q, p, y);
}

PrimalResult primal_value(const SmallInstance& inst, const SimplexPoint& p,
                          const AmbiguityFunction& f) {
    auto rules = enumerate_stopping_rules(inst);
    PrimalResult best;
    ExtendedValue best_v = ExtendedValue::neg_inf();
    for (std::size_t k = 0; k < rules.size(); ++k) {
        Vector y = rule_scenario_values(inst, rules[k]);
        ExtendedValue v = smooth_objective(f, p, y);
        if (best.rule_index < 0 || best_v < v) {
            best_v = v;
            best.rule_index = static_cast<int>(k);
        }
    }
    best.value = best_v.sentinel();
    return best;
}

// ---------------------------------------------------------------------------
// dual_value: grid scan + continuum polish + saddle construction
// ---------------------------------------------------------------------------

namespace {

struct Game {
    const SimplexPoint* p;
    const AmbiguityFunction* f;
    Matrix Y;  // n_rules x N
    int N = 0;

    double smax(const Ref<const Vector>& q) const { return (Y * q).maxCoeff(); }

    double L(const SimplexPoint& q, double s) const {
        return r_value(*f, q, *p, s).sentinel();
    }

    double phi(const SimplexPoint& q) const { return L(q, smax(q.weights())); }

    // gradient of q -> R(q, q . ybar) at interior q with s > 0 (power/log)
    Vector grad(const Ref<const Vector>& q, const Ref<const Vector>& ybar) const {
        const int n = N;
        const double s = q.dot(ybar);
        Vector g(n);
        const SimplexPoint& pp = *p;
        switch (f->kind) {
            case AmbiguityFunction::Kind::Power: {
                const double e = f->lambda / (f->lambda - 1.0);
                const double c = (1.0 - f->lambda) / f->lambda;
                double S = 0.0;
                for (int i = 0; i < n; ++i) S += pp[i] * std::pow(q[i] / pp[i], e);
                const double Sc = std::pow(S, c);
                for (int i = 0; i < n; ++i)
                    g[i] = Sc * (ybar[i] - s * std::pow(q[i] / pp[i], e - 1.0) / S);
                return g;
            }
            case AmbiguityFunction::Kind::Log: {
                double acc = 0.0;
                for (int i = 0; i < n; ++i) acc += pp[i] * std::log(q[i] / pp[i]);
                const double factor = std::exp(-acc);
                for (int i = 0; i < n; ++i) g[i] = factor * (ybar[i] - s * pp[i] / q[i]);
                return g;
            }
            case AmbiguityFunction::Kind::Exponential: {
                for (int i = 0; i < n; ++i)
                    g[i] = ybar[i] + (std::log(q[i] / pp[i]) + 1.0) / f->gamma;
                return g;
            }
        }
        return g;
    }
};

// residuals of the saddle system: s-ties across the active rules and
// stationarity of the mixture objective in softmax coordinates
struct SaddleSystem {
    const Game* game;
    std::vector<int> active;

    int dim() const { return (game->N - 1) + static_cast<int>(active.size()) - 1; }

    void split(const Ref<const Vector>& xi, Vector& z, Vector& w) const {
        const int nz = game->N - 1;
        const int a = static_cast<int>(active.size());
        z = xi.head(nz);
        w = Vector(a);
        double rest = 0.0;
        for (int j = 1; j < a; ++j) {
            w[j] = xi[nz + j - 1];
            rest += w[j];
        }
        w[0] = 1.0 - rest;
    }

    Vector residual(const Ref<const Vector>& xi) const {
        Vector z, w;
        split(xi, z, w);
        const int n = game->N;
        const int a = static_cast<int>(active.size());
        Vector q = softmax_point(z, n);
        Vector ybar = Vector::Zero(n);
        for (int j = 0; j < a; ++j) ybar += w[j] * game->Y.row(active[static_cast<std::size_t>(j)]).transpose();

        Vector r(dim());
        int at = 0;
        const Vector y0 = game->Y.row(active[0]).transpose();
        for (int j = 1; j < a; ++j) {
            Vector yj = game->Y.row(active[static_cast<std::size_t>(j)]).transpose();
            r[at++] = q.dot(y0) - q.dot(yj);
        }
        Vector g = game->grad(q, ybar);
        const double mean = q.dot(g);
        for (int i = 1; i < n; ++i) r[at++] = q[i] * (g[i] - mean);
        return r;
    }
};

// damped Newton with a finite-difference Jacobian; returns true on a small
// residual
bool newton_solve(const SaddleSystem& sys, Vector& xi, double tol) {
    const int d = sys.dim();
    if (d == 0) return true;
    Vector r = sys.residual(xi);
    for (int it = 0; it < 80; ++it) {
        if (r.cwiseAbs().maxCoeff() < tol) return true;
        Matrix J(d, d);
        for (int j = 0; j < d; ++j) {
            double h = 1e-7 * std::max(1.0, std::abs(xi[j]));
            Vector xp = xi;
            xp[j] += h;
            J.col(j) = (sys.residual(xp) - r) / h;
        }
        Eigen::FullPivLU<Matrix> lu(J);
        if (!lu.isInvertible()) return false;
        Vector step = lu.solve(-r);
        double base = r.norm();
        double scale = 1.0;
        for (int halvings = 0; halvings < 25; ++halvings) {
            Vector cand = xi + scale * step;
            for (int i = 0; i < static_cast<int>(sys.game->N) - 1; ++i)
                cand[i] = std::clamp(cand[i], -kZClamp, kZClamp);
            Vector rc = sys.residual(cand);
            if (rc.norm() < base || halvings == 24) {
                xi = cand;
                r = rc;
                break;
            }
            scale *= 0.5;
        }
    }
    return r.cwiseAbs().maxCoeff() < tol;
}

}  // namespace

DualResult dual_value(const SmallInstance& inst, const SimplexPoint& p,
                      const AmbiguityFunction& f, double grid_step) {
    if (grid_step > 0.02 + 1e-12)
        throw std::invalid_argument("dual_value: grid_step <= 0.02 required");
    inst.validate();
    auto rules = enumerate_stopping_rules(inst);
    const int N = inst.n_scenarios;

    Game game;
    game.p = &p;
    game.f = &f;
    game.N = N;
    game.Y = Matrix(static_cast<Eigen::Index>(rules.size()), N);
    for (std::size_t k = 0; k < rules.size(); ++k)
        game.Y.row(static_cast<Eigen::Index>(k)) = rule_scenario_values(inst, rules[k]).transpose();

    const auto grid_raw = simplex_grid(N, grid_step);
    std::vector<SimplexPoint> grid;
    grid.reserve(grid_raw.size());
    for (const Vector& g : grid_raw) grid.push_back(make_simplex(g));

    // ---- grid scan: upper envelope min and per-rule minima ----
    double minmax_grid = std::numeric_limits<double>::infinity();
    std::size_t argmin_grid = 0;
    Vector rule_grid_min =
        Vector::Constant(static_cast<Eigen::Index>(rules.size()), std::numeric_limits<double>::infinity());
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        const SimplexPoint& q = grid[gi];
        Vector s = game.Y * q.weights();
        double top = game.L(q, s.maxCoeff());
        if (top < minmax_grid) {
            minmax_grid = top;
            argmin_grid = gi;
        }
        for (Eigen::Index k = 0; k < s.size(); ++k) {
            double lk = game.L(q, s[k]);
            rule_grid_min[k] = std::min(rule_grid_min[k], lk);
        }
    }

    const double scale = std::max(1.0, std::abs(minmax_grid));

    // ---- continuum polish of min_q max_k ----
    auto phi_z = [&](const Vector& z) { return game.phi(make_simplex(softmax_point(z, N))); };
    Vector z0 = z_from_point(grid[argmin_grid].weights());
    NelderMeadResult pol = nelder_mead(phi_z, z0, 0.25, 1e-13 * scale, 1e-11, 6000);
    SimplexPoint q_tilde = make_simplex(softmax_point(pol.x, N));
    double v_tilde = std::min(pol.value, minmax_grid);

    // ---- pure max-min: polish the strongest rules' individual minima ----
    std::vector<int> order(rules.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return rule_grid_min[a] > rule_grid_min[b]; });
    double maxmin_pure = -std::numeric_limits<double>::infinity();
    int argmax_pure = order.empty() ? -1 : order[0];
    for (std::size_t r = 0; r < std::min<std::size_t>(order.size(), 5); ++r) {
        int k = order[r];
        // grid argmin of this rule as the polish start
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t gi = 0; gi < grid.size(); ++gi) {
            double lk = game.L(grid[gi], game.Y.row(k).dot(grid[gi].weights()));
            if (lk < best) {
                best = lk;
                arg = gi;
            }
        }
        auto lk_z = [&](const Vector& z) {
            SimplexPoint q = make_simplex(softmax_point(z, N));
            return game.L(q, game.Y.row(k).dot(q.weights()));
        };
        NelderMeadResult rp = nelder_mead(lk_z, z_from_point(grid[arg].weights()), 0.25,
                                          1e-13 * scale, 1e-11, 4000);
        double refined = std::min(best, rp.value);
        if (refined > maxmin_pure) {
            maxmin_pure = refined;
            argmax_pure = k;
        }
    }

    // ---- saddle construction over candidate active sets ----
    Vector s_at = game.Y * q_tilde.weights();
    std::vector<int> by_s(rules.size());
    for (std::size_t i = 0; i < by_s.size(); ++i) by_s[i] = static_cast<int>(i);
    std::stable_sort(by_s.begin(), by_s.end(), [&](int a, int b) { return s_at[a] > s_at[b]; });
    // drop rules with duplicated scenario-value vectors
    std::vector<int> distinct;
    for (int k : by_s) {
        bool dup = false;
        for (int d : distinct)
            if ((game.Y.row(k) - game.Y.row(d)).cwiseAbs().maxCoeff() < 1e-13) dup = true;
        if (!dup) distinct.push_back(k);
        if (static_cast<int>(distinct.size()) >= N + 1) break;
    }

    SaddleCertificate cert;
    cert.minmax = v_tilde;
    cert.maxmin_pure = maxmin_pure;
    double best_violation = std::numeric_limits<double>::infinity();

    const bool positive_region = s_at.maxCoeff() > 1e-12 ||
                                 f.kind == AmbiguityFunction::Kind::Exponential;
    int max_active = std::min<int>(N, static_cast<int>(distinct.size()));
    for (int a = 1; positive_region && a <= max_active; ++a) {
        SaddleSystem sys;
        sys.game = &game;
        sys.active.assign(distinct.begin(), distinct.begin() + a);

        Vector xi(sys.dim());
        xi.head(N - 1) = z_from_point(q_tilde.weights());
        for (int j = 1; j < a; ++j) xi[N - 1 + j - 1] = 1.0 / a;
        if (!newton_solve(sys, xi, 1e-12 * scale)) continue;

        Vector z, w;
        sys.split(xi, z, w);
        if (w.minCoeff() < -1e-8) continue;
        w = w.cwiseMax(0.0);
        w /= w.sum();
        SimplexPoint q_star = make_simplex(softmax_point(z, N));
        Vector ybar = Vector::Zero(N);
        for (int j = 0; j < a; ++j)
            ybar += w[j] * game.Y.row(sys.active[static_cast<std::size_t>(j)]).transpose();
        const double v_star = game.L(q_star, q_star.weights().dot(ybar));

        // inequality A: no pure rule beats the mixture at q_star
        double violA = (game.Y * q_star.weights()).maxCoeff();
        violA = game.L(q_star, violA) - v_star;
        // inequality B: the mixture never dips below v_star over the grid
        double violB = 0.0;
        for (const SimplexPoint& q : grid) {
            double lw = game.L(q, q.weights().dot(ybar));
            violB = std::max(violB, v_star - lw);
        }
        double viol = std::max({violA, violB, 0.0});
        if (viol < best_violation) {
            best_violation = viol;
            cert.q_star = q_star;
            cert.mixture.clear();
            for (int j = 0; j < a; ++j)
                cert.mixture.emplace_back(sys.active[static_cast<std::size_t>(j)], w[j]);
            std::stable_sort(cert.mixture.begin(), cert.mixture.end(),
                             [](const auto& x, const auto& y) { return x.second > y.second; });
            cert.tau_star = cert.mixture.front().first;
            cert.max_violation = viol;
            cert.minmax = std::min(v_tilde, game.phi(q_star));
            // value achieved by the certified mixture: its own worst measure
            double achieved = std::numeric_limits<double>::infinity();
            for (const SimplexPoint& q : grid)
                achieved = std::min(achieved, game.L(q, q.weights().dot(ybar)));
            auto lw_z = [&](const Vector& zz) {
                SimplexPoint q = make_simplex(softmax_point(zz, N));
                return game.L(q, q.weights().dot(ybar));
            };
            NelderMeadResult wp = nelder_mead(lw_z, z_from_point(q_star.weights()), 0.25,
                                              1e-13 * scale, 1e-11, 4000);
            achieved = std::min(achieved, wp.value);
            cert.maxmin_randomized = achieved;
        }
        if (viol <= 1e-10 * scale) break;
    }

    if (cert.mixture.empty()) {
        // degenerate fallback (nonpositive payoffs region): certify from the
        // grid pair only
        cert.q_star = q_tilde;
        cert.tau_star = argmax_pure;
        cert.mixture.emplace_back(argmax_pure, 1.0);
        cert.maxmin_randomized = maxmin_pure;
        cert.max_violation = std::max(0.0, v_tilde - maxmin_pure);
    }

    cert.gap = cert.minmax - cert.maxmin_randomized;
    cert.inequalities_checked =
        static_cast<long>(rules.size()) + static_cast<long>(grid.size());

    DualResult out;
    out.value = cert.minmax;
    out.q_star = cert.q_star;
    out.certificate = std::move(cert);
    return out;
}

}  // namespace ambistop
