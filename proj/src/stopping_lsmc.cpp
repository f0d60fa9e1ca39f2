#include "ambistop/stopping_lsmc.hpp"

#include <cmath>
#include <numeric>

namespace ambistop {

namespace {

// exponent multi-indices with total degree <= degree over dim variables
std::vector<std::vector<int>> monomial_exponents(int dim, int degree) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(dim), 0);
    std::function<void(int, int)> rec = [&](int pos, int remaining) {
        if (pos == dim) {
            out.push_back(cur);
            return;
        }
        for (int e = 0; e <= remaining; ++e) {
            cur[static_cast<std::size_t>(pos)] = e;
            rec(pos + 1, remaining - e);
        }
        cur[static_cast<std::size_t>(pos)] = 0;
    };
    rec(0, degree);
    return out;
}

struct Basis {
    std::vector<std::vector<int>> exponents;
    int dim = 0;

    Basis(int dim_, int degree) : exponents(monomial_exponents(dim_, degree)), dim(dim_) {}
    int size() const { return static_cast<int>(exponents.size()); }

    void eval(const Ref<const Vector>& state, Ref<Vector> row) const {
        for (int b = 0; b < size(); ++b) {
            double v = 1.0;
            const auto& e = exponents[static_cast<std::size_t>(b)];
            for (int d = 0; d < dim; ++d)
                for (int k = 0; k < e[static_cast<std::size_t>(d)]; ++k) v *= state[d];
            row[b] = v;
        }
    }
};

// least squares with rank check; falls back to ridge (1e-8) when the normal
// matrix is rank-deficient
Vector regress(const Matrix& X, const Vector& y, bool& used_ridge) {
    Eigen::ColPivHouseholderQR<Matrix> qr(X);
    if (qr.rank() == X.cols()) return qr.solve(y);
    used_ridge = true;
    Matrix xtx = X.transpose() * X;
    xtx.diagonal().array() += 1e-8;
    return xtx.ldlt().solve(X.transpose() * y);
}

struct RuleEval {
    // regression coefficients per decision time t = 1..T-1; decisions at
    // t = 0 and t = T are handled separately (constant state / forced stop).
    // At t = 0 the state is degenerate except for a revealed scenario, so the
    // decision is stored per information group (one group, or one per
    // scenario under InfoMode::Revealed).
    std::vector<Vector> coeffs;
    std::vector<std::uint8_t> stop_at_zero;
};

// posterior used for revenue projection, by information mode
Vector revenue_weights(const DivestModel& model, const SimplexPoint& q,
                       const LearningPaths& paths, InfoMode mode, std::size_t p, int t) {
    const int N = model.n_scenarios();
    switch (mode) {
        case InfoMode::Learning:
            return paths.pi[p].row(t).transpose();
        case InfoMode::FrozenPrior:
            return q.weights();
        case InfoMode::Revealed: {
            Vector w = Vector::Zero(N);
            w[paths.theta(static_cast<Eigen::Index>(p), 0)] = 1.0;
            return w;
        }
    }
    return q.weights();
}

}  // namespace

DivestSolution lsmc_value(const DivestModel& model, const SimplexPoint& q,
                          const LsmcConfig& cfg, InfoMode mode) {
    model.validate();
    cfg.validate();
    if (q.size() != model.n_scenarios())
        throw std::invalid_argument("lsmc_value: prior size mismatch");

    const int T = model.horizon_T;
    const int N = model.n_scenarios();
    const int K = model.n_factors();
    const int n = cfg.n_paths;
    const std::size_t np = static_cast<std::size_t>(n);

    LearningPaths paths = simulate_learning_paths(model, q, n, cfg.seed, ScenarioDraw::Fixed);

    // discount powers
    Vector betapow(T + 1);
    betapow[0] = 1.0;
    for (int t = 1; t <= T; ++t) betapow[t] = betapow[t - 1] * model.beta;

    // projected per-step revenue, time-0 discounted
    Matrix cash(n, T + 1);
    for (std::size_t p = 0; p < np; ++p) {
        cash(static_cast<Eigen::Index>(p), 0) = 0.0;
        for (int t = 1; t <= T; ++t) {
            Vector w = revenue_weights(model, q, paths, mode, p, t);
            Vector xt = paths.xtilde[p].row(t).transpose();
            cash(static_cast<Eigen::Index>(p), t) = betapow[t] * model.projected_revenue(t, xt, w);
        }
    }

    const int npi = (mode == InfoMode::Learning) ? N - 1 : 0;
    const int rev_dim = (mode == InfoMode::Revealed) ? N - 1 : 0;
    const Basis basis(K + npi + rev_dim, cfg.basis_degree);

    // For Revealed the scenario enters as extra one-hot coordinates so one
    // regression serves all scenarios.
    auto features = [&](std::size_t p, int t) {
        Vector s(K + npi + rev_dim);
        s.head(K) = paths.xtilde[p].row(t).transpose();
        for (int i = 0; i < npi; ++i) s[K + i] = paths.pi[p](t, i);
        for (int i = 0; i < rev_dim; ++i)
            s[K + npi + i] =
                (paths.theta(static_cast<Eigen::Index>(p), 0) == i) ? 1.0 : 0.0;
        return s;
    };

    DivestSolution sol;
    sol.stop_times.assign(np, T);
    sol.true_scenarios.resize(np);
    for (std::size_t p = 0; p < np; ++p)
        sol.true_scenarios[p] = paths.theta(static_cast<Eigen::Index>(p), 0);

    // value-to-come per path, time-0 discounted; starts at forced stop at T
    Vector v(n);
    for (Eigen::Index p = 0; p < n; ++p) v[p] = -betapow[T] * model.closure_cost(T);

    RuleEval rule;
    rule.coeffs.resize(static_cast<std::size_t>(T));

    Matrix design(n, basis.size());
    Vector row(basis.size());
    for (int t = T - 1; t >= 1; --t) {
        // value if continuing through t+1 under the current downstream rule
        Vector cont(n);
        for (Eigen::Index p = 0; p < n; ++p)
            cont[p] = cash(p, t + 1) + v[p];

        for (std::size_t p = 0; p < np; ++p) {
            basis.eval(features(p, t), row);
            design.row(static_cast<Eigen::Index>(p)) = row.transpose();
        }
        Vector beta_hat = regress(design, cont, sol.ridge_fallback);
        rule.coeffs[static_cast<std::size_t>(t)] = beta_hat;

        const double immediate = -betapow[t] * model.closure_cost(t);
        for (std::size_t p = 0; p < np; ++p) {
            double chat = design.row(static_cast<Eigen::Index>(p)).dot(beta_hat);
            if (immediate >= chat - cfg.stop_tolerance) {
                v[static_cast<Eigen::Index>(p)] = immediate;
                sol.stop_times[p] = t;
            } else {
                v[static_cast<Eigen::Index>(p)] = cont[static_cast<Eigen::Index>(p)];
            }
        }
    }

    // t = 0: the state is shared across paths within an information group
    // (one group normally, one per scenario when the scenario is revealed),
    // so the continuation estimate is the group mean
    {
        const int n_groups = (mode == InfoMode::Revealed) ? N : 1;
        auto group_of = [&](std::size_t p) {
            return mode == InfoMode::Revealed ? sol.true_scenarios[p] : 0;
        };
        Vector cont(n);
        for (Eigen::Index p = 0; p < n; ++p) cont[p] = cash(p, 1) + v[p];
        Vector group_sum = Vector::Zero(n_groups);
        Vector group_count = Vector::Zero(n_groups);
        for (std::size_t p = 0; p < np; ++p) {
            group_sum[group_of(p)] += cont[static_cast<Eigen::Index>(p)];
            group_count[group_of(p)] += 1.0;
        }
        const double immediate = -model.closure_cost(0);
        rule.stop_at_zero.assign(static_cast<std::size_t>(n_groups), 0);
        for (int g = 0; g < n_groups; ++g) {
            if (group_count[g] == 0.0) continue;
            double mean_cont = group_sum[g] / group_count[g];
            if (immediate >= mean_cont - cfg.stop_tolerance)
                rule.stop_at_zero[static_cast<std::size_t>(g)] = 1;
        }
        for (std::size_t p = 0; p < np; ++p) {
            if (rule.stop_at_zero[static_cast<std::size_t>(group_of(p))]) {
                v[static_cast<Eigen::Index>(p)] = immediate;
                sol.stop_times[p] = 0;
            } else {
                v[static_cast<Eigen::Index>(p)] = cont[static_cast<Eigen::Index>(p)];
            }
        }
    }

    sol.value = v.mean();
    double var = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) var += (v[p] - sol.value) * (v[p] - sol.value);
    var /= std::max(1, n - 1);
    sol.std_error = std::sqrt(var / n);
    sol.closure_freq = closure_histogram(sol, T, N);

    // Per-scenario value of the *same* rule: re-simulate with the scenario
    // forced and the filter still started at q, reusing the path seeds, and
    // walk the rule forward with true scenario revenues.
    sol.scenario_values = Vector::Zero(N);
    for (int i = 0; i < N; ++i) {
        LearningPaths sp = simulate_forced_scenario_paths(model, q, i, n, cfg.seed);

        // forward walk under the trained rule with scenario-i revenues
        const int group = (mode == InfoMode::Revealed) ? i : 0;
        double acc = 0.0;
        Vector frow(basis.size());
        for (std::size_t p = 0; p < np; ++p) {
            if (rule.stop_at_zero[static_cast<std::size_t>(group)]) {
                acc += -model.closure_cost(0);
                continue;
            }
            double reward = 0.0;
            int tau = T;
            for (int t = 1; t <= T; ++t) {
                Vector xt = sp.xtilde[p].row(t).transpose();
                reward += betapow[t] * model.revenue(model.risk_factor(i, t, xt));
                if (t == T) break;
                Vector s(K + npi + rev_dim);
                s.head(K) = xt;
                for (int d = 0; d < npi; ++d) s[K + d] = sp.pi[p](t, d);
                for (int d = 0; d < rev_dim; ++d) s[K + npi + d] = (i == d) ? 1.0 : 0.0;
                basis.eval(s, frow);
                double chat = frow.dot(rule.coeffs[static_cast<std::size_t>(t)]);
                double immediate = -betapow[t] * model.closure_cost(t);
                if (immediate >= chat - cfg.stop_tolerance) {
                    tau = t;
                    break;
                }
            }
            reward -= betapow[tau] * model.closure_cost(tau);
            acc += reward;
        }
        sol.scenario_values[i] = acc / n;
    }
    return sol;
}

Matrix closure_histogram(const DivestSolution& solution, int horizon_T, int n_scenarios) {
    Matrix freq = Matrix::Zero(horizon_T + 1, n_scenarios);
    const double w = 1.0 / static_cast<double>(solution.stop_times.size());
    for (std::size_t p = 0; p < solution.stop_times.size(); ++p)
        freq(solution.stop_times[p], solution.true_scenarios[p]) += w;
    return freq;
}

namespace {

struct DivestTreeCtx {
    const DivestModel* model;
    Vector betapow;
    long long nodes = 0;
    static constexpr long long kMaxNodes = 20'000'000;
};

// exact DP over (eps, scenario, eta) branches; values discounted to time 0
double divest_tree_value(DivestTreeCtx& ctx, int t, const Vector& xtilde, const Vector& pi) {
    const DivestModel& m = *ctx.model;
    const double immediate = -ctx.betapow[t] * m.closure_cost(t);
    if (t == m.horizon_T) return immediate;
    if (++ctx.nodes > DivestTreeCtx::kMaxNodes)
        throw StateSpaceTooLarge("tree_oracle_divest: node budget exceeded");

    constexpr double s3 = 1.7320508075688772;
    static const double pts[3] = {-s3, 0.0, s3};
    static const double wts[3] = {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0};

    const int K = m.n_factors();
    const int N = m.n_scenarios();
    double cont = 0.0;

    std::vector<int> eps_idx(static_cast<std::size_t>(K), 0);
    bool done = false;
    while (!done) {
        double weps = 1.0;
        Vector eps(K);
        for (int k = 0; k < K; ++k) {
            eps[k] = pts[eps_idx[static_cast<std::size_t>(k)]];
            weps *= wts[eps_idx[static_cast<std::size_t>(k)]];
        }
        Vector x_new = m.phi * xtilde + m.vol * eps;
        for (int i = 0; i < N; ++i) {
            if (pi[i] <= 0.0) continue;
            const double reward = ctx.betapow[t + 1] * m.revenue(m.risk_factor(i, t + 1, x_new));
            for (int k = 0; k < 3; ++k) {
                const double s = m.signal_means(i, t + 1) + m.sigma_s * pts[k];
                Vector pi_new = bayes_update(pi, m, t + 1, s);
                const double pr = weps * pi[i] * wts[k];
                cont += pr * (reward + divest_tree_value(ctx, t + 1, x_new, pi_new));
            }
        }
        // advance the eps multi-index
        int k = 0;
        while (k < K) {
            if (++eps_idx[static_cast<std::size_t>(k)] < 3) break;
            eps_idx[static_cast<std::size_t>(k)] = 0;
            ++k;
        }
        done = (k == K);
    }
    return std::max(immediate, cont);
}

}  // namespace

double tree_oracle_divest(const DivestModel& model, const SimplexPoint& q) {
    model.validate();
    if (model.horizon_T > 4 || model.n_scenarios() > 3)
        throw StateSpaceTooLarge("tree_oracle_divest: needs T <= 4 and N <= 3");
    if (model.noise != NoiseKind::ThreePoint)
        throw StateSpaceTooLarge("tree_oracle_divest: needs three-point noise");
    if (q.size() != model.n_scenarios())
        throw std::invalid_argument("tree_oracle_divest: prior size mismatch");

    DivestTreeCtx ctx;
    ctx.model = &model;
    ctx.betapow.resize(model.horizon_T + 1);
    ctx.betapow[0] = 1.0;
    for (int t = 1; t <= model.horizon_T; ++t) ctx.betapow[t] = ctx.betapow[t - 1] * model.beta;

    Vector x0 = Vector::Zero(model.n_factors());
    return divest_tree_value(ctx, 0, x0, q.weights());
}

}  // namespace ambistop
