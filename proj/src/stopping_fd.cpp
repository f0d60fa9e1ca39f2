#include "ambistop/stopping_fd.hpp"

#include <cmath>

namespace ambistop {

FdGrid default_grid(const GbmStockModel& model, int nx, int steps_per_year) {
    const double half_width = 6.0 * model.sigma * std::sqrt(model.horizon_T);
    FdGrid g;
    g.x_min = model.x0() - half_width;
    g.x_max = model.x0() + half_width;
    g.nx = nx;
    g.nt = std::max(1, static_cast<int>(std::lround(model.horizon_T * steps_per_year)));
    return g;
}

namespace {

// The filter weights exp(-t z^2/(2 sigma^2) + z (x - x0 + sigma^2 t/2)/sigma^2)
// are the exact scenario posterior when z is the arithmetic stock drift b
// (the sigma^2 t/2 compensator belongs to that parametrization). The
// posterior mean log-drift is then E[b | t, x] - sigma^2/2.
DriftPrior drift_prior(const GbmStockModel& model, const SimplexPoint& q) {
    return DriftPrior(model.drifts, q, model.sigma, model.x0());
}

// largest stock drift charged by q; drives the x_max asymptote
double max_supported_drift(const GbmStockModel& model, const SimplexPoint& q) {
    double b = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < q.size(); ++i)
        if (q[i] > 0.0) b = std::max(b, model.drifts[i]);
    return b;
}

struct Tridiag {
    Vector lower, diag, upper;  // lower[0] and upper[n-1] unused
    explicit Tridiag(int n) : lower(n), diag(n), upper(n) {}
};

// Thomas algorithm; overwrites rhs with the solution.
void solve_tridiag(const Tridiag& m, Vector& rhs) {
    const Eigen::Index n = rhs.size();
    Vector c(n);
    c[0] = m.upper[0] / m.diag[0];
    rhs[0] /= m.diag[0];
    for (Eigen::Index j = 1; j < n; ++j) {
        double denom = m.diag[j] - m.lower[j] * c[j - 1];
        c[j] = m.upper[j] / denom;
        rhs[j] = (rhs[j] - m.lower[j] * rhs[j - 1]) / denom;
    }
    for (Eigen::Index j = n - 2; j >= 0; --j) rhs[j] -= c[j] * rhs[j + 1];
}

// Projected SOR for M v = rhs with v >= 0; warm starts from v.
void solve_psor(const Tridiag& m, const Vector& rhs, Vector& v, const FdOptions& opts) {
    const Eigen::Index n = rhs.size();
    for (int it = 0; it < opts.psor_max_iter; ++it) {
        double max_delta = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            double acc = rhs[j];
            if (j > 0) acc -= m.lower[j] * v[j - 1];
            if (j + 1 < n) acc -= m.upper[j] * v[j + 1];
            double cand = (1.0 - opts.psor_omega) * v[j] + opts.psor_omega * acc / m.diag[j];
            cand = std::max(0.0, cand);
            max_delta = std::max(max_delta, std::abs(cand - v[j]));
            v[j] = cand;
        }
        if (max_delta < opts.psor_tol) return;
    }
    throw NoConvergence("solve_vi: PSOR exceeded max iterations");
}

}  // namespace

ValueSurface solve_vi(const GbmStockModel& model, const SimplexPoint& q, const FdGrid& grid,
                      const FdOptions& opts) {
    model.validate();
    grid.validate(model.x0());
    if (q.size() != model.n_scenarios())
        throw std::invalid_argument("solve_vi: weight size mismatch");

    const int nx = grid.nx;
    const int nt = grid.nt;
    const double dx = grid.dx();
    const double dt = grid.dt(model.horizon_T);
    const double a = 0.5 * model.sigma * model.sigma;
    const double r = model.r;
    const double T = model.horizon_T;
    const DriftPrior prior = drift_prior(model, q);
    const double b_max = max_supported_drift(model, q);

    // per-level drift and source terms; gamma_drift returns E[b | t, x] here
    Matrix gam(nt + 1, nx), src(nt + 1, nx);
    for (int n = 0; n <= nt; ++n) {
        const double t = n * dt;
        for (int j = 0; j < nx; ++j) {
            const double x = grid.x_min + j * dx;
            const double b_bar = gamma_drift(prior, t, x);
            gam(n, j) = b_bar - a;  // posterior mean log-drift
            src(n, j) = std::exp(x) * (b_bar - r);
        }
    }
    // Neumann slope at x_max: d v/dx = e^{x_max} h(t) with
    // h(t) = max(e^{(b_max - r)(T - t)} - 1, 0)
    auto neumann_slope = [&](double t) {
        return std::exp(grid.x_max) * std::max(std::exp((b_max - r) * (T - t)) - 1.0, 0.0);
    };

    Matrix values = Matrix::Zero(nt + 1, nx);
    const double th = opts.theta;

    // spatial operator row coefficients (interior): L v = a v_xx + gam v_x - r v
    auto assemble = [&](int n, Tridiag& m, double scale) {
        // scale = -theta dt for the implicit side (I - theta dt L)
        for (int j = 1; j < nx - 1; ++j) {
            const double g = gam(n, j);
            const double lo = a / (dx * dx) - g / (2.0 * dx);
            const double di = -2.0 * a / (dx * dx) - r;
            const double up = a / (dx * dx) + g / (2.0 * dx);
            m.lower[j] = scale * lo;
            m.diag[j] = 1.0 + scale * di;
            m.upper[j] = scale * up;
        }
        // x_min: Dirichlet v = 0
        m.diag[0] = 1.0;
        m.upper[0] = 0.0;
        m.lower[0] = 0.0;
        // x_max: ghost node eliminated via v_{nx} = v_{nx-2} + 2 dx s(t)
        {
            const int j = nx - 1;
            const double lo = 2.0 * a / (dx * dx);
            const double di = -2.0 * a / (dx * dx) - r;
            m.lower[j] = scale * lo;
            m.diag[j] = 1.0 + scale * di;
            m.upper[j] = 0.0;
        }
    };

    auto boundary_extra = [&](int n) {
        // contribution of the eliminated ghost node at x_max
        const double g = gam(n, nx - 1);
        const double s = neumann_slope(n * dt);
        return (2.0 * a / dx + g) * s;
    };

    Tridiag m_impl(nx);
    Vector v = values.row(nt).transpose();  // terminal condition, all zero
    Vector rhs(nx);

    const double steps_per_year = nt / T;  // exercise-date stride for Bermudan
    auto exercise_level = [&](int n) {
        if (!opts.bermudan) return true;
        double k = n / steps_per_year;
        return std::abs(k - std::lround(k)) < 1e-9;
    };

    for (int n = nt - 1; n >= 0; --n) {
        // explicit side: (I + (1-theta) dt L^{n+1}) v^{n+1} + dt source mix
        rhs[0] = 0.0;
        for (int j = 1; j < nx - 1; ++j) {
            const double g = gam(n + 1, j);
            const double lo = a / (dx * dx) - g / (2.0 * dx);
            const double di = -2.0 * a / (dx * dx) - r;
            const double up = a / (dx * dx) + g / (2.0 * dx);
            double expl = v[j] + (1.0 - th) * dt * (lo * v[j - 1] + di * v[j] + up * v[j + 1]);
            rhs[j] = expl + dt * (th * src(n, j) + (1.0 - th) * src(n + 1, j));
        }
        {
            const int j = nx - 1;
            const double lo = 2.0 * a / (dx * dx);
            const double di = -2.0 * a / (dx * dx) - r;
            double expl = v[j] + (1.0 - th) * dt * (lo * v[j - 1] + di * v[j] + boundary_extra(n + 1));
            rhs[j] = expl + dt * (th * (src(n, j) + boundary_extra(n)) +
                                  (1.0 - th) * src(n + 1, j));
        }

        assemble(n, m_impl, -th * dt);
        if (exercise_level(n)) {
            solve_psor(m_impl, rhs, v, opts);
        } else {
            Vector sol = rhs;
            solve_tridiag(m_impl, sol);
            v = sol;
        }
        values.row(n) = v.transpose();
    }

    ValueSurface out;
    out.values = std::move(values);
    out.grid = grid;
    out.horizon = T;
    out.continuation_mask = out.values.array() > opts.mask_tol;
    return out;
}

std::vector<std::optional<double>> extract_boundary(const ValueSurface& surface) {
    const int nt = static_cast<int>(surface.values.rows()) - 1;
    const int nx = static_cast<int>(surface.values.cols());
    const double dx = surface.grid.dx();
    std::vector<std::optional<double>> boundary(static_cast<std::size_t>(nt) + 1);
    // the Dirichlet column at x_min is an artifact of the truncation, not a
    // region edge; scan interior columns only
    for (int n = 0; n <= nt; ++n) {
        int count = 0;
        for (int j = 1; j < nx - 1; ++j) count += surface.continuation_mask(n, j) ? 1 : 0;
        if (count == 0 || count == nx - 2) continue;  // absent: empty or full
        bool first = surface.continuation_mask(n, 1);
        for (int j = 2; j < nx - 1; ++j) {
            if (surface.continuation_mask(n, j) != first) {
                boundary[static_cast<std::size_t>(n)] = surface.grid.x_min + j * dx;
                break;
            }
        }
    }
    return boundary;
}

double surface_value_at(const ValueSurface& s, int time_index, double x) {
    const double dx = s.grid.dx();
    double pos = (x - s.grid.x_min) / dx;
    int j = std::clamp(static_cast<int>(std::floor(pos)), 0, s.grid.nx - 2);
    double w = pos - j;
    return (1.0 - w) * s.values(time_index, j) + w * s.values(time_index, j + 1);
}

double stock_value(const GbmStockModel& model, const SimplexPoint& q, const FdGrid& grid,
                   const FdOptions& opts) {
    ValueSurface s = solve_vi(model, q, grid, opts);
    return model.s0 + std::max(0.0, surface_value_at(s, 0, model.x0()));
}

Vector scenario_expectations(const GbmStockModel& model, const ValueSurface& surface) {
    const FdGrid& grid = surface.grid;
    const int nx = grid.nx;
    const int nt = static_cast<int>(surface.values.rows()) - 1;
    const double dx = grid.dx();
    const double dt = grid.dt(model.horizon_T);
    const double a = 0.5 * model.sigma * model.sigma;
    const double r = model.r;
    const double T = model.horizon_T;
    const Vector mu = model.log_drifts();
    const int N = model.n_scenarios();

    Vector out(N);
    for (int i = 0; i < N; ++i) {
        const double g = mu[i];
        const double b = model.drifts[i];
        auto slope = [&](double t) {
            // hold-to-horizon asymptote of the linear problem (sign kept)
            return std::exp(grid.x_max) * (std::exp((b - r) * (T - t)) - 1.0);
        };
        const double lo_i = a / (dx * dx) - g / (2.0 * dx);
        const double di_i = -2.0 * a / (dx * dx) - r;
        const double up_i = a / (dx * dx) + g / (2.0 * dx);

        Vector u = Vector::Zero(nx);
        Vector rhs(nx);
        Tridiag m(nx);
        const double th = 0.5;
        for (int n = nt - 1; n >= 0; --n) {
            const double src = b - r;  // times e^x below
            rhs[0] = 0.0;
            for (int j = 1; j < nx - 1; ++j) {
                const double x = grid.x_min + j * dx;
                double expl = u[j] + (1.0 - th) * dt * (lo_i * u[j - 1] + di_i * u[j] + up_i * u[j + 1]);
                rhs[j] = expl + dt * std::exp(x) * src;
            }
            {
                const int j = nx - 1;
                double expl = u[j] + (1.0 - th) * dt *
                                         (2.0 * a / (dx * dx) * u[j - 1] + di_i * u[j] +
                                          (2.0 * a / dx + g) * slope((n + 1) * dt));
                rhs[j] = expl + dt * std::exp(grid.x_max) * src +
                         th * dt * (2.0 * a / dx + g) * slope(n * dt);
            }
            // implicit matrix with stopped nodes pinned to zero
            for (int j = 1; j < nx - 1; ++j) {
                if (surface.continuation_mask(n, j)) {
                    m.lower[j] = -th * dt * lo_i;
                    m.diag[j] = 1.0 - th * dt * di_i;
                    m.upper[j] = -th * dt * up_i;
                } else {
                    m.lower[j] = 0.0;
                    m.diag[j] = 1.0;
                    m.upper[j] = 0.0;
                    rhs[j] = 0.0;
                }
            }
            m.diag[0] = 1.0;
            m.upper[0] = 0.0;
            m.lower[0] = 0.0;
            {
                const int j = nx - 1;
                if (surface.continuation_mask(n, j)) {
                    m.lower[j] = -th * dt * 2.0 * a / (dx * dx);
                    m.diag[j] = 1.0 - th * dt * di_i;
                    m.upper[j] = 0.0;
                } else {
                    m.lower[j] = 0.0;
                    m.diag[j] = 1.0;
                    m.upper[j] = 0.0;
                    rhs[j] = 0.0;
                }
            }
            solve_tridiag(m, rhs);
            u = rhs;
        }
        ValueSurface tmp;
        tmp.values = u.transpose();
        tmp.grid = grid;
        out[i] = model.s0 + surface_value_at(tmp, 0, model.x0());
    }
    return out;
}

double tree_oracle_value(const GbmStockModel& model, const SimplexPoint& q, int n_steps) {
    model.validate();
    if (n_steps < 1) throw std::invalid_argument("tree_oracle_value: n_steps >= 1");
    const double T = model.horizon_T;
    const double dt = T / n_steps;
    const double dx = std::sqrt(3.0) * model.sigma * std::sqrt(dt);
    const double x0 = model.x0();
    const DriftPrior prior = drift_prior(model, q);

    // terminal layer: j in [-n, n]
    const int n = n_steps;
    Vector value(2 * n + 1);
    for (int j = -n; j <= n; ++j)
        value[j + n] = std::exp(-model.r * T) * std::exp(x0 + j * dx);

    for (int m = n - 1; m >= 0; --m) {
        const double t = m * dt;
        Vector next(2 * m + 1);
        const double a = 0.5 * model.sigma * model.sigma;
        for (int j = -m; j <= m; ++j) {
            const double x = x0 + j * dx;
            const double drift = (gamma_drift(prior, t, x) - a) * dt;
            const double var = model.sigma * model.sigma * dt + drift * drift;
            double pu = 0.5 * (var / (dx * dx) + drift / dx);
            double pd = 0.5 * (var / (dx * dx) - drift / dx);
            double pm = 1.0 - pu - pd;
            if (pu < 0.0 || pd < 0.0 || pm < 0.0)
                throw NoConvergence("tree_oracle_value: negative branch probability; refine steps");
            double cont = pu * value[j + 1 + m + 1] + pm * value[j + m + 1] + pd * value[j - 1 + m + 1];
            double stop = std::exp(-model.r * t) * std::exp(x);
            next[j + m] = std::max(stop, cont);
        }
        value = next;
    }
    return value[0];
}

}  // namespace ambistop
