#include "ambistop/nelder_mead.hpp"

#include <algorithm>

namespace ambistop {

NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& fn, const Vector& x0,
                             double step, double ftol, double xtol, int max_evals) {
    const int n = static_cast<int>(x0.size());
    NelderMeadResult res;
    if (n == 0) {  // nothing to optimize
        res.x = x0;
        res.value = fn(x0);
        res.evals = 1;
        res.converged = true;
        return res;
    }

    std::vector<Vector> xs(static_cast<std::size_t>(n) + 1, x0);
    std::vector<double> fs(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i) + 1][i] += step;
    int evals = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        fs[i] = fn(xs[i]);
        ++evals;
    }

    auto order = [&] {
        std::vector<std::size_t> idx(xs.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        std::vector<Vector> xs2(xs.size());
        std::vector<double> fs2(fs.size());
        for (std::size_t i = 0; i < idx.size(); ++i) {
            xs2[i] = xs[idx[i]];
            fs2[i] = fs[idx[i]];
        }
        xs.swap(xs2);
        fs.swap(fs2);
    };

    while (evals < max_evals) {
        order();
        double spread_f = std::abs(fs.back() - fs.front());
        double spread_x = 0.0;
        for (std::size_t i = 1; i < xs.size(); ++i)
            spread_x = std::max(spread_x, (xs[i] - xs[0]).cwiseAbs().maxCoeff());
        if (spread_f < ftol || spread_x < xtol) {
            res.converged = true;
            break;
        }

        Vector centroid = Vector::Zero(n);
        for (std::size_t i = 0; i + 1 < xs.size(); ++i) centroid += xs[i];
        centroid /= static_cast<double>(n);

        const Vector& worst = xs.back();
        Vector xr = centroid + (centroid - worst);  // reflection
        double fr = fn(xr);
        ++evals;
        if (fr < fs[0]) {
            Vector xe = centroid + 2.0 * (centroid - worst);  // expansion
            double fe = fn(xe);
            ++evals;
            if (fe < fr) {
                xs.back() = xe;
                fs.back() = fe;
            } else {
                xs.back() = xr;
                fs.back() = fr;
            }
        } else if (fr < fs[fs.size() - 2]) {
            xs.back() = xr;
            fs.back() = fr;
        } else {
            Vector xc = centroid + 0.5 * ((fr < fs.back() ? xr : worst) - centroid);
            double fc = fn(xc);
            ++evals;
            if (fc < std::min(fr, fs.back())) {
                xs.back() = xc;
                fs.back() = fc;
            } else {  // shrink toward the best vertex
                for (std::size_t i = 1; i < xs.size(); ++i) {
                    xs[i] = xs[0] + 0.5 * (xs[i] - xs[0]);
                    fs[i] = fn(xs[i]);
                    ++evals;
                }
            }
        }
    }
    order();
    res.x = xs[0];
    res.value = fs[0];
    res.evals = evals;
    return res;
}

}  // namespace ambistop
