#pragma once

#include "ambistop/common.hpp"

namespace ambistop {

struct NelderMeadResult {
    Vector x;
    double value = 0.0;
    int evals = 0;
    bool converged = false;
};

// Downhill simplex minimization with standard reflection/expansion/
// contraction coefficients and deterministic tie handling. Stops when the
// simplex value spread falls below ftol or the vertex spread below xtol.
NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& fn, const Vector& x0,
                             double step, double ftol, double xtol, int max_evals);

}  // namespace ambistop
