#pragma once

#include "ambistop/common.hpp"

namespace ambistop {

// Black-Scholes stock with scenario-dependent drift (ambiguous expected
// return). Log-price drift per scenario is mu_i = b_i - sigma^2/2.
struct GbmStockModel {
    double s0 = 1.0;       // initial price
    double sigma = 0.3;    // volatility, per sqrt(year)
    double r = 0.02;       // discount rate, per year
    double horizon_T = 5;  // years
    Vector drifts;         // b_i, per year, one per scenario

    GbmStockModel() = default;
    GbmStockModel(double s0_, double sigma_, double r_, double T_, Vector b)
        : s0(s0_), sigma(sigma_), r(r_), horizon_T(T_), drifts(std::move(b)) {
        validate();
    }

    void validate() const {
        if (!(sigma > 0.0)) throw std::invalid_argument("GbmStockModel: sigma > 0 required");
        if (!(horizon_T > 0.0)) throw std::invalid_argument("GbmStockModel: horizon > 0 required");
        if (!(s0 > 0.0)) throw std::invalid_argument("GbmStockModel: s0 > 0 required");
        if (drifts.size() < 1) throw std::invalid_argument("GbmStockModel: need >= 1 scenario");
    }

    int n_scenarios() const { return static_cast<int>(drifts.size()); }
    double x0() const { return std::log(s0); }
    Vector log_drifts() const { return drifts.array() - 0.5 * sigma * sigma; }
};

// Paper configuration of the stock example: T = 5, r = 2%,
// b = (-5%, 5%, 15%), uniform prior over three scenarios.
inline GbmStockModel paper_stock_model(double sigma) {
    Vector b(3);
    b << -0.05, 0.05, 0.15;
    return GbmStockModel(1.0, sigma, 0.02, 5.0, std::move(b));
}

}  // namespace ambistop
