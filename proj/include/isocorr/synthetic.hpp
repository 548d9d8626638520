#pragma once

// Gaussian return panels with known covariance, for Monte-Carlo checks and
// for the `synth` command.

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "isocorr/market_data.hpp"
#include "isocorr/panel.hpp"

namespace isocorr {

/// r_t = S (sqrt(rho) f_t 1 + sqrt(1 - rho) e_t), f and e i.i.d. N(0, 1).
/// Requires 0 <= rho <= 1.
ReturnsPanel isotropic_gaussian_panel(int assets, int periods, double rho,
                                      const Eigen::VectorXd& sigmas, std::uint64_t seed);
ReturnsPanel isotropic_gaussian_panel(int assets, int periods, double rho, double sigma,
                                      std::uint64_t seed);

/// r_t = B f_t + sqrt(idio_var) e_t with K unit-variance factors.
ReturnsPanel factor_gaussian_panel(const Eigen::MatrixXd& loadings, const Eigen::VectorXd& idio_var,
                                   int periods, std::uint64_t seed);

/// Asset ids "A0000", "A0001", ...
std::string synthetic_asset_id(int index);

/// Consecutive calendar dates from 2000-01-03, one per row.
std::string synthetic_date(int index);

/// Compounds returns from a starting price of 100 into a price panel with
/// one more row than the returns. Requires every return > -1.
PricePanel compound_prices(const ReturnsPanel& returns);

}  // namespace isocorr
