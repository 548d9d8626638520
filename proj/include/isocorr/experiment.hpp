#pragma once

// The randomized N*(N) experiment: random equal-weight sub-portfolios of a
// returns panel, a straight-line fit over the large-N region, and the
// isotropic versus linear-factor reading of the result.

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "isocorr/panel.hpp"

namespace isocorr {

struct DofTrial {
    int trial = 0;
    int n = 0;
    std::vector<int> members;  // column indices into the panel
    double v_i = 0.0;
    double v_p = 0.0;
    double n_star = 0.0;       // NaN when degenerate
    bool degenerate = false;   // v_p < kDegenerateVariance; excluded from fits
};

/// Unbiased (n - 1 denominator) two-pass sample variance.
double sample_variance(std::span<const double> x);

/// Equal-weight portfolio statistics for a fixed set of panel columns.
/// column_variances holds sample_variance of every panel column.
DofTrial evaluate_portfolio(const ReturnsPanel& panel, std::span<const double> column_variances,
                            std::vector<int> members);

std::vector<double> column_variances(const ReturnsPanel& panel);

/// One trial per index: N ~ Uniform{1..N_max}, then N distinct assets drawn
/// uniformly without replacement. Each trial has its own seeded stream, so
/// results do not depend on evaluation order.
std::vector<DofTrial> run_dof_experiment(const ReturnsPanel& panel, int trials, std::uint64_t seed);

/// The single portfolio holding every asset in the panel.
DofTrial full_universe_trial(const ReturnsPanel& panel);

struct OlsFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double intercept_se = 0.0;
    double r_squared = 0.0;
    double f_statistic = 0.0;  // on (1, n_points - 2) degrees of freedom
    double t_slope = 0.0;
    double t_intercept = 0.0;
    int n_points = 0;
    std::pair<int, int> fit_range{0, 0};
};

/// Ordinary least squares of n_star on n over non-degenerate trials with
/// n in [n_min, n_max]. Throws InsufficientData for fewer than 3 points and
/// NumericalError when every selected n is equal.
OlsFit fit_large_n(std::span<const DofTrial> trials, int n_min, int n_max);

/// Default fit window [ceil(0.6 N_max), N_max].
std::pair<int, int> default_fit_window(int n_max);

struct ModelCurves {
    std::vector<double> iso;     // N / (1 + (N-1) rho_hat)
    std::vector<double> factor;  // N / K_hat
};

ModelCurves model_curves(double rho_hat, double k_hat, const std::vector<int>& n_grid);

struct ModelVerdict {
    double terminal_nstar = 0.0;
    std::optional<double> rho_hat_terminal;   // from the full-universe N*
    std::optional<double> rho_hat_intercept;  // 1 / intercept, read as the N -> inf limit 1/rho
    double k_hat_asymptote = 0.0;             // N_max / terminal N*
    double k_hat_slope = 0.0;                 // 1 / slope, may be non-finite
    bool slope_significant = false;           // t_slope >= 2
    /// Isotropic reading holds when the large-N slope is not significant.
    bool favours_isotropic() const { return !slope_significant; }
};

ModelVerdict verdict(const DofTrial& terminal, const OlsFit& fit, int n_max);

}  // namespace isocorr
