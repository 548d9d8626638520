#include "isocorr/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "isocorr/cross_section.hpp"
#include "isocorr/error.hpp"
#include "isocorr/parallel.hpp"
#include "isocorr/random.hpp"

namespace isocorr {

double sample_variance(std::span<const double> x) {
    if (x.size() < 2) {
        throw InsufficientData("sample_variance: need at least 2 observations, got " +
                               std::to_string(x.size()));
    }
    double mean = 0.0;
    for (double v : x) {
        mean += v;
    }
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) {
        ss += (v - mean) * (v - mean);
    }
    return ss / static_cast<double>(x.size() - 1);
}

std::vector<double> column_variances(const ReturnsPanel& panel) {
    const auto t = static_cast<std::size_t>(panel.periods());
    std::vector<double> out(static_cast<std::size_t>(panel.assets()));
    for (int j = 0; j < panel.assets(); ++j) {
        out[static_cast<std::size_t>(j)] = sample_variance({panel.returns.col(j).data(), t});
    }
    return out;
}

DofTrial evaluate_portfolio(const ReturnsPanel& panel, std::span<const double> column_variances,
                            std::vector<int> members) {
    const int n = static_cast<int>(members.size());
    if (n < 1) {
        throw ValidationError("evaluate_portfolio: empty portfolio");
    }
    Eigen::VectorXd portfolio = Eigen::VectorXd::Zero(panel.periods());
    double var_sum = 0.0;
    for (int j : members) {
        portfolio += panel.returns.col(j);
        var_sum += column_variances[static_cast<std::size_t>(j)];
    }
    portfolio /= static_cast<double>(n);

    DofTrial trial;
    trial.n = n;
    trial.members = std::move(members);
    trial.v_i = var_sum / (static_cast<double>(n) * n);
    trial.v_p = sample_variance({portfolio.data(), static_cast<std::size_t>(portfolio.size())});
    trial.degenerate = !(trial.v_p >= kDegenerateVariance);
    trial.n_star = trial.degenerate ? std::numeric_limits<double>::quiet_NaN()
                                    : n * trial.v_i / trial.v_p;
    return trial;
}

std::vector<DofTrial> run_dof_experiment(const ReturnsPanel& panel, int trials, std::uint64_t seed) {
    panel.validate();
    const int n_max = panel.assets();
    if (n_max < 1) {
        throw InsufficientData("run_dof_experiment: panel has no assets");
    }
    if (panel.periods() < 2) {
        throw InsufficientData("run_dof_experiment: need at least 2 periods");
    }
    if (trials < 1) {
        throw ValidationError("run_dof_experiment: trials must be >= 1");
    }
    const std::vector<double> variances = column_variances(panel);

    std::vector<DofTrial> out(static_cast<std::size_t>(trials));
    parallel_for(out.size(), [&](std::size_t i) {
        Rng rng(derive_seed(seed, i));
        const std::size_t n = 1 + rng.index(static_cast<std::size_t>(n_max));
        const auto picked = rng.sample_without_replacement(static_cast<std::size_t>(n_max), n);
        std::vector<int> members(picked.begin(), picked.end());
        out[i] = evaluate_portfolio(panel, variances, std::move(members));
        out[i].trial = static_cast<int>(i);
    });
    return out;
}

DofTrial full_universe_trial(const ReturnsPanel& panel) {
    panel.validate();
    std::vector<int> members(static_cast<std::size_t>(panel.assets()));
    for (int j = 0; j < panel.assets(); ++j) {
        members[static_cast<std::size_t>(j)] = j;
    }
    return evaluate_portfolio(panel, column_variances(panel), std::move(members));
}

std::pair<int, int> default_fit_window(int n_max) {
    return {static_cast<int>(std::ceil(0.6 * n_max)), n_max};
}

OlsFit fit_large_n(std::span<const DofTrial> trials, int n_min, int n_max) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& t : trials) {
        if (!t.degenerate && t.n >= n_min && t.n <= n_max) {
            xs.push_back(t.n);
            ys.push_back(t.n_star);
        }
    }
    const std::size_t m = xs.size();
    if (m < 3) {
        throw InsufficientData("fit_large_n: need at least 3 usable trials in [" +
                               std::to_string(n_min) + ", " + std::to_string(n_max) + "], got " +
                               std::to_string(m));
    }

    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(m);
    my /= static_cast<double>(m);

    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx <= 0.0) {
        throw NumericalError("fit_large_n: every selected trial has the same N");
    }

    OlsFit fit;
    fit.n_points = static_cast<int>(m);
    fit.fit_range = {n_min, n_max};
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;

    double sse = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
        sse += e * e;
    }
    const double dof = static_cast<double>(m) - 2.0;
    const double s2 = sse / dof;
    fit.slope_se = std::sqrt(s2 / sxx);
    fit.intercept_se = std::sqrt(s2 * (1.0 / static_cast<double>(m) + mx * mx / sxx));
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
    const double ssr = syy - sse;
    fit.f_statistic = s2 > 0.0 ? ssr / s2 : std::numeric_limits<double>::infinity();
    auto t_score = [](double coef, double se) {
        if (se > 0.0) {
            return coef / se;
        }
        return coef == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), coef);
    };
    fit.t_slope = t_score(fit.slope, fit.slope_se);
    fit.t_intercept = t_score(fit.intercept, fit.intercept_se);
    return fit;
}

ModelCurves model_curves(double rho_hat, double k_hat, const std::vector<int>& n_grid) {
    if (!(k_hat >= 1.0)) {
        throw ValidationError("model_curves: k_hat must be >= 1");
    }
    ModelCurves curves;
    curves.iso = iso_nstar_curve(rho_hat, n_grid);
    curves.factor.reserve(n_grid.size());
    for (int n : n_grid) {
        curves.factor.push_back(n / k_hat);
    }
    return curves;
}

ModelVerdict verdict(const DofTrial& terminal, const OlsFit& fit, int n_max) {
    if (terminal.degenerate || !(terminal.n_star > 0.0)) {
        throw DegenerateVariance("verdict: terminal portfolio is degenerate");
    }
    ModelVerdict v;
    v.terminal_nstar = terminal.n_star;
    if (n_max >= 2 && terminal.n_star <= n_max) {
        v.rho_hat_terminal = rho_hat_from_nstar(n_max, terminal.n_star);
    }
    if (fit.intercept > 0.0) {
        v.rho_hat_intercept = 1.0 / fit.intercept;
    }
    v.k_hat_asymptote = n_max / terminal.n_star;
    v.k_hat_slope = fit.slope != 0.0 ? 1.0 / fit.slope : std::numeric_limits<double>::infinity();
    v.slope_significant = fit.t_slope >= 2.0;
    return v;
}

}  // namespace isocorr
