#include "isocorr/synthetic.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "isocorr/error.hpp"
#include "isocorr/random.hpp"

namespace isocorr {

namespace {

ReturnsPanel labelled(Eigen::MatrixXd returns) {
    ReturnsPanel panel;
    panel.asset_ids.reserve(static_cast<std::size_t>(returns.cols()));
    for (Eigen::Index j = 0; j < returns.cols(); ++j) {
        panel.asset_ids.push_back(synthetic_asset_id(static_cast<int>(j)));
    }
    panel.period_stamps.reserve(static_cast<std::size_t>(returns.rows()));
    for (Eigen::Index t = 0; t < returns.rows(); ++t) {
        // Row 0 of the prices is date 0, so returns start at date 1.
        panel.period_stamps.push_back(synthetic_date(static_cast<int>(t) + 1));
    }
    panel.returns = std::move(returns);
    return panel;
}

}  // namespace

std::string synthetic_asset_id(int index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "A%04d", index);
    return buf;
}

std::string synthetic_date(int index) {
    using namespace std::chrono;
    const sys_days start = year{2000} / January / 3;
    const year_month_day ymd{start + days{index}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

ReturnsPanel isotropic_gaussian_panel(int assets, int periods, double rho,
                                      const Eigen::VectorXd& sigmas, std::uint64_t seed) {
    if (assets < 1 || periods < 2) {
        throw ValidationError("isotropic_gaussian_panel: need assets >= 1 and periods >= 2");
    }
    if (!(rho >= 0.0 && rho <= 1.0)) {
        throw ValidationError("isotropic_gaussian_panel: rho must lie in [0, 1]");
    }
    if (sigmas.size() != assets) {
        throw DimensionMismatch("isotropic_gaussian_panel: sigmas size differs from assets");
    }
    Rng rng(seed);
    const double common = std::sqrt(rho);
    const double own = std::sqrt(1.0 - rho);
    Eigen::MatrixXd r(periods, assets);
    for (int t = 0; t < periods; ++t) {
        const double f = rng.normal();
        for (int j = 0; j < assets; ++j) {
            r(t, j) = sigmas(j) * (common * f + own * rng.normal());
        }
    }
    return labelled(std::move(r));
}

ReturnsPanel isotropic_gaussian_panel(int assets, int periods, double rho, double sigma,
                                      std::uint64_t seed) {
    return isotropic_gaussian_panel(assets, periods, rho,
                                    Eigen::VectorXd::Constant(std::max(assets, 0), sigma), seed);
}

ReturnsPanel factor_gaussian_panel(const Eigen::MatrixXd& loadings, const Eigen::VectorXd& idio_var,
                                   int periods, std::uint64_t seed) {
    if (periods < 2 || loadings.rows() < 1) {
        throw ValidationError("factor_gaussian_panel: need periods >= 2 and at least one asset");
    }
    if (idio_var.size() != loadings.rows()) {
        throw DimensionMismatch("factor_gaussian_panel: idio_var size differs from loadings rows");
    }
    const Eigen::Index n = loadings.rows();
    const Eigen::Index k = loadings.cols();
    const Eigen::VectorXd idio_sd = idio_var.cwiseSqrt();
    Rng rng(seed);
    Eigen::MatrixXd r(periods, n);
    Eigen::VectorXd f(k);
    for (int t = 0; t < periods; ++t) {
        for (Eigen::Index i = 0; i < k; ++i) {
            f(i) = rng.normal();
        }
        const Eigen::VectorXd common = loadings * f;
        for (Eigen::Index j = 0; j < n; ++j) {
            r(t, j) = common(j) + idio_sd(j) * rng.normal();
        }
    }
    return labelled(std::move(r));
}

PricePanel compound_prices(const ReturnsPanel& returns) {
    returns.validate();
    if (!(returns.returns.array() > -1.0).all()) {
        throw ValidationError("compound_prices: every return must exceed -1");
    }
    const Eigen::Index t = returns.returns.rows();
    PricePanel p;
    p.adjusted_close.resize(t + 1, returns.returns.cols());
    p.adjusted_close.row(0).setConstant(100.0);
    for (Eigen::Index i = 0; i < t; ++i) {
        p.adjusted_close.row(i + 1) =
            p.adjusted_close.row(i).cwiseProduct((1.0 + returns.returns.row(i).array()).matrix());
    }
    p.asset_ids = returns.asset_ids;
    p.dates.push_back(synthetic_date(0));
    p.dates.insert(p.dates.end(), returns.period_stamps.begin(), returns.period_stamps.end());
    return p;
}

}  // namespace isocorr
