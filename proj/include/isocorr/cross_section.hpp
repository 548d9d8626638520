#pragma once

// Equal-weight portfolio variance, effective degrees of freedom N* and the
// isotropic / linear-factor predictions for it.

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "isocorr/iso_algebra.hpp"

namespace isocorr {

/// Portfolio variance below this is treated as a perfect hedge.
inline constexpr double kDegenerateVariance = 1e-15;

/// Read-only view of a covariance matrix through the three capabilities the
/// N* machinery needs. Isotropic, factor and dense covariances share it.
class CovarianceAccessor {
public:
    virtual ~CovarianceAccessor() = default;

    virtual int n() const = 0;
    virtual double trace() const = 0;
    /// 1' Sigma 1.
    virtual double grand_sum() const = 0;
    virtual Eigen::VectorXd matvec(const Eigen::VectorXd& x) const = 0;
};

/// Sigma = S_N G_N S_N with per-asset volatilities on the diagonal of S_N.
class IsotropicModel : public CovarianceAccessor {
public:
    IsotropicModel(double rho, Eigen::VectorXd sigmas);
    /// Homoskedastic model with a common volatility.
    IsotropicModel(int n, double rho, double sigma);

    int n() const override { return corr_.n(); }
    double rho() const { return corr_.rho(); }
    const Eigen::VectorXd& sigmas() const { return sigmas_; }
    const EquiCorrMatrix& correlation() const { return corr_; }
    bool homoskedastic() const;

    double trace() const override;
    double grand_sum() const override;
    Eigen::VectorXd matvec(const Eigen::VectorXd& x) const override;

    Eigen::MatrixXd to_dense() const;

private:
    EquiCorrMatrix corr_;
    Eigen::VectorXd sigmas_;
};

/// Sigma = B B' + diag(idio_var) with unit-variance factors.
class FactorModel : public CovarianceAccessor {
public:
    /// loadings is N x K (K may be zero); idio_var has N strictly positive entries.
    FactorModel(Eigen::MatrixXd loadings, Eigen::VectorXd idio_var);

    int n() const override { return static_cast<int>(loadings_.rows()); }
    int k() const { return static_cast<int>(loadings_.cols()); }
    const Eigen::MatrixXd& loadings() const { return loadings_; }
    const Eigen::VectorXd& idio_var() const { return idio_var_; }

    double trace() const override;
    double grand_sum() const override;
    Eigen::VectorXd matvec(const Eigen::VectorXd& x) const override;

    /// tr(B B') / N^2, the loadings term of V_I.
    double trace_term() const;
    /// Column means of B (the mean loadings vector).
    Eigen::VectorXd mean_loadings() const;
    double mean_idio_var() const;

    /// Dense covariance; verifies positive definiteness (Cholesky) on the way.
    Eigen::MatrixXd to_dense() const;

private:
    Eigen::MatrixXd loadings_;
    Eigen::VectorXd idio_var_;
};

/// Wraps an explicit symmetric matrix (sample covariances, test oracles).
class DenseCovariance : public CovarianceAccessor {
public:
    explicit DenseCovariance(Eigen::MatrixXd sigma);

    int n() const override { return static_cast<int>(sigma_.rows()); }
    double trace() const override { return sigma_.trace(); }
    double grand_sum() const override { return sigma_.sum(); }
    Eigen::VectorXd matvec(const Eigen::VectorXd& x) const override;

    const Eigen::MatrixXd& matrix() const { return sigma_; }

private:
    Eigen::MatrixXd sigma_;
};

struct VarianceDecomposition {
    double v_p = 0.0;     // portfolio variance gs/N^2
    double v_i = 0.0;     // independent part tr/N^2
    double v_c = 0.0;     // covariance part (gs - tr)/N^2
    double n_star = 0.0;  // N v_i / v_p
};

/// Decomposes the variance of the equal-weight portfolio 1_N/N.
/// Throws DegenerateVariance when v_p < kDegenerateVariance.
VarianceDecomposition equal_weight_variance(const CovarianceAccessor& sigma);

/// N / (1 + (N-1) rho) for each N. rho must be feasible for the largest N.
std::vector<double> iso_nstar_curve(double rho, const std::vector<int>& n_values);

/// Inverts N* = N / (1 + (N-1) rho) for rho. Requires n >= 2 and
/// 0 < n_star <= n.
double rho_hat_from_nstar(int n, double n_star);

/// N* of a factor model from its loadings means:
///   N* = N (b2 N + s2) / (bb N + s2)
/// with b2 = tr(BB')/N^2, bb = |mean loadings|^2, s2 = mean idio variance.
double factor_nstar(const FactorModel& fm);

struct LoadingsMeanInequality {
    double lhs = 0.0;   // mean of squared elements of B
    double rhs = 0.0;   // |column means|^2 / K
    double gap = 0.0;   // mean squared deviation from column means, lhs - rhs
    bool holds = true;
};

/// Mean-square versus squared-mean relation of the loadings. Requires K >= 1.
LoadingsMeanInequality loadings_mean_inequality(const FactorModel& fm);

struct RiskPartition {
    double v_s = 0.0;    // common-eigenvector (systematic) variance
    double v_r = 0.0;    // degenerate-eigenspace (residual) variance
    std::optional<double> ratio;             // v_r / v_s, absent when v_s == 0
    std::optional<double> asymptotic_ratio;  // (1 - rho)/rho, absent for rho <= 0
};

/// Systematic/residual split of the homoskedastic equal-weight portfolio.
RiskPartition risk_partition(double sigma, double rho, int n);

}  // namespace isocorr
