#pragma once

// Closed-form portfolio selection under isotropic covariance.
//
// Mean-variance:  h = Sigma^-1 alpha / (2 lambda)
//                   = S^-1 [z - N rho zbar 1 / (1 + (N-1) rho)] / (2 lambda (1 - rho))
// with z = S^-1 alpha. Elliptical returns rescale h by a scalar Omega(Z) of
// the Mahalanobis length Z^2 = alpha' Sigma^-1 alpha; the multivariate
// Laplace case has a closed form.

#include <functional>

#include <Eigen/Dense>

#include "isocorr/cross_section.hpp"

namespace isocorr {

/// Expected per-period returns together with their volatility-scaled z-scores.
class AlphaVector {
public:
    AlphaVector(Eigen::VectorXd alphas, const Eigen::VectorXd& sigmas);
    AlphaVector(Eigen::VectorXd alphas, const IsotropicModel& model)
        : AlphaVector(std::move(alphas), model.sigmas()) {}

    const Eigen::VectorXd& alphas() const { return alphas_; }
    const Eigen::VectorXd& z_scores() const { return z_scores_; }
    int size() const { return static_cast<int>(alphas_.size()); }

private:
    Eigen::VectorXd alphas_;
    Eigen::VectorXd z_scores_;
};

struct AllocationResult {
    Eigen::VectorXd weights;
    double lambda = 0.0;
    double z_sq = 0.0;          // alpha' Sigma^-1 alpha
    double omega = 1.0;         // utility scaling applied to the MVO weights
    double centering = 0.0;     // rho N / (1 + (N-1) rho)
};

/// Scalar rescaling of the mean-variance weights as a function of (Z^2, N).
using ScalingFunction = std::function<double(double z_sq, int n)>;

/// rho N / (1 + (N-1) rho): how much of the mean z-score is subtracted.
double centering_factor(double rho, int n);

/// Throws SingularMatrix, DimensionMismatch, or ValidationError (lambda <= 0).
AllocationResult mvo_isotropic(const IsotropicModel& model, const AlphaVector& alpha, double lambda);

/// Z^2 = N/(1-rho) [mean(z^2) - rho N/(1+(N-1)rho) mean(z)^2].
double mahalanobis_z_sq(const IsotropicModel& model, const AlphaVector& alpha);

/// Omega(Z) = (sqrt(1 + 4x) - 1) / x with x = Z^2/(N+1), evaluated as
/// 4 / (1 + sqrt(1 + 4x)). Below x = 1e-8 a Taylor series is used; the
/// limit at the origin is 2.
double laplace_omega(double z_sq, int n);

/// Series branch of laplace_omega, 2 - 2x + 4x^2 - 10x^3 + 28x^4.
double laplace_omega_series(double z_sq, int n);

/// Closed-form branch of laplace_omega, valid for every x >= 0 except 0.
double laplace_omega_closed_form(double z_sq, int n);

/// Mean-variance weights multiplied by omega(Z^2, N).
AllocationResult scaled_allocation(const IsotropicModel& model, const AlphaVector& alpha,
                                   double lambda, const ScalingFunction& omega);

AllocationResult laplace_allocation(const IsotropicModel& model, const AlphaVector& alpha,
                                    double lambda);

}  // namespace isocorr
