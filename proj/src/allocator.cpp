#include "isocorr/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isocorr/error.hpp"

namespace isocorr {

namespace {

constexpr double kSeriesThreshold = 1e-8;

void check_alpha(const char* where, const IsotropicModel& model, const AlphaVector& alpha) {
    if (alpha.size() != model.n()) {
        throw DimensionMismatch(std::string(where) + ": alpha has " + std::to_string(alpha.size()) +
                                " entries, model has " + std::to_string(model.n()) + " assets");
    }
}

void check_nonsingular(const char* where, const IsotropicModel& model) {
    if (model.correlation().is_singular()) {
        throw SingularMatrix(std::string(where) + ": covariance is singular at rho=" +
                             std::to_string(model.rho()) + " (roots of f_N are 1 and 1/(1-N))");
    }
}

double check_omega_argument(double z_sq, int n) {
    if (n < 1) {
        throw ValidationError("laplace_omega: n must be >= 1");
    }
    if (!(z_sq >= 0.0)) {
        throw ValidationError("laplace_omega: z_sq must be >= 0");
    }
    return z_sq / (n + 1.0);
}

}  // namespace

AlphaVector::AlphaVector(Eigen::VectorXd alphas, const Eigen::VectorXd& sigmas)
    : alphas_(std::move(alphas)) {
    if (alphas_.size() != sigmas.size()) {
        throw DimensionMismatch("AlphaVector: " + std::to_string(alphas_.size()) + " alphas but " +
                                std::to_string(sigmas.size()) + " volatilities");
    }
    if (!alphas_.allFinite()) {
        throw ValidationError("AlphaVector: alphas must be finite");
    }
    z_scores_ = alphas_.cwiseQuotient(sigmas);
}

double centering_factor(double rho, int n) {
    const EquiCorrMatrix g(n, rho);
    const double denom = g.common_eigenvalue();
    if (denom == 0.0) {
        throw SingularMatrix("centering_factor: 1 + (N-1) rho vanishes");
    }
    return g.rho() * n / denom;
}

AllocationResult mvo_isotropic(const IsotropicModel& model, const AlphaVector& alpha, double lambda) {
    check_alpha("mvo_isotropic", model, alpha);
    check_nonsingular("mvo_isotropic", model);
    if (!(lambda > 0.0)) {
        throw ValidationError("mvo_isotropic: lambda must be positive");
    }
    const int n = model.n();
    const double rho = model.rho();
    const Eigen::VectorXd& z = alpha.z_scores();
    const double c = centering_factor(rho, n);

    AllocationResult out;
    out.lambda = lambda;
    out.centering = c;
    // N rho zbar / (1 + (N-1) rho) = c * zbar.
    const Eigen::VectorXd centred = z.array() - c * z.mean();
    out.weights = centred.cwiseQuotient(model.sigmas()) / (2.0 * lambda * (1.0 - rho));
    out.z_sq = mahalanobis_z_sq(model, alpha);
    out.omega = 1.0;
    return out;
}

double mahalanobis_z_sq(const IsotropicModel& model, const AlphaVector& alpha) {
    check_alpha("mahalanobis_z_sq", model, alpha);
    check_nonsingular("mahalanobis_z_sq", model);
    const int n = model.n();
    const double rho = model.rho();
    const Eigen::VectorXd& z = alpha.z_scores();
    const double mean_sq = z.squaredNorm() / n;
    const double mean = z.mean();
    const double z_sq = n / (1.0 - rho) * (mean_sq - centering_factor(rho, n) * mean * mean);
    return std::max(0.0, z_sq);
}

double laplace_omega_series(double z_sq, int n) {
    const double x = check_omega_argument(z_sq, n);
    return 2.0 + x * (-2.0 + x * (4.0 + x * (-10.0 + x * 28.0)));
}

double laplace_omega_closed_form(double z_sq, int n) {
    const double x = check_omega_argument(z_sq, n);
    // (sqrt(1+4x) - 1)/x rationalized; no cancellation near x = 0.
    return 4.0 / (1.0 + std::sqrt(1.0 + 4.0 * x));
}

double laplace_omega(double z_sq, int n) {
    const double x = check_omega_argument(z_sq, n);
    if (x < kSeriesThreshold) {
        return laplace_omega_series(z_sq, n);
    }
    return laplace_omega_closed_form(z_sq, n);
}

AllocationResult scaled_allocation(const IsotropicModel& model, const AlphaVector& alpha,
                                   double lambda, const ScalingFunction& omega) {
    AllocationResult out = mvo_isotropic(model, alpha, lambda);
    out.omega = omega(out.z_sq, model.n());
    if (!(out.omega >= 0.0) || !std::isfinite(out.omega)) {
        throw NumericalError("scaled_allocation: scaling function returned " +
                             std::to_string(out.omega));
    }
    out.weights *= out.omega;
    return out;
}

AllocationResult laplace_allocation(const IsotropicModel& model, const AlphaVector& alpha,
                                    double lambda) {
    return scaled_allocation(model, alpha, lambda, laplace_omega);
}

}  // namespace isocorr
