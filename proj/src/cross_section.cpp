#include "isocorr/cross_section.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isocorr/error.hpp"

namespace isocorr {

namespace {

void require_size(const char* where, Eigen::Index expected, Eigen::Index got) {
    if (expected != got) {
        throw DimensionMismatch(std::string(where) + ": expected " + std::to_string(expected) +
                                " entries, got " + std::to_string(got));
    }
}

}  // namespace

// --- IsotropicModel -------------------------------------------------------

IsotropicModel::IsotropicModel(double rho, Eigen::VectorXd sigmas)
    : corr_(static_cast<int>(sigmas.size()), rho), sigmas_(std::move(sigmas)) {
    for (Eigen::Index i = 0; i < sigmas_.size(); ++i) {
        if (!(sigmas_(i) > 0.0) || !std::isfinite(sigmas_(i))) {
            throw ValidationError("IsotropicModel: sigma[" + std::to_string(i) +
                                  "] must be positive and finite");
        }
    }
}

IsotropicModel::IsotropicModel(int n, double rho, double sigma)
    : IsotropicModel(rho, Eigen::VectorXd::Constant(std::max(n, 0), sigma)) {}

bool IsotropicModel::homoskedastic() const {
    return (sigmas_.array() == sigmas_(0)).all();
}

double IsotropicModel::trace() const { return sigmas_.squaredNorm(); }

double IsotropicModel::grand_sum() const {
    // (1 - rho) sum sigma^2 + rho (sum sigma)^2, i.e. tr + rho[(sum s)^2 - sum s^2].
    const double sum = sigmas_.sum();
    const double sum_sq = sigmas_.squaredNorm();
    return sum_sq + rho() * (sum * sum - sum_sq);
}

Eigen::VectorXd IsotropicModel::matvec(const Eigen::VectorXd& x) const {
    require_size("IsotropicModel::matvec", n(), x.size());
    const Eigen::VectorXd scaled = sigmas_.cwiseProduct(x);
    return sigmas_.cwiseProduct(isocorr::matvec(corr_, scaled));
}

Eigen::MatrixXd IsotropicModel::to_dense() const {
    return sigmas_.asDiagonal() * corr_.to_dense() * sigmas_.asDiagonal();
}

// --- FactorModel ----------------------------------------------------------

FactorModel::FactorModel(Eigen::MatrixXd loadings, Eigen::VectorXd idio_var)
    : loadings_(std::move(loadings)), idio_var_(std::move(idio_var)) {
    if (loadings_.rows() < 1) {
        throw ValidationError("FactorModel: need at least one asset");
    }
    if (loadings_.cols() > loadings_.rows()) {
        throw ValidationError("FactorModel: K=" + std::to_string(loadings_.cols()) +
                              " exceeds N=" + std::to_string(loadings_.rows()));
    }
    require_size("FactorModel idio_var", loadings_.rows(), idio_var_.size());
    if (!(idio_var_.array() > 0.0).all() || !idio_var_.allFinite() || !loadings_.allFinite()) {
        throw ValidationError("FactorModel: idiosyncratic variances must be positive and all entries finite");
    }
}

double FactorModel::trace() const { return loadings_.squaredNorm() + idio_var_.sum(); }

double FactorModel::grand_sum() const {
    // 1'BB'1 = |B'1|^2.
    return loadings_.colwise().sum().squaredNorm() + idio_var_.sum();
}

Eigen::VectorXd FactorModel::matvec(const Eigen::VectorXd& x) const {
    require_size("FactorModel::matvec", n(), x.size());
    return loadings_ * (loadings_.transpose() * x) + idio_var_.cwiseProduct(x);
}

double FactorModel::trace_term() const {
    const double nn = static_cast<double>(n());
    return loadings_.squaredNorm() / (nn * nn);
}

Eigen::VectorXd FactorModel::mean_loadings() const {
    if (k() == 0) {
        return Eigen::VectorXd();
    }
    return loadings_.colwise().mean().transpose();
}

double FactorModel::mean_idio_var() const { return idio_var_.mean(); }

Eigen::MatrixXd FactorModel::to_dense() const {
    Eigen::MatrixXd sigma = loadings_ * loadings_.transpose();
    sigma.diagonal() += idio_var_;
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("FactorModel: implied covariance is not positive definite");
    }
    return sigma;
}

// --- DenseCovariance ------------------------------------------------------

DenseCovariance::DenseCovariance(Eigen::MatrixXd sigma) : sigma_(std::move(sigma)) {
    if (sigma_.rows() != sigma_.cols() || sigma_.rows() < 1) {
        throw DimensionMismatch("DenseCovariance: matrix must be square and non-empty");
    }
}

Eigen::VectorXd DenseCovariance::matvec(const Eigen::VectorXd& x) const {
    require_size("DenseCovariance::matvec", n(), x.size());
    return sigma_ * x;
}

// --- operations -----------------------------------------------------------

VarianceDecomposition equal_weight_variance(const CovarianceAccessor& sigma) {
    const int n = sigma.n();
    if (n < 1) {
        throw ValidationError("equal_weight_variance: empty covariance");
    }
    const double nn = static_cast<double>(n) * n;
    const double tr = sigma.trace();
    const double gs = sigma.grand_sum();

    VarianceDecomposition d;
    d.v_i = tr / nn;
    d.v_c = (gs - tr) / nn;
    d.v_p = gs / nn;
    if (!(d.v_p >= kDegenerateVariance)) {
        throw DegenerateVariance("equal_weight_variance: portfolio variance " +
                                 std::to_string(d.v_p) + " is degenerate");
    }
    d.n_star = n * d.v_i / d.v_p;
    return d;
}

std::vector<double> iso_nstar_curve(double rho, const std::vector<int>& n_values) {
    if (n_values.empty()) {
        return {};
    }
    const int n_max = *std::max_element(n_values.begin(), n_values.end());
    if (*std::min_element(n_values.begin(), n_values.end()) < 1) {
        throw ValidationError("iso_nstar_curve: every N must be >= 1");
    }
    // Constructing the matrix validates feasibility for the largest N.
    const EquiCorrMatrix largest(n_max, rho);
    if (n_max > 1 && largest.common_eigenvalue() < kDegenerateVariance) {
        throw DegenerateVariance("iso_nstar_curve: 1 + (N-1) rho vanishes at N=" +
                                 std::to_string(n_max));
    }

    std::vector<double> out;
    out.reserve(n_values.size());
    for (int n : n_values) {
        out.push_back(n / (1.0 + (n - 1) * rho));
    }
    return out;
}

double rho_hat_from_nstar(int n, double n_star) {
    if (n < 2) {
        throw ValidationError("rho_hat_from_nstar: need n >= 2, got " + std::to_string(n));
    }
    if (!(n_star > 0.0) || n_star > n) {
        throw ValidationError("rho_hat_from_nstar: n_star=" + std::to_string(n_star) +
                              " outside (0, " + std::to_string(n) + "]");
    }
    return (n - n_star) / ((n - 1) * n_star);
}

double factor_nstar(const FactorModel& fm) {
    const double n = fm.n();
    const double b2 = fm.trace_term();
    const double bb = fm.k() == 0 ? 0.0 : fm.mean_loadings().squaredNorm();
    const double s2 = fm.mean_idio_var();
    return n * (b2 * n + s2) / (bb * n + s2);
}

LoadingsMeanInequality loadings_mean_inequality(const FactorModel& fm) {
    if (fm.k() == 0) {
        throw ValidationError("loadings_mean_inequality: need K >= 1");
    }
    const Eigen::MatrixXd& b = fm.loadings();
    const double count = static_cast<double>(b.size());
    const Eigen::VectorXd means = fm.mean_loadings();

    LoadingsMeanInequality out;
    out.lhs = b.squaredNorm() / count;
    out.rhs = means.squaredNorm() / fm.k();
    out.gap = (b.rowwise() - means.transpose()).squaredNorm() / count;
    // lhs and rhs are rounded independently; allow for that at equality.
    out.holds = out.lhs >= out.rhs - 1e-12 * std::max(1.0, std::abs(out.rhs));
    return out;
}

RiskPartition risk_partition(double sigma, double rho, int n) {
    if (!(sigma > 0.0)) {
        throw ValidationError("risk_partition: sigma must be positive");
    }
    const EquiCorrMatrix g(n, rho);
    const double nn = static_cast<double>(n) * n;
    const double s2 = sigma * sigma;

    RiskPartition out;
    out.v_s = s2 * g.common_eigenvalue() / nn;
    out.v_r = s2 * (n - 1) * (1.0 - g.rho()) / nn;
    if (out.v_s > 0.0) {
        out.ratio = out.v_r / out.v_s;
    }
    if (g.rho() > 0.0) {
        out.asymptotic_ratio = (1.0 - g.rho()) / g.rho();
    }
    return out;
}

}  // namespace isocorr
