#include "isocorr/iso_algebra.hpp"

#include <cmath>
#include <string>

#include "isocorr/error.hpp"

namespace isocorr {

namespace {

void check_dimension(const char* where, int n) {
    if (n < 1) {
        throw ValidationError(std::string(where) + ": dimension must be >= 1, got " +
                              std::to_string(n));
    }
}

void check_vector(const char* where, const EquiCorrMatrix& m, const Eigen::VectorXd& x) {
    if (x.size() != m.n()) {
        throw DimensionMismatch(std::string(where) + ": vector has " + std::to_string(x.size()) +
                                " entries, matrix is " + std::to_string(m.n()) + "x" +
                                std::to_string(m.n()));
    }
}

}  // namespace

std::pair<double, double> feasible_rho_range(int n) {
    if (n < 2) {
        throw ValidationError("feasible_rho_range: need n >= 2, got " + std::to_string(n));
    }
    return {1.0 / (1.0 - n), 1.0};
}

EquiCorrMatrix::EquiCorrMatrix(int n, double rho) : n_(n), rho_(rho) {
    check_dimension("EquiCorrMatrix", n);
    if (n == 1) {
        rho_ = 0.0;
        return;
    }
    const auto [lo, hi] = feasible_rho_range(n);
    if (!std::isfinite(rho) || rho < lo || rho > hi) {
        throw InfeasibleCorrelation("EquiCorrMatrix: rho=" + std::to_string(rho) +
                                    " outside feasible range [" + std::to_string(lo) +
                                    ", 1] for n=" + std::to_string(n));
    }
}

bool EquiCorrMatrix::is_singular() const {
    if (n_ == 1) {
        return false;
    }
    return std::abs(rho_ - 1.0) < kSingularityEpsilon ||
           std::abs(rho_ - 1.0 / (1.0 - n_)) < kSingularityEpsilon;
}

Eigen::MatrixXd EquiCorrMatrix::to_dense() const {
    Eigen::MatrixXd g = Eigen::MatrixXd::Constant(n_, n_, rho_);
    g.diagonal().setOnes();
    return g;
}

std::vector<double> EigenStructure::spectrum() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(multiplicity) + 1);
    out.push_back(common_eigenvalue);
    out.insert(out.end(), static_cast<std::size_t>(multiplicity), degenerate_eigenvalue);
    return out;
}

EigenStructure eigenvalues(const EquiCorrMatrix& m) {
    return EigenStructure{m.common_eigenvalue(), 1.0 - m.rho(), m.n() - 1};
}

ProjectionMatrix::ProjectionMatrix(int n) : n_(n) {
    check_dimension("ProjectionMatrix", n);
}

std::int64_t ProjectionMatrix::operator()(int row, int col) const {
    if (row == 0) {
        return 1;
    }
    if (col < row) {
        return -1;
    }
    if (col == row) {
        return row;  // number of -1 entries to its left
    }
    return 0;
}

std::vector<std::vector<std::int64_t>> ProjectionMatrix::row_gram() const {
    std::vector<std::vector<std::int64_t>> gram(static_cast<std::size_t>(n_),
                                                std::vector<std::int64_t>(static_cast<std::size_t>(n_), 0));
    for (int i = 0; i < n_; ++i) {
        for (int j = i; j < n_; ++j) {
            std::int64_t s = 0;
            for (int k = 0; k < n_; ++k) {
                s += (*this)(i, k) * (*this)(j, k);
            }
            gram[i][j] = s;
            gram[j][i] = s;
        }
    }
    return gram;
}

Eigen::MatrixXd ProjectionMatrix::to_dense() const {
    Eigen::MatrixXd p(n_, n_);
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            p(i, j) = static_cast<double>((*this)(i, j));
        }
    }
    return p;
}

ProjectionMatrix projection_matrix(int n) { return ProjectionMatrix(n); }

std::vector<std::int64_t> normalizer_diagonal(int n) {
    check_dimension("normalizer_diagonal", n);
    std::vector<std::int64_t> d;
    d.reserve(static_cast<std::size_t>(n));
    d.push_back(n);
    for (std::int64_t j = 2; j <= n; ++j) {
        d.push_back(j * (j - 1));
    }
    return d;
}

Eigen::MatrixXd orthogonal_eigenmatrix(int n) {
    const ProjectionMatrix p(n);
    const auto norms = normalizer_diagonal(n);
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const double scale = 1.0 / std::sqrt(static_cast<double>(norms[static_cast<std::size_t>(i)]));
        // Row i > 0 is nonzero only up to and including the diagonal.
        const int last = (i == 0) ? n - 1 : i;
        for (int j = 0; j <= last; ++j) {
            q(i, j) = static_cast<double>(p(i, j)) * scale;
        }
    }
    return q;
}

Eigen::MatrixXd InverseCoefficients::to_dense() const {
    Eigen::MatrixXd g = Eigen::MatrixXd::Constant(n, n, rank_one);
    g.diagonal().array() += diagonal;
    return g;
}

InverseCoefficients inverse(const EquiCorrMatrix& m) {
    const int n = m.n();
    if (n == 1) {
        return InverseCoefficients{1, 1.0, 0.0};
    }
    if (m.is_singular()) {
        throw SingularMatrix("inverse: G_" + std::to_string(n) + " is singular at rho=" +
                             std::to_string(m.rho()) + " (roots are 1 and 1/(1-N))");
    }
    const double rho = m.rho();
    // H_N has -1 - (N-2) rho on the diagonal and rho elsewhere.
    // f_N = (N-1) rho^2 - (N-2) rho - 1, evaluated in factored form.
    const double f = (rho - 1.0) * (1.0 + (n - 1) * rho);
    const double h_diag = -1.0 - (n - 2) * rho;
    const double off = rho / f;
    return InverseCoefficients{n, h_diag / f - off, off};
}

Eigen::VectorXd matvec(const EquiCorrMatrix& m, const Eigen::VectorXd& x) {
    check_vector("matvec", m, x);
    const double rho = m.rho();
    return (1.0 - rho) * x + Eigen::VectorXd::Constant(x.size(), rho * x.sum());
}

Eigen::VectorXd inv_matvec(const EquiCorrMatrix& m, const Eigen::VectorXd& x) {
    check_vector("inv_matvec", m, x);
    const InverseCoefficients inv = inverse(m);
    return inv.diagonal * x + Eigen::VectorXd::Constant(x.size(), inv.rank_one * x.sum());
}

double determinant(const EquiCorrMatrix& m) {
    return m.common_eigenvalue() * std::pow(1.0 - m.rho(), m.n() - 1);
}

}  // namespace isocorr
