#pragma once

// Closed-form algebra for the equicorrelation matrix G_N: unit diagonal and a
// single common off-diagonal correlation rho.
//
// G_N is never stored densely. Every production path runs in O(N) using
//   G x     = (1 - rho) x + rho (1'x) 1
//   G^-1 x  = x / (1 - rho) - rho (1'x) 1 / ((1 - rho)(1 + (N - 1) rho))
// Dense materialization exists for debugging and for oracle comparisons.

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace isocorr {

/// |rho - root| below this is treated as singular.
inline constexpr double kSingularityEpsilon = 1e-12;

/// Feasible correlation range (1/(1-n), 1] for an n-asset universe, n >= 2.
std::pair<double, double> feasible_rho_range(int n);

class EquiCorrMatrix {
public:
    /// Throws InfeasibleCorrelation when rho lies outside the feasible range,
    /// ValidationError when n < 1. For n == 1 rho is ignored (G_1 = [1]).
    EquiCorrMatrix(int n, double rho);

    int n() const { return n_; }
    double rho() const { return rho_; }

    /// True when rho sits within kSingularityEpsilon of 1 or 1/(1-n).
    bool is_singular() const;

    /// 1 + (N - 1) rho, the eigenvalue along 1_N.
    double common_eigenvalue() const { return 1.0 + (n_ - 1) * rho_; }

    Eigen::MatrixXd to_dense() const;

private:
    int n_;
    double rho_;
};

struct EigenStructure {
    double common_eigenvalue = 1.0;      // along 1_N
    double degenerate_eigenvalue = 1.0;  // 1 - rho
    int multiplicity = 0;                // N - 1

    /// Full spectrum, common eigenvalue first.
    std::vector<double> spectrum() const;
};

EigenStructure eigenvalues(const EquiCorrMatrix& m);

/// Integer matrix whose rows are the (unnormalized) eigenvectors of G_N:
/// first row all ones; row i > 1 holds -1 left of the diagonal, i - 1 on it
/// and 0 to the right.
class ProjectionMatrix {
public:
    explicit ProjectionMatrix(int n);

    int n() const { return n_; }
    /// Zero-based (row, col).
    std::int64_t operator()(int row, int col) const;

    /// Row inner products P P^T, computed in integer arithmetic.
    std::vector<std::vector<std::int64_t>> row_gram() const;

    Eigen::MatrixXd to_dense() const;

private:
    int n_;
};

ProjectionMatrix projection_matrix(int n);

/// Diagonal of B_N: N, then j(j-1) for j = 2..N. These are the squared
/// norms of the rows of P_N.
std::vector<std::int64_t> normalizer_diagonal(int n);

/// Q_N = B_N^{-1/2} P_N. Rows are orthonormal eigenvectors of G_N; the first
/// row is 1_N / sqrt(N) and each later row has its positive entry on the
/// diagonal.
Eigen::MatrixXd orthogonal_eigenmatrix(int n);

/// G^-1 = diagonal * I + rank_one * 1 1'.
struct InverseCoefficients {
    int n = 1;
    double diagonal = 1.0;
    double rank_one = 0.0;

    Eigen::MatrixXd to_dense() const;
};

/// Closed form G_N^-1 = H_N / f_N with f_N = (N-1) rho^2 - (N-2) rho - 1.
/// Throws SingularMatrix near the roots of f_N.
InverseCoefficients inverse(const EquiCorrMatrix& m);

/// G x in O(N). Throws DimensionMismatch.
Eigen::VectorXd matvec(const EquiCorrMatrix& m, const Eigen::VectorXd& x);

/// G^-1 x in O(N). Throws SingularMatrix or DimensionMismatch.
Eigen::VectorXd inv_matvec(const EquiCorrMatrix& m, const Eigen::VectorXd& x);

/// (1 + (N-1) rho)(1 - rho)^(N-1).
double determinant(const EquiCorrMatrix& m);

}  // namespace isocorr
