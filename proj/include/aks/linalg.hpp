#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>
#include <utility>

namespace aks {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline double max_norm(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// Block symplectic matrix [[0, I], [-I, 0]], i.e. (x, y) -> (y, -x) on R^2n.
inline Matrix symplectic_j(int n) {
  Matrix j = Matrix::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = Matrix::Identity(n, n);
  j.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
  return j;
}

/// Matrix exponential (scaling and squaring). Relative accuracy ~1e-13 for
/// operator norms up to ~50.
inline Matrix mat_exp(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("mat_exp: matrix must be square");
  if (!m.allFinite()) throw std::invalid_argument("mat_exp: non-finite entries");
  return m.exp();
}

/// QR factorization of an invertible square matrix with the diagonal of R
/// normalized positive, which makes Q and R unique. Throws on numerically
/// rank-deficient input.
inline std::pair<Matrix, Matrix> qr_positive(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("qr_positive: matrix must be square");
  if (!m.allFinite()) throw std::invalid_argument("qr_positive: non-finite entries");
  Eigen::HouseholderQR<Matrix> qr(m);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  const double floor = 1e-12 * std::max(1.0, max_norm(m));
  for (int i = 0; i < m.rows(); ++i) {
    if (std::abs(r(i, i)) < floor)
      throw std::runtime_error("qr_positive: numerically rank-deficient input");
    if (r(i, i) < 0.0) {
      r.row(i) = -r.row(i);
      q.col(i) = -q.col(i);
    }
  }
  return {std::move(q), std::move(r)};
}

struct SymEig {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns matching values
};

/// Eigendecomposition of a symmetric matrix. Input symmetry is checked.
inline SymEig sym_eig_full(const Matrix& s) {
  if (s.rows() != s.cols()) throw std::invalid_argument("sym_eig: matrix must be square");
  if (!s.allFinite()) throw std::invalid_argument("sym_eig: non-finite entries");
  if (max_norm(s - s.transpose()) > 1e-12 * std::max(1.0, max_norm(s)))
    throw std::invalid_argument("sym_eig: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  if (es.info() != Eigen::Success) throw std::runtime_error("sym_eig: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

/// Ascending eigenvalues of a symmetric matrix.
inline Vector sym_eig(const Matrix& s) { return sym_eig_full(s).values; }

}  // namespace aks
