#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "aks/lie_algebra.hpp"
#include "aks/splitting.hpp"

namespace aks {

// An algebra built together with its canonical splitting.
struct SplitAlgebra {
  std::shared_ptr<const LieAlgebra> algebra;
  Splitting splitting;
};

// Basis index of E_ij (i != j) in the sl(n) basis: off-diagonal units in
// row-major order, then the coroot diagonals H_k = E_kk - E_{k+1,k+1}.
inline int sl_index(int n, int i, int j) {
  if (i == j || i < 0 || j < 0 || i >= n || j >= n) {
    throw std::invalid_argument("sl_index: need distinct row and column inside the matrix");
  }
  return i * (n - 1) + (j > i ? j - 1 : j);
}

inline int sl_h_index(int n, int k) {
  if (k < 0 || k >= n - 1) {
    throw std::invalid_argument("sl_h_index: k out of range");
  }
  return n * (n - 1) + k;
}

// Exact coordinates of a traceless matrix in the sl(n) basis. Off-diagonal
// entries are read directly; the H coefficients are prefix sums of the
// diagonal, so integer matrices give integer coordinates with no roundoff.
inline Vector sl_coords(int n, const Matrix& m) {
  if (m.rows() != n || m.cols() != n) {
    throw std::invalid_argument("sl_coords: matrix must be n x n");
  }
  if (std::abs(m.trace()) > 1e-12 * std::max(1.0, max_norm(m))) {
    throw std::invalid_argument("sl_coords: matrix must be traceless");
  }
  Vector c = Vector::Zero(n * n - 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) c(sl_index(n, i, j)) = m(i, j);
    }
  }
  double prefix = 0.0;
  for (int k = 0; k < n - 1; ++k) {
    prefix += m(k, k);
    c(sl_h_index(n, k)) = prefix;
  }
  return c;
}

// sl(n) with the trace form <X,Y> = tr(XY), split into g+ = so(n) and
// g- = upper triangular traceless matrices.
inline SplitAlgebra build_sl(int n) {
  if (n < 2) {
    throw std::invalid_argument("build_sl: need n >= 2");
  }
  const int dim = n * n - 1;
  std::vector<Matrix> rep(dim, Matrix::Zero(n, n));
  std::vector<std::string> labels(dim);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      rep[sl_index(n, i, j)](i, j) = 1.0;
      labels[sl_index(n, i, j)] = "E" + std::to_string(i + 1) + std::to_string(j + 1);
    }
  }
  for (int k = 0; k < n - 1; ++k) {
    Matrix h = Matrix::Zero(n, n);
    h(k, k) = 1.0;
    h(k + 1, k + 1) = -1.0;
    rep[sl_h_index(n, k)] = h;
    labels[sl_h_index(n, k)] = "H" + std::to_string(k + 1);
  }

  std::vector<Matrix> ad(dim, Matrix::Zero(dim, dim));
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      if (a == b) continue;
      ad[a].col(b) = sl_coords(n, Matrix(rep[a] * rep[b] - rep[b] * rep[a]));
    }
  }
  Matrix metric(dim, dim);
  for (int a = 0; a < dim; ++a) {
    for (int b = a; b < dim; ++b) {
      metric(a, b) = metric(b, a) = (rep[a] * rep[b]).trace();
    }
  }

  auto algebra = std::make_shared<const LieAlgebra>(make_algebra(ad, metric, rep, labels));

  const int k_plus = n * (n - 1) / 2;
  Matrix plus = Matrix::Zero(dim, k_plus);
  Matrix minus = Matrix::Zero(dim, dim - k_plus);
  int col = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      plus(sl_index(n, i, j), col) = 1.0;
      plus(sl_index(n, j, i), col) = -1.0;
      ++col;
    }
  }
  col = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      minus(sl_index(n, i, j), col++) = 1.0;
    }
  }
  for (int k = 0; k < n - 1; ++k) {
    minus(sl_h_index(n, k), col++) = 1.0;
  }
  Splitting s = make_splitting(algebra, plus, minus);
  return {algebra, std::move(s)};
}

// Heisenberg algebra h_n with basis X0, X1..Xn, Y1..Yn, brackets
// [Xi, Yi] = X0, X0 central, and the euclidean inner product (which is not
// ad-invariant; it exists to exercise residual diagnostics). The attached
// representation uses strictly upper triangular (n+2) x (n+2) matrices.
inline LieAlgebra build_heisenberg(int n) {
  if (n < 1) {
    throw std::invalid_argument("build_heisenberg: need n >= 1");
  }
  const int dim = 2 * n + 1;
  std::vector<Matrix> ad(dim, Matrix::Zero(dim, dim));
  std::vector<Matrix> rep(dim, Matrix::Zero(n + 2, n + 2));
  std::vector<std::string> labels(dim);
  labels[0] = "X0";
  rep[0](0, n + 1) = 1.0;
  for (int i = 1; i <= n; ++i) {
    ad[i](0, n + i) = 1.0;
    ad[n + i](0, i) = -1.0;
    rep[i](0, i) = 1.0;
    rep[n + i](i, n + 1) = 1.0;
    labels[i] = "X" + std::to_string(i);
    labels[n + i] = "Y" + std::to_string(i);
  }
  return make_algebra(ad, Matrix::Identity(dim, dim), rep, labels);
}

// Oscillator algebra osc(A) for an invertible symmetric A on R^{2n}: basis
// X0, v_1..v_{2n}, H with [H, u] = JA u, [u, w] = (Au, JAw) X0, X0 central,
// where J is the standard symplectic matrix. The metric restricts to A on the
// v block and pairs <X0, H> = -1, making it ad-invariant. Split as
// g+ = span{H}, g- = X0 + v block.
inline SplitAlgebra build_oscillator(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() < 2 || a.rows() % 2 != 0) {
    throw std::invalid_argument("build_oscillator: A must be square of even size >= 2");
  }
  if (!a.allFinite()) {
    throw std::invalid_argument("build_oscillator: A must be finite");
  }
  const int two_n = static_cast<int>(a.rows());
  if (max_norm(Matrix(a - a.transpose())) > 1e-12 * std::max(1.0, max_norm(a))) {
    throw std::invalid_argument("build_oscillator: A must be symmetric");
  }
  Eigen::FullPivLU<Matrix> lu(a);
  if (!lu.isInvertible()) {
    throw std::invalid_argument("build_oscillator: A must be invertible");
  }

  const int n = two_n / 2;
  const int dim = two_n + 2;
  const int h = two_n + 1;  // index of the hamiltonian generator
  const Matrix j = symplectic_j(n);
  const Matrix k = j * a;       // action of H on the v block
  const Matrix w = a * k;       // pairing [v_p, v_q] = w(p, q) X0

  std::vector<Matrix> ad(dim, Matrix::Zero(dim, dim));
  for (int p = 0; p < two_n; ++p) {
    for (int q = 0; q < two_n; ++q) {
      ad[1 + p](0, 1 + q) = w(p, q);
    }
    for (int r = 0; r < two_n; ++r) {
      ad[1 + p](1 + r, h) = -k(r, p);
      ad[h](1 + r, 1 + p) = k(r, p);
    }
  }

  Matrix metric = Matrix::Zero(dim, dim);
  metric.block(1, 1, two_n, two_n) = a;
  metric(0, h) = metric(h, 0) = -1.0;

  // Faithful representation on R^{2n+2}: rows/cols = [v block, coupling, last].
  std::vector<Matrix> rep(dim, Matrix::Zero(dim, dim));
  rep[0](two_n, h) = 1.0;
  rep[h].block(0, 0, two_n, two_n) = k;
  for (int p = 0; p < two_n; ++p) {
    rep[1 + p](p, h) = 1.0;
    for (int r = 0; r < two_n; ++r) {
      rep[1 + p](two_n, r) = -0.5 * w(r, p);
    }
  }

  std::vector<std::string> labels(dim);
  labels[0] = "X0";
  labels[h] = "H";
  for (int i = 1; i <= n; ++i) {
    labels[i] = "X" + std::to_string(i);
    labels[n + i] = "Y" + std::to_string(i);
  }

  auto algebra = std::make_shared<const LieAlgebra>(make_algebra(ad, metric, rep, labels));

  Matrix plus = Matrix::Zero(dim, 1);
  plus(h, 0) = 1.0;
  Matrix minus = Matrix::Zero(dim, dim - 1);
  for (int c = 0; c < dim - 1; ++c) {
    minus(c, c) = 1.0;
  }
  Splitting s = make_splitting(algebra, plus, minus);
  return {algebra, std::move(s)};
}

}  // namespace aks
