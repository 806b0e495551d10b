#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aks/linalg.hpp"

namespace aks {

// A finite-dimensional real Lie algebra in a fixed basis e_0..e_{dim-1}.
// ad[i](k, j) is the e_k coefficient of [e_i, e_j], so ad[i] is the matrix of
// ad_{e_i} acting on coordinates. The metric is the Gram matrix of an
// invertible symmetric bilinear form on the basis. All fields are set once by
// make_algebra and never mutated afterwards.
struct LieAlgebra {
  int dim = 0;
  std::vector<Matrix> ad;
  Matrix metric;
  Matrix metric_inverse;
  std::vector<Matrix> matrix_rep;  // optional faithful representation
  std::vector<std::string> labels;
};

inline Vector bracket(const LieAlgebra& g, const Vector& x, const Vector& y) {
  if (x.size() != g.dim || y.size() != g.dim) {
    throw std::invalid_argument("bracket: coordinate size does not match the algebra");
  }
  Vector out = Vector::Zero(g.dim);
  for (int i = 0; i < g.dim; ++i) {
    if (x(i) != 0.0) {
      out.noalias() += x(i) * (g.ad[i] * y);
    }
  }
  return out;
}

inline Matrix ad_matrix(const LieAlgebra& g, const Vector& x) {
  if (x.size() != g.dim) {
    throw std::invalid_argument("ad_matrix: coordinate size does not match the algebra");
  }
  Matrix out = Matrix::Zero(g.dim, g.dim);
  for (int i = 0; i < g.dim; ++i) {
    if (x(i) != 0.0) {
      out.noalias() += x(i) * g.ad[i];
    }
  }
  return out;
}

// Largest norm of [[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j] over
// basis triples i < j < k.
inline double jacobi_residual(const LieAlgebra& g) {
  auto with_basis = [&g](const Vector& v, int k) {
    Vector out = Vector::Zero(g.dim);
    for (int m = 0; m < g.dim; ++m) {
      if (v(m) != 0.0) {
        out.noalias() += v(m) * g.ad[m].col(k);
      }
    }
    return out;
  };
  double worst = 0.0;
  for (int i = 0; i < g.dim; ++i) {
    for (int j = i + 1; j < g.dim; ++j) {
      Vector cij = g.ad[i].col(j);
      for (int k = j + 1; k < g.dim; ++k) {
        Vector total = with_basis(cij, k) + with_basis(g.ad[j].col(k), i) +
                       with_basis(g.ad[k].col(i), j);
        worst = std::max(worst, max_norm(total));
      }
    }
  }
  return worst;
}

// Largest violation of <[x,y],z> + <y,[x,z]> = 0 over basis triples. The form
// is ad-invariant exactly when every matrix G * ad[i] is antisymmetric.
inline double ad_invariance_residual(const LieAlgebra& g) {
  double worst = 0.0;
  for (int i = 0; i < g.dim; ++i) {
    Matrix m = g.metric * g.ad[i];
    worst = std::max(worst, max_norm(m + m.transpose()));
  }
  return worst;
}

// Converts the differential df (a covector in basis coordinates) into the
// metric gradient: the unique vector grad with <grad, y> = df(y) for all y.
inline Vector metric_gradient(const LieAlgebra& g, const Vector& df) {
  if (df.size() != g.dim) {
    throw std::invalid_argument("metric_gradient: covector size does not match the algebra");
  }
  if (g.metric_inverse.size() > 0) {
    return g.metric_inverse * df;
  }
  Eigen::FullPivLU<Matrix> lu(g.metric);
  if (!lu.isInvertible()) {
    throw std::runtime_error("metric_gradient: singular metric");
  }
  return lu.solve(df);
}

inline Matrix represent(const LieAlgebra& g, const Vector& x) {
  if (g.matrix_rep.empty()) {
    throw std::runtime_error("represent: the algebra has no matrix representation attached");
  }
  if (x.size() != g.dim) {
    throw std::invalid_argument("represent: coordinate size does not match the algebra");
  }
  Matrix out = Matrix::Zero(g.matrix_rep[0].rows(), g.matrix_rep[0].cols());
  for (int i = 0; i < g.dim; ++i) {
    if (x(i) != 0.0) {
      out.noalias() += x(i) * g.matrix_rep[i];
    }
  }
  return out;
}

// Validating constructor. Checks antisymmetry of the structure constants, the
// Jacobi identity, symmetry and invertibility of the metric, and (when a
// representation is supplied) that it realizes the same brackets.
inline LieAlgebra make_algebra(std::vector<Matrix> ad, Matrix metric,
                               std::vector<Matrix> matrix_rep = {},
                               std::vector<std::string> labels = {}) {
  const int dim = static_cast<int>(ad.size());
  if (dim <= 0) {
    throw std::invalid_argument("make_algebra: empty structure constant list");
  }
  double cscale = 1.0;
  for (const Matrix& m : ad) {
    if (m.rows() != dim || m.cols() != dim) {
      throw std::invalid_argument("make_algebra: structure constant blocks must be dim x dim");
    }
    if (!m.allFinite()) {
      throw std::invalid_argument("make_algebra: structure constants must be finite");
    }
    cscale = std::max(cscale, max_norm(m));
  }
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      if (max_norm(Vector(ad[i].col(j) + ad[j].col(i))) > 1e-13 * cscale) {
        throw std::invalid_argument(
            "make_algebra: structure constants break antisymmetry at basis pair (" +
            std::to_string(i) + ", " + std::to_string(j) + ")");
      }
    }
  }
  if (metric.rows() != dim || metric.cols() != dim || !metric.allFinite()) {
    throw std::invalid_argument("make_algebra: metric must be a finite dim x dim matrix");
  }
  const double gscale = std::max(1.0, max_norm(metric));
  if (max_norm(Matrix(metric - metric.transpose())) > 1e-13 * gscale) {
    throw std::invalid_argument("make_algebra: metric must be symmetric");
  }
  Eigen::FullPivLU<Matrix> lu(metric);
  if (!lu.isInvertible()) {
    throw std::invalid_argument("make_algebra: metric is singular");
  }

  LieAlgebra g;
  g.dim = dim;
  g.ad = std::move(ad);
  g.metric = std::move(metric);
  g.metric_inverse = lu.inverse();

  if (jacobi_residual(g) > 1e-11 * cscale * cscale) {
    throw std::invalid_argument("make_algebra: structure constants violate the Jacobi identity");
  }

  if (!matrix_rep.empty()) {
    if (static_cast<int>(matrix_rep.size()) != dim) {
      throw std::invalid_argument("make_algebra: representation size does not match dim");
    }
    const auto rows = matrix_rep[0].rows();
    const auto cols = matrix_rep[0].cols();
    double rscale = 1.0;
    for (const Matrix& m : matrix_rep) {
      if (m.rows() != rows || m.cols() != cols || rows != cols || !m.allFinite()) {
        throw std::invalid_argument("make_algebra: representation matrices must be square and uniform");
      }
      rscale = std::max(rscale, max_norm(m));
    }
    for (int i = 0; i < dim; ++i) {
      for (int j = i + 1; j < dim; ++j) {
        Matrix commutator = matrix_rep[i] * matrix_rep[j] - matrix_rep[j] * matrix_rep[i];
        Matrix expected = Matrix::Zero(rows, cols);
        for (int k = 0; k < dim; ++k) {
          if (g.ad[i](k, j) != 0.0) {
            expected.noalias() += g.ad[i](k, j) * matrix_rep[k];
          }
        }
        if (max_norm(Matrix(commutator - expected)) > 1e-12 * rscale * rscale) {
          throw std::invalid_argument(
              "make_algebra: matrix representation disagrees with the structure constants at pair (" +
              std::to_string(i) + ", " + std::to_string(j) + ")");
        }
      }
    }
    g.matrix_rep = std::move(matrix_rep);
  }

  if (!labels.empty()) {
    if (static_cast<int>(labels.size()) != dim) {
      throw std::invalid_argument("make_algebra: label count does not match dim");
    }
    g.labels = std::move(labels);
  }
  return g;
}

}  // namespace aks
