#pragma once

#include <Eigen/Dense>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

#include "aks/lie_algebra.hpp"
#include "aks/linalg.hpp"

namespace aks {

// A vector space splitting g = g+ (+) g- into two subalgebras, together with
// the induced dual splitting g = (g+)perp (+) (g-)perp by metric
// annihilators. Basis matrices store spanning coordinate vectors as columns;
// each p_* is the projection onto its subspace along the complementary one.
// Immutable after make_splitting.
struct Splitting {
  std::shared_ptr<const LieAlgebra> algebra_ptr;
  Matrix plus_basis;
  Matrix minus_basis;
  Matrix plus_perp_basis;
  Matrix minus_perp_basis;
  Matrix p_plus;
  Matrix p_minus;
  Matrix p_plus_perp;
  Matrix p_minus_perp;

  const LieAlgebra& algebra() const { return *algebra_ptr; }
};

namespace detail {

// Orthonormal basis (as columns) of the null space of m, with the expected
// dimension enforced.
inline Matrix null_space(const Matrix& m, int expected_dim, const char* what) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = 1e-12 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  const int nullity = static_cast<int>(m.cols()) - rank;
  if (nullity != expected_dim) {
    throw std::runtime_error(std::string(what) + ": annihilator has dimension " +
                             std::to_string(nullity) + ", expected " +
                             std::to_string(expected_dim));
  }
  return svd.matrixV().rightCols(nullity);
}

// Oblique projectors onto the spans of two complementary column blocks.
inline std::pair<Matrix, Matrix> complementary_projectors(const Matrix& first,
                                                          const Matrix& second,
                                                          const char* what) {
  const int dim = static_cast<int>(first.rows());
  Matrix both(dim, first.cols() + second.cols());
  both << first, second;
  Eigen::FullPivLU<Matrix> lu(both);
  if (lu.rank() < dim) {
    throw std::invalid_argument(std::string(what) +
                                ": the two spans do not form a direct sum (rank deficient)");
  }
  Matrix inverse = lu.inverse();
  Matrix p_first = first * inverse.topRows(first.cols());
  Matrix p_second = second * inverse.bottomRows(second.cols());
  return {p_first, p_second};
}

inline void check_subalgebra(const LieAlgebra& g, const Matrix& span, const Matrix& p_other,
                             const char* side) {
  for (int a = 0; a < span.cols(); ++a) {
    for (int b = a + 1; b < span.cols(); ++b) {
      Vector w = bracket(g, span.col(a), span.col(b));
      double leak = max_norm(Vector(p_other * w));
      if (leak > 1e-10 * std::max(1.0, max_norm(w))) {
        throw std::invalid_argument(std::string("make_splitting: the ") + side +
                                    " span is not closed under the bracket (not a subalgebra)");
      }
    }
  }
}

}  // namespace detail

// Builds the splitting determined by two complementary subalgebras given as
// coordinate column spans. Validates that each span is closed under the
// bracket, that the spans are complementary, and (when the metric is
// ad-invariant) that the induced annihilator splitting is preserved by the
// respective subalgebra actions.
inline Splitting make_splitting(std::shared_ptr<const LieAlgebra> algebra, Matrix plus_basis,
                                Matrix minus_basis) {
  if (!algebra) {
    throw std::invalid_argument("make_splitting: null algebra");
  }
  const LieAlgebra& g = *algebra;
  const int dim = g.dim;
  if (plus_basis.rows() != dim || minus_basis.rows() != dim) {
    throw std::invalid_argument("make_splitting: span rows must equal the algebra dimension");
  }
  const int k_plus = static_cast<int>(plus_basis.cols());
  const int k_minus = static_cast<int>(minus_basis.cols());
  if (k_plus <= 0 || k_minus <= 0 || k_plus + k_minus != dim) {
    throw std::invalid_argument("make_splitting: subspace dimensions must be positive and sum to dim");
  }

  Splitting s;
  s.algebra_ptr = std::move(algebra);
  s.plus_basis = std::move(plus_basis);
  s.minus_basis = std::move(minus_basis);

  auto [p_plus, p_minus] =
      detail::complementary_projectors(s.plus_basis, s.minus_basis, "make_splitting");
  s.p_plus = std::move(p_plus);
  s.p_minus = std::move(p_minus);

  detail::check_subalgebra(g, s.plus_basis, s.p_minus, "plus");
  detail::check_subalgebra(g, s.minus_basis, s.p_plus, "minus");

  // (g+)perp = null(plus^T G) and symmetrically; the metric is invertible, so
  // these have complementary dimensions and span g.
  s.plus_perp_basis = detail::null_space(Matrix(s.plus_basis.transpose() * g.metric), k_minus,
                                         "make_splitting: (g+)perp");
  s.minus_perp_basis = detail::null_space(Matrix(s.minus_basis.transpose() * g.metric), k_plus,
                                          "make_splitting: (g-)perp");
  auto [p_plus_perp, p_minus_perp] = detail::complementary_projectors(
      s.plus_perp_basis, s.minus_perp_basis, "make_splitting: annihilators");
  s.p_plus_perp = std::move(p_plus_perp);
  s.p_minus_perp = std::move(p_minus_perp);

  // With an ad-invariant metric each annihilator is a module over its
  // subalgebra; verify this numerically as an internal consistency check.
  const double cscale = [&g] {
    double m = 1.0;
    for (const Matrix& a : g.ad) m = std::max(m, max_norm(a));
    return m;
  }();
  if (ad_invariance_residual(g) <= 1e-12 * cscale * std::max(1.0, max_norm(g.metric))) {
    for (int a = 0; a < s.plus_basis.cols(); ++a) {
      for (int b = 0; b < s.plus_perp_basis.cols(); ++b) {
        Vector w = bracket(g, s.plus_basis.col(a), s.plus_perp_basis.col(b));
        if (max_norm(Vector(s.p_minus_perp * w)) > 1e-9 * std::max(1.0, max_norm(w))) {
          throw std::runtime_error(
              "make_splitting: [g+, (g+)perp] leaks out of (g+)perp despite an ad-invariant metric");
        }
      }
    }
    for (int a = 0; a < s.minus_basis.cols(); ++a) {
      for (int b = 0; b < s.minus_perp_basis.cols(); ++b) {
        Vector w = bracket(g, s.minus_basis.col(a), s.minus_perp_basis.col(b));
        if (max_norm(Vector(s.p_plus_perp * w)) > 1e-9 * std::max(1.0, max_norm(w))) {
          throw std::runtime_error(
              "make_splitting: [g-, (g-)perp] leaks out of (g-)perp despite an ad-invariant metric");
        }
      }
    }
  }
  return s;
}

}  // namespace aks
