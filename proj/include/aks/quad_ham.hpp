#pragma once

// Quadratic hamiltonians H = (1/2) v^T A v on R^{2n}, their linear flows,
// their lift to oscillator coadjoint orbits, Lax pair assembly, and the
// commutation machinery (involution tests, centralizers, diagonal families,
// derivations of the shifted heisenberg structure).

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "aks/builders.hpp"
#include "aks/linalg.hpp"
#include "aks/orbit.hpp"
#include "aks/rng.hpp"

namespace aks {

struct QuadHamiltonian {
  int n = 0;
  Matrix a;
};

inline QuadHamiltonian make_quad(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() < 2 || a.rows() % 2 != 0) {
    throw std::invalid_argument("make_quad: A must be square of even size >= 2");
  }
  if (!a.allFinite()) {
    throw std::invalid_argument("make_quad: A must have finite entries");
  }
  double scale = std::max(1.0, max_norm(a));
  if (max_norm(Matrix(a - a.transpose())) > 1e-13 * scale) {
    throw std::invalid_argument("make_quad: A must be symmetric");
  }
  QuadHamiltonian h;
  h.n = static_cast<int>(a.rows()) / 2;
  h.a = 0.5 * (a + a.transpose());
  return h;
}

// v(t) = exp(t J A) v0.
inline Vector quad_flow(const QuadHamiltonian& h, const Vector& v0, double t) {
  if (v0.size() != 2 * h.n) {
    throw std::invalid_argument("quad_flow: state size does not match the hamiltonian");
  }
  if (!v0.allFinite()) {
    throw std::invalid_argument("quad_flow: state must be finite");
  }
  Matrix k = symplectic_j(h.n) * h.a;
  return mat_exp(Matrix(t * k)) * v0;
}

// The same flow computed in the derived oscillator representation: the state
// is embedded as the z column of L = rho(x) and propagated by conjugation
// with exp(t M). Requires invertible A (the oscillator metric). Marches in
// substeps to keep the conjugation well conditioned.
inline Vector quad_flow_lax(const QuadHamiltonian& h, const Vector& v0, double t) {
  if (v0.size() != 2 * h.n) {
    throw std::invalid_argument("quad_flow_lax: state size does not match the hamiltonian");
  }
  auto osc = build_oscillator(h.a);  // validates invertibility
  const LieAlgebra& g = *osc.algebra;
  const int m = 2 * h.n;
  Vector coords = Vector::Zero(m + 2);
  coords.segment(1, m) = v0;
  coords(m + 1) = 1.0;
  Matrix l = represent(g, coords);
  Matrix gen = g.matrix_rep[m + 1];  // rho(X_{n+1})
  double bound = 2.0 / std::max(1.0, gen.norm());
  double done = 0.0;
  int guard = 0;
  while (done != t) {
    if (++guard > 1000000) {
      throw std::runtime_error("quad_flow_lax: substep iteration failed to terminate");
    }
    double remaining = t - done;
    double step = std::min(std::abs(remaining), bound);
    if (step >= std::abs(remaining)) {
      step = std::abs(remaining);
      done = t;
    } else {
      done += (remaining > 0.0 ? step : -step);
    }
    double signed_step = (remaining > 0.0 ? step : -step);
    Matrix e = mat_exp(Matrix(signed_step * gen));
    Matrix einv = mat_exp(Matrix(-signed_step * gen));
    l = e * l * einv;
  }
  return l.block(0, m + 1, m, 1);
}

// Flow of the lifted hamiltonian on an oscillator coadjoint orbit: the v
// block rotates by exp(t x_{n+1} J A_h), the central coordinate and the
// orbit label are fixed. The ambient oscillator metric drops out.
inline OrbitPoint orbit_flow(const QuadHamiltonian& h, const OrbitPoint& pt, double t) {
  const LieAlgebra& g = pt.algebra();
  const int m = 2 * h.n;
  if (g.dim != m + 2) {
    throw std::invalid_argument("orbit_flow: the orbit point does not match the hamiltonian");
  }
  double label = pt.coords(m + 1);
  if (label == 0.0 || t == 0.0) {
    return pt;
  }
  Vector coords = pt.coords;
  Matrix k = symplectic_j(h.n) * h.a;
  coords.segment(1, m) = mat_exp(Matrix(t * label * k)) * pt.coords.segment(1, m);
  return make_orbit_point(pt.splitting(), coords);
}

// Gradient oracle of the lifted quadratic g_i = (1/2)(A_i X_v, X_v) -
// x_0 x_{n+1} on the oscillator with ambient metric A:
// grad = A^{-1} A_i X_v + x_0 X_0 + x_{n+1} X_{n+1}. With trivial_extension
// the rank-two correction is dropped; the induced orbit dynamics coincide.
inline GradOracle oscillator_gradient(const LieAlgebra& g, const Matrix& ai,
                                      bool trivial_extension = false) {
  const int m = static_cast<int>(ai.rows());
  if (ai.cols() != m || g.dim != m + 2) {
    throw std::invalid_argument("oscillator_gradient: A_i does not match the oscillator");
  }
  double scale = std::max(1.0, max_norm(ai));
  if (max_norm(Matrix(ai - ai.transpose())) > 1e-13 * scale) {
    throw std::invalid_argument("oscillator_gradient: A_i must be symmetric");
  }
  Matrix ambient = g.metric.block(1, 1, m, m);
  Matrix a_inv_ai = ambient.fullPivLu().solve(ai);
  GradOracle o;
  o.grad = [m, a_inv_ai, trivial_extension](const Vector& x) {
    Vector out = Vector::Zero(m + 2);
    out.segment(1, m) = a_inv_ai * x.segment(1, m);
    if (!trivial_extension) {
      out(0) = x(0);
      out(m + 1) = x(m + 1);
    }
    return out;
  };
  Matrix ai_copy = ai;
  o.scalar = [m, ai_copy, trivial_extension](const Vector& x) {
    Vector v = x.segment(1, m);
    double val = 0.5 * v.dot(ai_copy * v);
    if (!trivial_extension) {
      val -= x(0) * x(m + 1);
    }
    return val;
  };
  return o;
}

// Lax pair of the lifted hamiltonian at an orbit point: L = rho(x) and
// M = x_{n+1} rho(X_{n+1}). The orbit's ambient metric must equal the
// hamiltonian matrix for L' = [M, L] to hold.
inline std::pair<Matrix, Matrix> build_lax_pair(const OrbitPoint& pt, const QuadHamiltonian& h) {
  const LieAlgebra& g = pt.algebra();
  const int m = 2 * h.n;
  if (g.dim != m + 2) {
    throw std::invalid_argument("build_lax_pair: the orbit point does not match the hamiltonian");
  }
  Matrix ambient = g.metric.block(1, 1, m, m);
  if (max_norm(Matrix(ambient - h.a)) > 1e-12 * std::max(1.0, max_norm(h.a))) {
    throw std::invalid_argument(
        "build_lax_pair: the hamiltonian must match the oscillator's quadratic form");
  }
  Matrix l = represent(g, pt.coords);
  Matrix mm = pt.coords(m + 1) * g.matrix_rep[m + 1];
  return {l, mm};
}

struct InvolutionResult {
  bool commute = false;
  double residual = 0.0;
};

// Theorem-level commutation test: [J A_1, J A_2] = 0 iff the lifted
// hamiltonians poisson-commute on every oscillator orbit.
inline InvolutionResult involution_commutator(const QuadHamiltonian& h1,
                                              const QuadHamiltonian& h2) {
  if (h1.n != h2.n) {
    throw std::invalid_argument("involution_commutator: dimension mismatch");
  }
  Matrix j = symplectic_j(h1.n);
  Matrix k1 = j * h1.a;
  Matrix k2 = j * h2.a;
  InvolutionResult r;
  r.residual = max_norm(Matrix(k1 * k2 - k2 * k1));
  double scale = std::max(1.0, max_norm(h1.a) * max_norm(h2.a));
  r.commute = r.residual <= 1e-10 * scale;
  return r;
}

// Largest |{H_1, H_2}| over random orbit points with the given labels.
inline double max_orbit_bracket(const SplitAlgebra& osc, const Matrix& a1, const Matrix& a2,
                                Rng& rng, int points = 50,
                                const std::vector<double>& labels = {-2.0, 1.0, 3.0}) {
  const LieAlgebra& g = *osc.algebra;
  const int m = g.dim - 2;
  auto f1 = oscillator_gradient(g, a1);
  auto f2 = oscillator_gradient(g, a2);
  double worst = 0.0;
  for (double label : labels) {
    for (int p = 0; p < points; ++p) {
      Vector coords = Vector::Zero(g.dim);
      for (int i = 1; i <= m; ++i) coords(i) = rng.uniform(-1.0, 1.0);
      coords(m + 1) = label;
      auto pt = make_orbit_point(osc.splitting, coords);
      worst = std::max(worst, std::abs(orbit_poisson(pt, f1, f2)));
    }
  }
  return worst;
}

struct DerivationResult {
  bool ok = false;
  double residual = 0.0;
};

// D is a derivation of the shifted (heisenberg) structure iff it preserves
// the symplectic cocycle: J D + D^T J = 0, i.e. J D symmetric.
inline DerivationResult is_derivation(const Matrix& d) {
  if (d.rows() != d.cols() || d.rows() < 2 || d.rows() % 2 != 0) {
    throw std::invalid_argument("is_derivation: need a square matrix of even size");
  }
  if (!d.allFinite()) {
    throw std::invalid_argument("is_derivation: entries must be finite");
  }
  Matrix jd = symplectic_j(static_cast<int>(d.rows()) / 2) * d;
  DerivationResult r;
  r.residual = max_norm(Matrix(jd - jd.transpose()));
  r.ok = r.residual <= 1e-12 * std::max(1.0, max_norm(d));
  return r;
}

// The bijection between symmetric matrices and derivations: S -> -J S.
inline Matrix derivation_from_symmetric(const Matrix& s) {
  if (s.rows() != s.cols() || s.rows() < 2 || s.rows() % 2 != 0) {
    throw std::invalid_argument("derivation_from_symmetric: need a square matrix of even size");
  }
  double scale = std::max(1.0, max_norm(s));
  if (max_norm(Matrix(s - s.transpose())) > 1e-13 * scale) {
    throw std::invalid_argument("derivation_from_symmetric: the matrix must be symmetric");
  }
  return -symplectic_j(static_cast<int>(s.rows()) / 2) * s;
}

inline Matrix symmetric_from_derivation(const Matrix& d) {
  auto check = is_derivation(d);
  if (!check.ok) {
    throw std::invalid_argument("symmetric_from_derivation: the matrix is not a derivation");
  }
  return symplectic_j(static_cast<int>(d.rows()) / 2) * d;
}

// Basis of the space of symmetric S with [J A, J S] = 0, via the nullspace
// of the linearized commutator over the symmetric parameter space.
inline std::vector<Matrix> centralizer_basis(const QuadHamiltonian& h) {
  const int m = 2 * h.n;
  Matrix j = symplectic_j(h.n);
  Matrix k = j * h.a;
  // Symmetric basis: diagonal units, then off-diagonal pair units.
  std::vector<std::pair<int, int>> params;
  for (int i = 0; i < m; ++i) params.push_back({i, i});
  for (int i = 0; i < m; ++i) {
    for (int jj = i + 1; jj < m; ++jj) params.push_back({i, jj});
  }
  const int d = static_cast<int>(params.size());
  Matrix op(m * m, d);
  for (int e = 0; e < d; ++e) {
    Matrix s = Matrix::Zero(m, m);
    s(params[e].first, params[e].second) = 1.0;
    s(params[e].second, params[e].first) = 1.0;
    Matrix ks = j * s;
    Matrix c = k * ks - ks * k;
    op.col(e) = Eigen::Map<const Vector>(c.data(), m * m);
  }
  Eigen::JacobiSVD<Matrix> svd(op, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double cutoff = 1e-10 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  std::vector<Matrix> basis;
  for (int c = 0; c < d; ++c) {
    double sigma = (c < sv.size()) ? sv(c) : 0.0;
    if (sigma > cutoff) continue;
    Vector coef = svd.matrixV().col(c);
    Matrix s = Matrix::Zero(m, m);
    for (int e = 0; e < d; ++e) {
      s(params[e].first, params[e].second) += coef(e);
      s(params[e].second, params[e].first) += (params[e].first == params[e].second) ? 0.0 : coef(e);
    }
    basis.push_back(s);
  }
  return basis;
}

// For diagonal A = diag(alpha; beta): the n plane hamiltonians
// A_i = diag(alpha_i e_i e_i^T; beta_i e_i e_i^T), which pairwise commute.
inline std::vector<QuadHamiltonian> commuting_family_diagonal(const QuadHamiltonian& h) {
  const int m = 2 * h.n;
  double scale = std::max(1.0, max_norm(h.a));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i != j && std::abs(h.a(i, j)) > 1e-13 * scale) {
        throw std::invalid_argument("commuting_family_diagonal: A must be diagonal");
      }
    }
  }
  std::vector<QuadHamiltonian> family;
  family.reserve(h.n);
  for (int i = 0; i < h.n; ++i) {
    double alpha = h.a(i, i);
    double beta = h.a(h.n + i, h.n + i);
    if (std::max(std::abs(alpha), std::abs(beta)) <= 1e-14 * scale) {
      throw std::invalid_argument(
          "commuting_family_diagonal: degenerate plane (alpha_i = beta_i = 0)");
    }
    Matrix ai = Matrix::Zero(m, m);
    ai(i, i) = alpha;
    ai(h.n + i, h.n + i) = beta;
    family.push_back(make_quad(ai));
  }
  return family;
}

}  // namespace aks
