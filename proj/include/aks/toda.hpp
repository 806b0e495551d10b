#pragma once

// Open Toda lattice: exponential phase-space form, Flaschka variables, the
// tridiagonal Lax matrix, and a QR-factorization solver with orientation
// calibration.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "aks/integrate.hpp"
#include "aks/linalg.hpp"

namespace aks {

// Positions and momenta of n particles on a line.
struct TodaPhase {
  Vector x;
  Vector y;
};

// Flaschka variables: a on the diagonal, b > 0 on the off-diagonal of the Lax
// matrix; sum(a) = 0.
struct TodaFlaschka {
  Vector a;
  Vector b;
};

namespace detail {

inline void validate_phase(const TodaPhase& p, const char* who) {
  if (p.x.size() != p.y.size()) {
    throw std::invalid_argument(std::string(who) + ": x and y must have equal length");
  }
  if (p.x.size() < 2) {
    throw std::invalid_argument(std::string(who) + ": need at least two particles");
  }
  if (!p.x.allFinite() || !p.y.allFinite()) {
    throw std::invalid_argument(std::string(who) + ": phase coordinates must be finite");
  }
}

inline void validate_flaschka(const TodaFlaschka& f, const char* who) {
  const auto n = f.a.size();
  if (n < 2 || f.b.size() != n - 1) {
    throw std::invalid_argument(std::string(who) + ": need size(a) = n >= 2 and size(b) = n-1");
  }
  if (!f.a.allFinite() || !f.b.allFinite()) {
    throw std::invalid_argument(std::string(who) + ": flaschka variables must be finite");
  }
  if (f.b.minCoeff() <= 0.0) {
    throw std::invalid_argument(std::string(who) + ": off-diagonal entries b must be positive");
  }
  double scale = std::max(1.0, max_norm(f.a));
  if (std::abs(f.a.sum()) > 1e-12 * scale) {
    throw std::invalid_argument(std::string(who) + ": a must sum to zero");
  }
}

}  // namespace detail

// Shifts positions and momenta to zero mean (center-of-mass frame).
inline TodaPhase center(const TodaPhase& p) {
  detail::validate_phase(p, "center");
  TodaPhase out = p;
  out.x.array() -= p.x.mean();
  out.y.array() -= p.y.mean();
  return out;
}

// x' = y, y'_k = e^{x_{k-1}-x_k} - e^{x_k-x_{k+1}} with empty boundary terms.
inline TodaPhase toda_rhs_phase(const TodaPhase& p) {
  detail::validate_phase(p, "toda_rhs_phase");
  const auto n = p.x.size();
  TodaPhase d;
  d.x = p.y;
  d.y = Vector::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (k > 0) d.y(k) += std::exp(p.x(k - 1) - p.x(k));
    if (k + 1 < n) d.y(k) -= std::exp(p.x(k) - p.x(k + 1));
  }
  return d;
}

// a_k = -y_k/2, b_k = exp((x_k - x_{k+1})/2)/2. With strict=true the phase
// point must already be centered, so that sum(a) = 0.
inline TodaFlaschka flaschka(const TodaPhase& p, bool strict = true) {
  detail::validate_phase(p, "flaschka");
  if (strict) {
    double scale = std::max(1.0, std::max(max_norm(p.x), max_norm(p.y)));
    if (std::abs(p.x.mean()) > 1e-10 * scale || std::abs(p.y.mean()) > 1e-10 * scale) {
      throw std::invalid_argument("flaschka: the phase point is not centered; use center() first");
    }
  }
  const auto n = p.x.size();
  TodaFlaschka f;
  f.a = -0.5 * p.y;
  f.b = Vector(n - 1);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    f.b(k) = 0.5 * std::exp(0.5 * (p.x(k) - p.x(k + 1)));
  }
  return f;
}

// a'_k = 2(b_k^2 - b_{k-1}^2), b'_k = b_k (a_{k+1} - a_k), with b_0 = b_n = 0.
inline TodaFlaschka toda_rhs_flaschka(const TodaFlaschka& f) {
  detail::validate_flaschka(f, "toda_rhs_flaschka");
  const auto n = f.a.size();
  TodaFlaschka d;
  d.a = Vector::Zero(n);
  d.b = Vector(n - 1);
  for (Eigen::Index k = 0; k < n; ++k) {
    double right = (k + 1 < n) ? f.b(k) * f.b(k) : 0.0;
    double left = (k > 0) ? f.b(k - 1) * f.b(k - 1) : 0.0;
    d.a(k) = 2.0 * (right - left);
  }
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    d.b(k) = f.b(k) * (f.a(k + 1) - f.a(k));
  }
  return d;
}

// The same flows as flat vector fields over stacked coordinates, for use with
// the RK4 integrator.
inline VectorField phase_field(int n) {
  if (n < 2) throw std::invalid_argument("phase_field: need n >= 2");
  return [n](const Vector& s) {
    if (s.size() != 2 * n) throw std::invalid_argument("phase_field: bad state size");
    TodaPhase p{s.head(n), s.tail(n)};
    TodaPhase d = toda_rhs_phase(p);
    Vector out(2 * n);
    out << d.x, d.y;
    return out;
  };
}

inline VectorField flaschka_field(int n) {
  if (n < 2) throw std::invalid_argument("flaschka_field: need n >= 2");
  return [n](const Vector& s) {
    if (s.size() != 2 * n - 1) throw std::invalid_argument("flaschka_field: bad state size");
    TodaFlaschka f{s.head(n), s.tail(n - 1)};
    TodaFlaschka d = toda_rhs_flaschka(f);
    Vector out(2 * n - 1);
    out << d.a, d.b;
    return out;
  };
}

// Symmetric tridiagonal Lax matrix with a on the diagonal, b off it.
inline Matrix to_lax(const TodaFlaschka& f) {
  detail::validate_flaschka(f, "to_lax");
  const auto n = f.a.size();
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) l(i, i) = f.a(i);
  for (Eigen::Index i = 0; i + 1 < n; ++i) l(i, i + 1) = l(i + 1, i) = f.b(i);
  return l;
}

inline TodaFlaschka from_lax(const Matrix& l) {
  const auto n = l.rows();
  if (n != l.cols() || n < 2) {
    throw std::invalid_argument("from_lax: need a square matrix of size >= 2");
  }
  if (!l.allFinite()) {
    throw std::invalid_argument("from_lax: matrix entries must be finite");
  }
  double scale = std::max(1.0, max_norm(l));
  if (max_norm(Matrix(l - l.transpose())) > 1e-12 * scale) {
    throw std::invalid_argument("from_lax: the matrix is not symmetric");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 2; j < n; ++j) {
      if (std::abs(l(i, j)) > 1e-12 * scale) {
        throw std::invalid_argument("from_lax: the matrix is not tridiagonal");
      }
    }
  }
  TodaFlaschka f;
  f.a = l.diagonal();
  f.b = Vector(n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) f.b(i) = 0.5 * (l(i, i + 1) + l(i + 1, i));
  detail::validate_flaschka(f, "from_lax");
  return f;
}

// tr(L^k)/k for k = 2..k_max.
inline std::vector<double> toda_invariants(const Matrix& l, int k_max) {
  if (l.rows() != l.cols()) {
    throw std::invalid_argument("toda_invariants: need a square matrix");
  }
  if (k_max < 2) {
    throw std::invalid_argument("toda_invariants: need k_max >= 2");
  }
  std::vector<double> out;
  out.reserve(k_max - 1);
  Matrix p = l;
  for (int k = 2; k <= k_max; ++k) {
    p = p * l;
    out.push_back(p.trace() / k);
  }
  return out;
}

namespace detail {

// Checks the off-band leak and returns the exact symmetric tridiagonal part.
inline Matrix tridiagonal_snap(const Matrix& l, const char* who) {
  const auto n = l.rows();
  double scale = std::max(1.0, max_norm(l));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 2; j < n; ++j) {
      if (std::abs(l(i, j)) > 1e-9 * scale || std::abs(l(j, i)) > 1e-9 * scale) {
        throw std::runtime_error(std::string(who) + ": the flow left the tridiagonal form");
      }
    }
  }
  Matrix t = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) t(i, i) = l(i, i);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    t(i, i + 1) = t(i + 1, i) = 0.5 * (l(i, i + 1) + l(i + 1, i));
  }
  return t;
}

}  // namespace detail

// Solves the Toda flow in Flaschka form through QR factorization of
// exp(t L): each requested time is reached by conjugation steps L -> Q^T L Q
// with the step size bounded so the exponential stays well conditioned. The
// conjugation orientation is calibrated once against a short RK4 step.
inline std::vector<Matrix> solve_toda_qr(const Matrix& l0, const std::vector<double>& times) {
  TodaFlaschka f0 = from_lax(l0);  // validates shape, symmetry, positivity
  const auto n = l0.rows();
  const double scale = std::max(1.0, max_norm(l0));

  // Orientation calibration: the wrong exponent sign mismatches at order dt.
  const double dt_cal = 1e-3;
  Vector s0(2 * n - 1);
  s0 << f0.a, f0.b;
  Vector ref_state = integrate_rk4(flaschka_field(static_cast<int>(n)), s0, dt_cal, dt_cal)
                         .states.back();
  TodaFlaschka ref_f{ref_state.head(n), ref_state.tail(n - 1)};
  Matrix ref = to_lax(ref_f);
  double err[2];
  for (int k = 0; k < 2; ++k) {
    const double sig = (k == 0 ? 1.0 : -1.0);
    auto [q, r] = qr_positive(mat_exp(Matrix(sig * dt_cal * l0)));
    err[k] = max_norm(Matrix(q.transpose() * l0 * q - ref));
  }
  if (err[0] > 1e-6 * scale && err[1] > 1e-6 * scale) {
    throw std::runtime_error("solve_toda_qr: neither factorization orientation matches the flow");
  }
  const double sigma = (err[0] <= err[1] ? 1.0 : -1.0);

  std::vector<Matrix> out;
  out.reserve(times.size());
  for (double t : times) {
    Matrix cur = l0;
    double done = 0.0;
    int guard = 0;
    while (done != t) {
      if (++guard > 1000000) {
        throw std::runtime_error("solve_toda_qr: substep iteration failed to terminate");
      }
      double remaining = t - done;
      double bound = 2.0 / std::max(1.0, cur.norm());
      double step = std::min(std::abs(remaining), bound);
      if (step >= std::abs(remaining)) {
        step = std::abs(remaining);
        done = t;
      } else {
        done += (remaining > 0.0 ? step : -step);
      }
      double signed_step = (remaining > 0.0 ? step : -step);
      auto [q, r] = qr_positive(mat_exp(Matrix(sigma * signed_step * cur)));
      cur = detail::tridiagonal_snap(Matrix(q.transpose() * cur * q), "solve_toda_qr");
    }
    // Positivity of the off-diagonal, up to the numerical floor once the
    // lattice has essentially sorted.
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      if (cur(i, i + 1) <= 0.0 && std::abs(cur(i, i + 1)) > 1e-12 * scale) {
        throw std::runtime_error("solve_toda_qr: an off-diagonal entry left the positive cone");
      }
    }
    out.push_back(cur);
  }
  return out;
}

}  // namespace aks
