#pragma once

// Coadjoint-orbit machinery for a split Lie algebra with an ad-invariant
// metric: hamiltonian and Lax vector fields on the annihilator g+perp, the
// induced Poisson pairing, and the factorization solver for flows of
// invariant hamiltonians.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "aks/builders.hpp"
#include "aks/integrate.hpp"
#include "aks/lie_algebra.hpp"
#include "aks/linalg.hpp"
#include "aks/splitting.hpp"

namespace aks {

// A differentiable function on the algebra, presented through its metric
// gradient. `scalar` is optional; when present it enables finite-difference
// validation of `grad`.
struct GradOracle {
  std::function<Vector(const Vector&)> grad;
  std::function<double(const Vector&)> scalar;
};

// A point of the Poisson manifold g+perp, tied to the splitting that defines
// it. The splitting must outlive the point.
struct OrbitPoint {
  const Splitting* split = nullptr;
  Vector coords;

  const Splitting& splitting() const { return *split; }
  const LieAlgebra& algebra() const { return split->algebra(); }
};

inline OrbitPoint make_orbit_point(const Splitting& s, const Vector& coords) {
  const LieAlgebra& g = s.algebra();
  if (coords.size() != g.dim) {
    throw std::invalid_argument("make_orbit_point: coordinate size does not match the algebra");
  }
  if (!coords.allFinite()) {
    throw std::invalid_argument("make_orbit_point: coordinates must be finite");
  }
  double leak = max_norm(Vector(s.p_minus_perp * coords));
  if (leak > 1e-12 * std::max(1.0, max_norm(coords))) {
    throw std::invalid_argument("make_orbit_point: the point is not in g+perp");
  }
  return OrbitPoint{&s, coords};
}

namespace detail {

inline Vector oracle_grad(const OrbitPoint& y, const GradOracle& f, const char* who) {
  if (!f.grad) {
    throw std::invalid_argument(std::string(who) + ": the oracle has no gradient");
  }
  Vector g = f.grad(y.coords);
  if (g.size() != y.algebra().dim) {
    throw std::invalid_argument(std::string(who) +
                                ": gradient size does not match the algebra");
  }
  return g;
}

}  // namespace detail

// Hamiltonian vector field of f on g+perp: -P+perp([P- grad f(Y), Y]).
inline Vector ham_field(const OrbitPoint& y, const GradOracle& f) {
  const Splitting& s = y.splitting();
  Vector grad = detail::oracle_grad(y, f, "ham_field");
  Vector u = s.p_minus * grad;
  Vector w = bracket(s.algebra(), u, y.coords);
  return Vector(-(s.p_plus_perp * w));
}

// Lax form of the same flow for invariant hamiltonians: [P+ grad f(x), x].
inline Vector lax_rhs(const OrbitPoint& x, const GradOracle& f) {
  const Splitting& s = x.splitting();
  Vector grad = detail::oracle_grad(x, f, "lax_rhs");
  Vector u = s.p_plus * grad;
  return bracket(s.algebra(), u, x.coords);
}

// Lie-Poisson bracket induced on g+perp: {f,g}(X) = <X, [P- grad f, P- grad g]>.
inline double orbit_poisson(const OrbitPoint& x, const GradOracle& f, const GradOracle& g) {
  const Splitting& s = x.splitting();
  Vector gf = s.p_minus * detail::oracle_grad(x, f, "orbit_poisson");
  Vector gg = s.p_minus * detail::oracle_grad(x, g, "orbit_poisson");
  Vector w = bracket(s.algebra(), gf, gg);
  return x.coords.dot(s.algebra().metric * w);
}

// Infinitesimal coadjoint action of u in g- at the point X, transported to
// g+perp through the metric: P+perp([X, u]). ham_field(f) equals this
// generator applied with u = P- grad f, up to the hamiltonian sign.
inline Vector coadjoint_action(const OrbitPoint& x, const Vector& u_minus) {
  const Splitting& s = x.splitting();
  if (u_minus.size() != x.algebra().dim) {
    throw std::invalid_argument("coadjoint_action: argument size does not match the algebra");
  }
  double leak = max_norm(Vector(s.p_plus * u_minus));
  if (leak > 1e-10 * std::max(1.0, max_norm(u_minus))) {
    throw std::invalid_argument("coadjoint_action: the argument is not in g-");
  }
  Vector w = bracket(s.algebra(), x.coords, u_minus);
  return Vector(s.p_plus_perp * w);
}

// Maximum deviation between <grad f, e_i> and a centered finite difference of
// the scalar. Requires the oracle to carry its scalar.
inline double gradient_fd_residual(const LieAlgebra& g, const GradOracle& f, const Vector& x) {
  if (!f.scalar) {
    throw std::invalid_argument("gradient_fd_residual: the oracle has no scalar function");
  }
  if (!f.grad) {
    throw std::invalid_argument("gradient_fd_residual: the oracle has no gradient");
  }
  Vector grad = f.grad(x);
  if (grad.size() != g.dim) {
    throw std::invalid_argument("gradient_fd_residual: gradient size does not match the algebra");
  }
  Vector pairing = g.metric * grad;
  const double h = 1e-5 * (1.0 + max_norm(x));
  double worst = 0.0;
  for (int i = 0; i < g.dim; ++i) {
    Vector xp = x;
    Vector xm = x;
    xp(i) += h;
    xm(i) -= h;
    double fd = (f.scalar(xp) - f.scalar(xm)) / (2.0 * h);
    worst = std::max(worst, std::abs(pairing(i) - fd));
  }
  return worst;
}

// Gradient oracle of f_k(X) = tr(X^k)/k on sl(n), k >= 2. The gradient is the
// traceless part of X^{k-1}.
inline GradOracle trace_power_grad(int n, int k) {
  if (n < 2) {
    throw std::invalid_argument("trace_power_grad: need n >= 2");
  }
  if (k < 2) {
    throw std::invalid_argument("trace_power_grad: need k >= 2");
  }
  auto sl = std::make_shared<const SplitAlgebra>(build_sl(n));
  GradOracle o;
  o.grad = [sl, n, k](const Vector& x) {
    Matrix m = represent(*sl->algebra, x);
    Matrix p = Matrix::Identity(n, n);
    for (int j = 0; j < k - 1; ++j) p = p * m;
    p -= (p.trace() / n) * Matrix::Identity(n, n);
    return sl_coords(n, p);
  };
  o.scalar = [sl, n, k](const Vector& x) {
    Matrix m = represent(*sl->algebra, x);
    Matrix p = Matrix::Identity(n, n);
    for (int j = 0; j < k; ++j) p = p * m;
    return p.trace() / k;
  };
  return o;
}

// Recovers coordinates from a matrix in the span of the representation.
inline Vector matrix_to_coords(const LieAlgebra& g, const Matrix& m) {
  if (g.matrix_rep.empty()) {
    throw std::runtime_error("matrix_to_coords: the algebra has no matrix representation attached");
  }
  const int r = static_cast<int>(g.matrix_rep[0].rows());
  const int c = static_cast<int>(g.matrix_rep[0].cols());
  Matrix stack(r * c, g.dim);
  for (int i = 0; i < g.dim; ++i) {
    stack.col(i) = Eigen::Map<const Vector>(g.matrix_rep[i].data(), r * c);
  }
  Vector rhs = Eigen::Map<const Vector>(m.data(), r * c);
  Vector coords = stack.colPivHouseholderQr().solve(rhs);
  double resid = max_norm(Vector(stack * coords - rhs));
  if (resid > 1e-10 * std::max(1.0, max_norm(m))) {
    throw std::runtime_error("matrix_to_coords: the matrix is not in the representation's image");
  }
  return coords;
}

// Solves x' = [P+ grad f(x), x] for an invariant hamiltonian by factorizing
// exp(t rho(grad f)). The conjugation orientation is calibrated once against
// a short RK4 step; each requested time is reached independently of the
// others, in substeps when t rho(grad f) is large.
inline Trajectory solve_factorization(const OrbitPoint& x0, const GradOracle& f,
                                      const std::vector<double>& times) {
  const Splitting& s = x0.splitting();
  const LieAlgebra& g = s.algebra();
  if (g.matrix_rep.empty()) {
    throw std::runtime_error(
        "solve_factorization: the algebra has no matrix representation attached");
  }
  if (f.scalar) {
    double resid = gradient_fd_residual(g, f, x0.coords);
    if (resid > 1e-6) {
      throw std::invalid_argument(
          "solve_factorization: the gradient oracle disagrees with finite differences of its "
          "scalar");
    }
  }

  const int r = static_cast<int>(g.matrix_rep[0].rows());
  const int c = static_cast<int>(g.matrix_rep[0].cols());
  Matrix stack(r * c, g.dim);
  for (int i = 0; i < g.dim; ++i) {
    stack.col(i) = Eigen::Map<const Vector>(g.matrix_rep[i].data(), r * c);
  }
  Eigen::ColPivHouseholderQR<Matrix> stack_qr(stack);
  auto extract = [&](const Matrix& m) {
    Vector rhs = Eigen::Map<const Vector>(m.data(), r * c);
    Vector coords = stack_qr.solve(rhs);
    double resid = max_norm(Vector(stack * coords - rhs));
    if (resid > 1e-9 * std::max(1.0, max_norm(m))) {
      throw std::runtime_error("solve_factorization: the flow left the representation's image");
    }
    return coords;
  };

  // Orientation calibration against one short RK4 step of the Lax flow. With
  // exp(sigma t xi) = QR, the conjugated point Q^T x0 Q solves the Lax
  // equation for one sign of sigma; which one depends on how the splitting is
  // oriented, so both are tried and the mismatch is order dt for the wrong
  // choice.
  const double dt_cal = 1e-3;
  auto field = [&](const Vector& x) { return lax_rhs(OrbitPoint{&s, x}, f); };
  Vector ref = integrate_rk4(field, x0.coords, dt_cal, dt_cal).states.back();
  Matrix x0m = represent(g, x0.coords);
  Matrix xi0 = represent(g, f.grad(x0.coords));
  double err[2];
  for (int k = 0; k < 2; ++k) {
    const double sigma = (k == 0 ? 1.0 : -1.0);
    auto [q, rr] = qr_positive(mat_exp(Matrix(sigma * dt_cal * xi0)));
    Vector cand = extract(Matrix(q.transpose() * x0m * q));
    err[k] = max_norm(Vector(cand - ref));
  }
  const double cal_tol = 1e-6 * std::max(1.0, max_norm(x0.coords));
  if (err[0] > cal_tol && err[1] > cal_tol) {
    throw std::runtime_error(
        "solve_factorization: neither factorization orientation matches the flow; the "
        "hamiltonian is likely not invariant");
  }
  const double sigma = (err[0] <= err[1] ? 1.0 : -1.0);

  Trajectory out;
  out.times = times;
  out.states.reserve(times.size());
  for (double t : times) {
    if (t == 0.0) {
      out.states.push_back(x0.coords);
      continue;
    }
    // March toward t, bounding each factorized step so the exponential stays
    // well conditioned for the QR rank checks.
    Vector cur = x0.coords;
    double done = 0.0;
    int guard = 0;
    while (done != t) {
      if (++guard > 1000000) {
        throw std::runtime_error("solve_factorization: substep iteration failed to terminate");
      }
      Vector grad = f.grad(cur);
      if (grad.size() != g.dim) {
        throw std::invalid_argument(
            "solve_factorization: gradient size does not match the algebra");
      }
      Matrix xi = represent(g, grad);
      double scale = std::max(1.0, xi.norm());
      double remaining = t - done;
      double step = std::min(std::abs(remaining), 4.0 / scale);
      if (step >= std::abs(remaining)) {
        step = std::abs(remaining);
        done = t;
      } else {
        done += (remaining > 0.0 ? step : -step);
      }
      double signed_step = (remaining > 0.0 ? step : -step);
      auto [q, rr] = qr_positive(mat_exp(Matrix(sigma * signed_step * xi)));
      Matrix cm = represent(g, cur);
      cur = extract(Matrix(q.transpose() * cm * q));
    }
    double leak = max_norm(Vector(s.p_minus_perp * cur));
    if (leak > 1e-10 * std::max(1.0, max_norm(cur))) {
      throw std::runtime_error("solve_factorization: the solution left g+perp");
    }
    out.states.push_back(cur);
  }
  return out;
}

}  // namespace aks
