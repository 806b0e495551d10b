#pragma once

// Polynomials of degree <= 2 on R^{2n} in the normal form
// f(v) = (1/2) v^T A v + b^T v + c, with the canonical Poisson bracket
// {f, g} = sum_i df/dx_i dg/dy_i - df/dy_i dg/dx_i. The bracket closes on
// this space, and on the span of {1, x_i, y_j, H} it reproduces the
// oscillator Lie algebra.

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aks/builders.hpp"
#include "aks/integrate.hpp"
#include "aks/lie_algebra.hpp"
#include "aks/linalg.hpp"

namespace aks {

struct Poly2 {
  int n = 0;
  Matrix a;
  Vector b;
  double c = 0.0;
};

inline Poly2 make_poly2(const Matrix& a, const Vector& b, double c) {
  if (a.rows() != a.cols() || a.rows() < 2 || a.rows() % 2 != 0) {
    throw std::invalid_argument("make_poly2: A must be square of even size >= 2");
  }
  if (b.size() != a.rows()) {
    throw std::invalid_argument("make_poly2: b must match the size of A");
  }
  if (!a.allFinite() || !b.allFinite() || !std::isfinite(c)) {
    throw std::invalid_argument("make_poly2: entries must be finite");
  }
  if (max_norm(Matrix(a - a.transpose())) > 1e-13 * std::max(1.0, max_norm(a))) {
    throw std::invalid_argument("make_poly2: A must be symmetric");
  }
  Poly2 f;
  f.n = static_cast<int>(a.rows()) / 2;
  f.a = 0.5 * (a + a.transpose());
  f.b = b;
  f.c = c;
  return f;
}

inline double poly_eval(const Poly2& f, const Vector& v) {
  if (v.size() != 2 * f.n) {
    throw std::invalid_argument("poly_eval: point size does not match the polynomial");
  }
  return 0.5 * v.dot(f.a * v) + f.b.dot(v) + f.c;
}

inline double poly_norm(const Poly2& f) {
  return std::max({max_norm(f.a), max_norm(Matrix(f.b)), std::abs(f.c)});
}

inline Poly2 poly_add(const Poly2& f, const Poly2& g) {
  if (f.n != g.n) throw std::invalid_argument("poly_add: dimension mismatch");
  Poly2 r = f;
  r.a += g.a;
  r.b += g.b;
  r.c += g.c;
  return r;
}

inline Poly2 poly_sub(const Poly2& f, const Poly2& g) {
  if (f.n != g.n) throw std::invalid_argument("poly_sub: dimension mismatch");
  Poly2 r = f;
  r.a -= g.a;
  r.b -= g.b;
  r.c -= g.c;
  return r;
}

inline Poly2 poly_scale(const Poly2& f, double s) {
  Poly2 r = f;
  r.a *= s;
  r.b *= s;
  r.c *= s;
  return r;
}

inline int poly_degree(const Poly2& f) {
  if (max_norm(f.a) > 0.0) return 2;
  if (max_norm(Matrix(f.b)) > 0.0) return 1;
  return 0;
}

// Product of two polynomials when the result stays within degree 2. Under
// that gate any term of degree 3 or 4 is structurally absent, so the normal
// form of the product is assembled directly.
inline Poly2 poly_mul(const Poly2& f, const Poly2& g) {
  if (f.n != g.n) throw std::invalid_argument("poly_mul: dimension mismatch");
  if (poly_degree(f) + poly_degree(g) > 2) {
    throw std::invalid_argument("poly_mul: the product leaves degree 2");
  }
  Matrix a = g.c * f.a + f.c * g.a + f.b * g.b.transpose() + g.b * f.b.transpose();
  Vector b = g.c * f.b + f.c * g.b;
  return make_poly2(a, b, f.c * g.c);
}

// {f, g} in normal form: quadratic part A_f J A_g - A_g J A_f, linear part
// A_f J b_g - A_g J b_f, constant b_f^T J b_g.
inline Poly2 pbracket(const Poly2& f, const Poly2& g) {
  if (f.n != g.n) throw std::invalid_argument("pbracket: dimension mismatch");
  Matrix j = symplectic_j(f.n);
  Matrix a = f.a * j * g.a - g.a * j * f.a;
  Vector b = f.a * j * g.b - g.a * j * f.b;
  double c = f.b.dot(j * g.b);
  return make_poly2(a, b, c);
}

// Hamiltonian vector field of f: v' = J grad f = J(Av + b). Along this flow
// any observable g evolves by d/dt g = {g, f}.
inline VectorField ham_vf_poly(const Poly2& f) {
  Matrix k = symplectic_j(f.n) * f.a;
  Vector jb = symplectic_j(f.n) * f.b;
  const int m = 2 * f.n;
  return [k, jb, m](const Vector& v) {
    if (v.size() != m) {
      throw std::invalid_argument("ham_vf_poly: point size does not match the polynomial");
    }
    return Vector(k * v + jb);
  };
}

// Bracket table of {1, x_1..x_n, y_1..y_n, H} against the structure
// constants of the oscillator algebra on A = I, in the basis order
// (X_0, v_1..v_2n, X_{n+1}). Returns the worst coefficient-space residual.
inline double oscillator_realization_check(int n) {
  if (n < 1) throw std::invalid_argument("oscillator_realization_check: need n >= 1");
  const int m = 2 * n;
  auto osc = build_oscillator(Matrix::Identity(m, m));
  const LieAlgebra& g = *osc.algebra;
  std::vector<Poly2> p;
  p.push_back(make_poly2(Matrix::Zero(m, m), Vector::Zero(m), 1.0));
  for (int k = 0; k < m; ++k) {
    Vector b = Vector::Zero(m);
    b(k) = 1.0;
    p.push_back(make_poly2(Matrix::Zero(m, m), b, 0.0));
  }
  p.push_back(make_poly2(Matrix::Identity(m, m), Vector::Zero(m), 0.0));

  double worst = 0.0;
  for (int i = 0; i < g.dim; ++i) {
    for (int j = 0; j < g.dim; ++j) {
      Vector ei = Vector::Zero(g.dim);
      Vector ej = Vector::Zero(g.dim);
      ei(i) = 1.0;
      ej(j) = 1.0;
      Vector coeffs = bracket(g, ei, ej);
      Poly2 expected = make_poly2(Matrix::Zero(m, m), Vector::Zero(m), 0.0);
      for (int k = 0; k < g.dim; ++k) {
        if (coeffs(k) != 0.0) {
          expected = poly_add(expected, poly_scale(p[k], coeffs(k)));
        }
      }
      worst = std::max(worst, poly_norm(poly_sub(pbracket(p[i], p[j]), expected)));
    }
  }
  return worst;
}

}  // namespace aks
