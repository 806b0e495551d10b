#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "aks/builders.hpp"
#include "aks/integrate.hpp"
#include "aks/orbit.hpp"
#include "aks/quad_ham.hpp"
#include "aks/rng.hpp"
#include "aks/serialize.hpp"

using aks::Matrix;
using aks::Vector;

namespace {

Matrix bounded_symmetric(aks::Rng& rng, int m, double bound) {
  Matrix a = aks::random_symmetric(rng, m);
  double norm = aks::max_norm(a);
  if (norm > bound) a *= bound / norm;
  return a;
}

Vector osc_coords(aks::Rng& rng, int n, double label) {
  Vector c = Vector::Zero(2 * n + 2);
  for (int i = 1; i <= 2 * n; ++i) c(i) = rng.uniform(-1.0, 1.0);
  c(2 * n + 1) = label;
  return c;
}

double energy(const aks::QuadHamiltonian& h, const Vector& v) {
  return 0.5 * v.dot(h.a * v);
}

}  // namespace

TEST_CASE("make_quad validates its matrix") {
  REQUIRE_THROWS_AS(aks::make_quad(Matrix::Zero(3, 3)), std::invalid_argument);
  REQUIRE_THROWS_AS(aks::make_quad(Matrix::Zero(2, 3)), std::invalid_argument);
  Matrix asym = Matrix::Zero(2, 2);
  asym(0, 1) = 0.5;
  REQUIRE_THROWS_AS(aks::make_quad(asym), std::invalid_argument);
  auto h = aks::make_quad(Matrix::Identity(4, 4));
  REQUIRE(h.n == 2);
}

TEST_CASE("quad_flow closed forms: rotation and hyperbolic") {
  auto h = aks::make_quad(Matrix::Identity(2, 2));
  Vector v0(2);
  v0 << 0.3, -1.1;
  const double t = 0.7;
  Vector v = aks::quad_flow(h, v0, t);
  REQUIRE(v(0) == Catch::Approx(v0(0) * std::cos(t) + v0(1) * std::sin(t)).margin(1e-14));
  REQUIRE(v(1) == Catch::Approx(-v0(0) * std::sin(t) + v0(1) * std::cos(t)).margin(1e-14));
  // Full period.
  Vector back = aks::quad_flow(h, v0, 2.0 * M_PI);
  REQUIRE(aks::max_norm(Vector(back - v0)) <= 1e-13);

  Matrix ab = Matrix::Zero(2, 2);
  ab(0, 0) = 1.0;
  ab(1, 1) = -1.0;
  auto hb = aks::make_quad(ab);
  const double s = 1.2;
  Vector w = aks::quad_flow(hb, v0, s);
  REQUIRE(w(0) == Catch::Approx(v0(0) * std::cosh(s) - v0(1) * std::sinh(s)).margin(1e-13));
  REQUIRE(w(1) == Catch::Approx(-v0(0) * std::sinh(s) + v0(1) * std::cosh(s)).margin(1e-13));
}

TEST_CASE("quad_flow agrees with rk4 for bounded random hamiltonians") {
  aks::Rng rng(100);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 2;
    auto h = aks::make_quad(bounded_symmetric(rng, 2 * n, 2.0));
    Vector v0 = aks::random_vector(rng, 2 * n);
    Matrix k = aks::symplectic_j(n) * h.a;
    auto field = [&k](const Vector& v) { return Vector(k * v); };
    auto traj = aks::integrate_rk4(field, v0, 10.0, 1e-3);
    Vector exact = aks::quad_flow(h, v0, 10.0);
    double scale = std::max(1.0, aks::max_norm(exact));
    REQUIRE(aks::max_norm(Vector(exact - traj.states.back())) <= 1e-8 * scale);
  }
}

TEST_CASE("quad_flow conserves the energy") {
  auto h = aks::make_quad(Matrix::Identity(4, 4));
  aks::Rng rng(101);
  Vector v0 = aks::random_vector(rng, 4);
  double e0 = energy(h, v0);
  for (double t : {1.0, 5.0, 10.0}) {
    REQUIRE(std::abs(energy(h, aks::quad_flow(h, v0, t)) - e0) <= 1e-12);
  }
  auto hr = aks::make_quad(bounded_symmetric(rng, 4, 2.0));
  Vector w0 = aks::random_vector(rng, 4);
  double f0 = energy(hr, w0);
  for (double t : {0.5, 2.0}) {
    Vector w = aks::quad_flow(hr, w0, t);
    REQUIRE(std::abs(energy(hr, w) - f0) <= 1e-10 * std::max(1.0, std::abs(f0)));
  }
}

TEST_CASE("orbit_flow moves the v block and freezes the label") {
  const int n = 2;
  aks::Rng rng(102);
  // Ambient metric differs from the hamiltonian: the flow depends only on
  // the hamiltonian matrix.
  Matrix ambient = aks::random_symmetric_invertible(rng, 2 * n);
  auto osc = aks::build_oscillator(ambient);
  auto h = aks::make_quad(bounded_symmetric(rng, 2 * n, 1.5));
  Vector c0 = osc_coords(rng, n, 1.3);
  auto pt = aks::make_orbit_point(osc.splitting, c0);

  auto moved = aks::orbit_flow(h, pt, 2.0);
  REQUIRE(moved.coords(0) == 0.0);
  REQUIRE(moved.coords(2 * n + 1) == c0(2 * n + 1));
  // The generator is scaled by the orbit label.
  Matrix gen = aks::mat_exp(Matrix(2.0 * 1.3 * aks::symplectic_j(n) * h.a));
  REQUIRE(aks::max_norm(Vector(moved.coords.segment(1, 2 * n) - gen * c0.segment(1, 2 * n))) <=
          1e-12);

  // Zero label: the point is a fixed point.
  auto frozen = aks::make_orbit_point(osc.splitting, osc_coords(rng, n, 0.0));
  auto still = aks::orbit_flow(h, frozen, 5.0);
  REQUIRE(aks::max_norm(Vector(still.coords - frozen.coords)) == 0.0);

  // Against rk4 of the hamiltonian field built from the gradient oracle.
  auto oracle = aks::oscillator_gradient(*osc.algebra, h.a);
  auto field = [&](const Vector& x) {
    return aks::ham_field(aks::make_orbit_point(osc.splitting, x), oracle);
  };
  auto traj = aks::integrate_rk4(field, c0, 2.0, 1e-3);
  REQUIRE(aks::max_norm(Vector(moved.coords - traj.states.back())) <= 1e-8);
}

TEST_CASE("oscillator_gradient validates and supports the trivial extension") {
  const int n = 2;
  aks::Rng rng(103);
  Matrix ambient = aks::random_symmetric_invertible(rng, 2 * n);
  auto osc = aks::build_oscillator(ambient);
  Matrix ai = aks::random_symmetric(rng, 2 * n);
  auto full = aks::oscillator_gradient(*osc.algebra, ai);
  auto trivial = aks::oscillator_gradient(*osc.algebra, ai, true);

  for (int trial = 0; trial < 5; ++trial) {
    Vector x = aks::random_vector(rng, 2 * n + 2);
    REQUIRE(aks::gradient_fd_residual(*osc.algebra, full, x) <= 1e-6);
    REQUIRE(aks::gradient_fd_residual(*osc.algebra, trivial, x) <= 1e-6);
    // Off the orbit the scalars differ by exactly x0 * x_{n+1}.
    double gap = full.scalar(x) - trivial.scalar(x);
    REQUIRE(gap == Catch::Approx(-x(0) * x(2 * n + 1)).margin(1e-14));
  }

  // Identical dynamics: the gradients differ by central + g+ directions only.
  auto pt = aks::make_orbit_point(osc.splitting, osc_coords(rng, n, -0.8));
  Vector hf = aks::ham_field(pt, full);
  Vector ht = aks::ham_field(pt, trivial);
  REQUIRE(aks::max_norm(Vector(hf - ht)) <= 1e-13);
  Matrix a2 = aks::random_symmetric(rng, 2 * n);
  auto other = aks::oscillator_gradient(*osc.algebra, a2);
  REQUIRE(std::abs(aks::orbit_poisson(pt, full, other) - aks::orbit_poisson(pt, trivial, other)) <=
          1e-13);

  REQUIRE_THROWS_AS(aks::oscillator_gradient(*osc.algebra, Matrix::Identity(6, 6)),
                    std::invalid_argument);
}

TEST_CASE("build_lax_pair frozen small case") {
  auto osc = aks::build_oscillator(Matrix::Identity(2, 2));
  auto h = aks::make_quad(Matrix::Identity(2, 2));
  Vector c(4);
  c << 0.0, 0.3, -0.4, 2.0;
  auto pt = aks::make_orbit_point(osc.splitting, c);
  auto [l, m] = aks::build_lax_pair(pt, h);

  Matrix lexp = Matrix::Zero(4, 4);
  lexp(0, 1) = 2.0;
  lexp(1, 0) = -2.0;
  lexp(0, 3) = 0.3;
  lexp(1, 3) = -0.4;
  // Coupling row -(1/2)(Jz)^T with z = (0.3, -0.4): Jz = (-0.4, -0.3).
  lexp(2, 0) = 0.2;
  lexp(2, 1) = 0.15;
  Matrix mexp = Matrix::Zero(4, 4);
  mexp(0, 1) = 2.0;
  mexp(1, 0) = -2.0;
  REQUIRE(aks::max_norm(Matrix(l - lexp)) == 0.0);
  REQUIRE(aks::max_norm(Matrix(m - mexp)) == 0.0);
}

TEST_CASE("build_lax_pair satisfies the lax equation algebraically") {
  aks::Rng rng(104);
  for (int n : {1, 2}) {
    Matrix a = (n == 1) ? Matrix(Matrix::Identity(2, 2))
                        : Matrix(aks::random_symmetric_invertible(rng, 2 * n));
    auto osc = aks::build_oscillator(a);
    auto h = aks::make_quad(a);
    auto oracle = aks::oscillator_gradient(*osc.algebra, a);
    for (int trial = 0; trial < 5; ++trial) {
      auto pt = aks::make_orbit_point(osc.splitting, osc_coords(rng, n, rng.uniform(-2.0, 2.0)));
      auto [l, m] = aks::build_lax_pair(pt, h);
      Vector rhs = aks::lax_rhs(pt, oracle);
      Matrix ldot = aks::represent(*osc.algebra, rhs);
      REQUIRE(aks::max_norm(Matrix(ldot - (m * l - l * m))) <= 1e-12);
    }
  }
}

TEST_CASE("lax residual shrinks at second order in dt") {
  aks::Rng rng(105);
  for (int n : {1, 2}) {
    Matrix a = (n == 1) ? Matrix(Matrix::Identity(2, 2))
                        : Matrix(aks::random_symmetric_invertible(rng, 2 * n));
    auto osc = aks::build_oscillator(a);
    auto h = aks::make_quad(a);
    auto pt = aks::make_orbit_point(osc.splitting, osc_coords(rng, n, 1.0));
    const double t0 = 0.4;
    auto residual = [&](double dt) {
      auto at = [&](double t) {
        auto [l, m] = aks::build_lax_pair(aks::orbit_flow(h, pt, t), h);
        return l;
      };
      auto [lc, mc] = aks::build_lax_pair(aks::orbit_flow(h, pt, t0), h);
      Matrix fd = (at(t0 + dt) - at(t0 - dt)) / (2.0 * dt);
      return aks::max_norm(Matrix(fd - (mc * lc - lc * mc)));
    };
    double r1 = residual(1e-4);
    double r2 = residual(5e-5);
    REQUIRE(r1 / r2 >= 3.2);
    REQUIRE(r1 / r2 <= 4.8);
  }
}

TEST_CASE("build_lax_pair rejects a mismatched ambient metric") {
  auto osc = aks::build_oscillator(Matrix::Identity(2, 2));
  auto h = aks::make_quad(Matrix(2.0 * Matrix::Identity(2, 2)));
  aks::Rng rng(106);
  auto pt = aks::make_orbit_point(osc.splitting, osc_coords(rng, 1, 1.0));
  REQUIRE_THROWS_AS(aks::build_lax_pair(pt, h), std::invalid_argument);
}

TEST_CASE("quad_flow_lax matches the closed flow") {
  auto hi = aks::make_quad(Matrix::Identity(2, 2));
  Vector v0(2);
  v0 << 0.4, 0.9;
  REQUIRE(aks::max_norm(Vector(aks::quad_flow_lax(hi, v0, 3.0) - aks::quad_flow(hi, v0, 3.0))) <=
          1e-12);

  aks::Rng rng(107);
  const int n = 2;
  Matrix a = aks::random_symmetric_invertible(rng, 2 * n);
  double norm = aks::max_norm(a);
  if (norm > 1.5) a *= 1.5 / norm;
  auto h = aks::make_quad(a);
  Vector w0 = aks::random_vector(rng, 2 * n);
  Vector closed = aks::quad_flow(h, w0, 2.0);
  Vector lax = aks::quad_flow_lax(h, w0, 2.0);
  REQUIRE(aks::max_norm(Vector(lax - closed)) <= 1e-10 * std::max(1.0, aks::max_norm(closed)));
}

TEST_CASE("involution_commutator separates planted and generic pairs") {
  aks::Rng rng(108);
  const int n = 2;
  Matrix a1 = aks::random_symmetric(rng, 2 * n);
  Matrix j = aks::symplectic_j(n);
  // Planted commuting partner: an odd polynomial in JA1, symmetrized.
  Matrix a2 = 0.7 * a1 + 0.3 * Matrix(a1 * j * a1 * j * a1);
  auto r12 = aks::involution_commutator(aks::make_quad(a1), aks::make_quad(a2));
  REQUIRE(r12.commute);
  REQUIRE(r12.residual <= 1e-12 * std::max(1.0, aks::max_norm(a1) * aks::max_norm(a2)));

  Matrix a3 = aks::random_symmetric(rng, 2 * n);
  auto r13 = aks::involution_commutator(aks::make_quad(a1), aks::make_quad(a3));
  REQUIRE_FALSE(r13.commute);
  REQUIRE(r13.residual > 1e-3);
}

TEST_CASE("commutator verdict agrees with orbit brackets") {
  aks::Rng rng(109);
  const int n = 2;
  auto osc = aks::build_oscillator(Matrix::Identity(2 * n, 2 * n));
  Matrix j = aks::symplectic_j(n);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix a1 = aks::random_symmetric(rng, 2 * n);
    Matrix a2;
    bool planted = (trial % 4 == 0);
    if (planted) {
      a2 = rng.uniform(-1.0, 1.0) * a1 + rng.uniform(-1.0, 1.0) * Matrix(a1 * j * a1 * j * a1);
    } else {
      a2 = aks::random_symmetric(rng, 2 * n);
    }
    auto verdict = aks::involution_commutator(aks::make_quad(a1), aks::make_quad(a2));
    double worst = aks::max_orbit_bracket(osc, a1, a2, rng, 20, {-2.0, 1.0, 3.0});
    REQUIRE(verdict.commute == (worst <= 1e-9));
  }
}

TEST_CASE("derivations of the shifted structure correspond to symmetric matrices") {
  aks::Rng rng(110);
  const int n = 2;
  Matrix s = aks::random_symmetric(rng, 2 * n);
  Matrix d = aks::derivation_from_symmetric(s);
  auto check = aks::is_derivation(d);
  REQUIRE(check.ok);
  REQUIRE(check.residual <= 1e-14);
  // The round trip is exact.
  REQUIRE(aks::max_norm(Matrix(aks::symmetric_from_derivation(d) - s)) == 0.0);

  // The derivation property against the heisenberg cocycle: the standard
  // symplectic pairing is infinitesimally preserved.
  Matrix j = aks::symplectic_j(n);
  Matrix cocycle = d.transpose() * j + j * d;
  REQUIRE(aks::max_norm(cocycle) <= 1e-14);

  // Planted non-derivations are rejected.
  Matrix bad = Matrix::Zero(2 * n, 2 * n);
  bad(0, 1) = 1.0;
  auto rej = aks::is_derivation(bad);
  REQUIRE_FALSE(rej.ok);
  REQUIRE(rej.residual > 0.5);
  REQUIRE_THROWS_AS(aks::symmetric_from_derivation(bad), std::invalid_argument);
  REQUIRE_THROWS_AS(aks::derivation_from_symmetric(bad), std::invalid_argument);
}

TEST_CASE("centralizer_basis frozen dimensions and membership") {
  // A = I, n = 1: only multiples of the identity commute.
  auto h1 = aks::make_quad(Matrix::Identity(2, 2));
  auto basis1 = aks::centralizer_basis(h1);
  REQUIRE(basis1.size() == 1);
  Matrix normalized = basis1[0] / basis1[0](0, 0);
  REQUIRE(aks::max_norm(Matrix(normalized - Matrix::Identity(2, 2))) <= 1e-10);

  // A = I, n = 2: the unitary algebra, dimension n^2 = 4.
  auto h2 = aks::make_quad(Matrix::Identity(4, 4));
  auto basis2 = aks::centralizer_basis(h2);
  REQUIRE(basis2.size() == 4);
  // diag(e_i; e_i) lies in the span for each i.
  Matrix stack(16, 4);
  for (int k = 0; k < 4; ++k) {
    stack.col(k) = Eigen::Map<const Vector>(basis2[k].data(), 16);
  }
  for (int i = 0; i < 2; ++i) {
    Matrix target = Matrix::Zero(4, 4);
    target(i, i) = target(2 + i, 2 + i) = 1.0;
    Vector rhs = Eigen::Map<const Vector>(target.data(), 16);
    Vector sol = stack.colPivHouseholderQr().solve(rhs);
    REQUIRE(aks::max_norm(Vector(stack * sol - rhs)) <= 1e-10);
  }
  // Every element commutes with the hamiltonian.
  for (const auto& s : basis2) {
    REQUIRE(aks::involution_commutator(h2, aks::make_quad(s)).commute);
  }

  // A random hamiltonian always centralizes itself.
  aks::Rng rng(111);
  Matrix a = aks::random_symmetric(rng, 4);
  auto basis = aks::centralizer_basis(aks::make_quad(a));
  REQUIRE(!basis.empty());
  Matrix stack2(16, basis.size());
  for (size_t k = 0; k < basis.size(); ++k) {
    stack2.col(k) = Eigen::Map<const Vector>(basis[k].data(), 16);
  }
  Vector rhs = Eigen::Map<const Vector>(a.data(), 16);
  Vector sol = stack2.colPivHouseholderQr().solve(rhs);
  REQUIRE(aks::max_norm(Vector(stack2 * sol - rhs)) <= 1e-9);
}

TEST_CASE("commuting_family_diagonal builds plane hamiltonians") {
  Matrix a = Matrix::Zero(6, 6);
  a.diagonal() << 1.0, 2.0, 3.0, -1.0, 0.5, 0.0;
  auto family = aks::commuting_family_diagonal(aks::make_quad(a));
  REQUIRE(family.size() == 3);
  REQUIRE(family[0].a(0, 0) == 1.0);
  REQUIRE(family[0].a(3, 3) == -1.0);
  REQUIRE(family[2].a(2, 2) == 3.0);
  REQUIRE(family[2].a(5, 5) == 0.0);
  for (const auto& f : family) {
    REQUIRE(aks::max_norm(Matrix(f.a - f.a.transpose())) == 0.0);
  }
  for (size_t i = 0; i < family.size(); ++i) {
    for (size_t j = i + 1; j < family.size(); ++j) {
      auto r = aks::involution_commutator(family[i], family[j]);
      REQUIRE(r.commute);
      REQUIRE(r.residual == 0.0);
    }
  }

  // n = 1 returns the hamiltonian itself.
  Matrix a1 = Matrix::Zero(2, 2);
  a1.diagonal() << 0.7, -0.2;
  auto tiny = aks::commuting_family_diagonal(aks::make_quad(a1));
  REQUIRE(tiny.size() == 1);
  REQUIRE(aks::max_norm(Matrix(tiny[0].a - a1)) == 0.0);

  // Errors: off-diagonal entries and degenerate planes.
  Matrix off = a;
  off(0, 1) = off(1, 0) = 0.3;
  REQUIRE_THROWS_AS(aks::commuting_family_diagonal(aks::make_quad(off)), std::invalid_argument);
  Matrix degen = Matrix::Zero(4, 4);
  degen.diagonal() << 1.0, 0.0, -1.0, 0.0;
  REQUIRE_THROWS_AS(aks::commuting_family_diagonal(aks::make_quad(degen)), std::invalid_argument);
}

TEST_CASE("quad json input accepts a matrix or diagonal planes") {
  nlohmann::json jm = {{"n", 1}, {"A", {{1.0, 0.25}, {0.25, 2.0}}}};
  auto h = aks::quad_from_json(jm);
  REQUIRE(h.n == 1);
  REQUIRE(h.a(0, 1) == 0.25);

  nlohmann::json jd = {{"alpha", {1.0, 2.0}}, {"beta", {0.5, -1.0}}};
  auto hd = aks::quad_from_json(jd);
  REQUIRE(hd.n == 2);
  REQUIRE(hd.a(1, 1) == 2.0);
  REQUIRE(hd.a(3, 3) == -1.0);
  REQUIRE(aks::max_norm(Matrix(hd.a - Matrix(hd.a.diagonal().asDiagonal()))) == 0.0);

  nlohmann::json jasym = {{"n", 1}, {"A", {{1.0, 0.3}, {0.1, 2.0}}}};
  REQUIRE_THROWS_AS(aks::quad_from_json(jasym), std::invalid_argument);
  nlohmann::json jn = {{"n", 2}, {"A", {{1.0, 0.0}, {0.0, 2.0}}}};
  REQUIRE_THROWS_AS(aks::quad_from_json(jn), std::invalid_argument);
  nlohmann::json jmiss = {{"alpha", {1.0, 2.0}}};
  REQUIRE_THROWS_AS(aks::quad_from_json(jmiss), std::invalid_argument);
}
