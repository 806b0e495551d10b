#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "aks/integrate.hpp"

using aks::Vector;

namespace {

Vector rotation(const Vector& v) {
  Vector out(2);
  out << v(1), -v(0);
  return out;
}

double rotation_error(double t_final, double dt) {
  Vector x0(2);
  x0 << 1.0, 0.0;
  auto traj = aks::integrate_rk4(rotation, x0, t_final, dt);
  Vector exact(2);
  exact << std::cos(t_final), -std::sin(t_final);
  return (traj.states.back() - exact).norm();
}

}  // namespace

TEST_CASE("rk4 reproduces the rotation flow closed form") {
  REQUIRE(rotation_error(1.0, 1e-3) <= 1e-8);
  REQUIRE(rotation_error(6.283185307179586, 1e-3) <= 1e-8);
}

TEST_CASE("rk4 is fourth order on the rotation field") {
  double coarse = rotation_error(1.0, 0.1);
  double fine = rotation_error(1.0, 0.05);
  REQUIRE(coarse / fine >= 12.0);
}

TEST_CASE("rk4 trajectory grid") {
  Vector x0(2);
  x0 << 1.0, 0.0;
  auto traj = aks::integrate_rk4(rotation, x0, 0.35, 0.1);
  REQUIRE(traj.times.front() == 0.0);
  REQUIRE(traj.times.back() == 0.35);
  REQUIRE(traj.times.size() == traj.states.size());
  for (std::size_t i = 1; i < traj.times.size(); ++i) {
    REQUIRE(traj.times[i] > traj.times[i - 1]);
  }
  REQUIRE((traj.states.front() - x0).norm() == 0.0);
}

TEST_CASE("rk4 with t_final zero returns the initial state only") {
  Vector x0(1);
  x0 << 2.0;
  auto traj = aks::integrate_rk4([](const Vector& v) { return v; }, x0, 0.0, 0.1);
  REQUIRE(traj.times.size() == 1);
  REQUIRE(traj.times[0] == 0.0);
  REQUIRE(traj.states[0](0) == 2.0);
}

TEST_CASE("rk4 rejects bad parameters") {
  Vector x0(1);
  x0 << 1.0;
  auto id = [](const Vector& v) { return v; };
  REQUIRE_THROWS_AS(aks::integrate_rk4(id, x0, 1.0, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(aks::integrate_rk4(id, x0, 1.0, -0.1), std::invalid_argument);
  REQUIRE_THROWS_AS(aks::integrate_rk4(id, x0, -1.0, 0.1), std::invalid_argument);
}

TEST_CASE("rk4 aborts on finite-time blow-up with the offending time") {
  Vector x0(1);
  x0 << 1.0;
  auto quadratic = [](const Vector& v) {
    Vector out(1);
    out << v(0) * v(0);
    return out;
  };
  // dx/dt = x^2 from x(0)=1 blows up at t=1; integrating past it must throw.
  try {
    aks::integrate_rk4(quadratic, x0, 2.0, 1e-3);
    FAIL("expected a non-finite state error");
  } catch (const std::runtime_error& e) {
    REQUIRE(std::string(e.what()).find("t=") != std::string::npos);
  }
}
