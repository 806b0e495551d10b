#pragma once

#include <functional>
#include <string>
#include <vector>

#include "aks/linalg.hpp"

namespace aks {

/// Sampled solution of an ODE: states[i] is the state at times[i], with times
/// strictly increasing and times[0] the initial instant.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
};

using VectorField = std::function<Vector(const Vector&)>;

/// Classical fixed-step fourth-order Runge-Kutta. Every step is stored,
/// including t=0; the last step is shortened to land exactly on t_final.
/// Throws as soon as the state stops being finite, naming the time reached.
inline Trajectory integrate_rk4(const VectorField& field, const Vector& x0,
                                double t_final, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_rk4: dt must be positive");
  if (!(t_final >= 0.0)) throw std::invalid_argument("integrate_rk4: t_final must be non-negative");
  if (!x0.allFinite()) throw std::invalid_argument("integrate_rk4: non-finite initial state");

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(x0);
  if (t_final == 0.0) return traj;

  const auto full_steps = static_cast<long>(t_final / dt + 1e-9);
  Vector x = x0;
  double t = 0.0;
  for (long k = 1; t < t_final; ++k) {
    double t_next = k <= full_steps ? static_cast<double>(k) * dt : t_final;
    if (t_next > t_final) t_next = t_final;
    const double h = t_next - t;
    if (h <= 0.0) break;
    const Vector k1 = field(x);
    const Vector k2 = field(x + 0.5 * h * k1);
    const Vector k3 = field(x + 0.5 * h * k2);
    const Vector k4 = field(x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = t_next;
    if (!x.allFinite())
      throw std::runtime_error("integrate_rk4: non-finite state at t=" + std::to_string(t));
    traj.times.push_back(t);
    traj.states.push_back(x);
  }
  return traj;
}

}  // namespace aks
