#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

#include "aks/linalg.hpp"

namespace aks {

/// Deterministic splittable PRNG built on splitmix64. The stream is a pure
/// function of the seed, so identical seeds reproduce identical draws on any
/// platform; child streams are derived from the seed and a label only, not
/// from how far the parent has been consumed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal (Box-Muller).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  /// Independent child stream identified by label.
  Rng split(std::string_view label) const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : label) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ull;
    }
    return Rng(h ^ (seed_ * 0x9e3779b97f4a7c15ull));
  }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

/// Matrix with independent entries uniform in [-1, 1).
inline Matrix random_matrix(Rng& rng, int rows, int cols) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  return m;
}

inline Vector random_vector(Rng& rng, int n, double lo = -1.0, double hi = 1.0) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.uniform(lo, hi);
  return v;
}

inline Matrix random_symmetric(Rng& rng, int n) {
  Matrix m = random_matrix(rng, n, n);
  Matrix s = 0.5 * (m + m.transpose());
  return s;
}

/// Random symmetric matrix resampled until its smallest singular value is at
/// least min_sv.
inline Matrix random_symmetric_invertible(Rng& rng, int n, double min_sv = 0.05) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Matrix s = random_symmetric(rng, n);
    Eigen::JacobiSVD<Matrix> svd(s);
    if (svd.singularValues().minCoeff() >= min_sv) return s;
  }
  throw std::runtime_error("random_symmetric_invertible: resampling failed");
}

}  // namespace aks
