#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "aks/lie_algebra.hpp"
#include "aks/quad_ham.hpp"
#include "aks/toda.hpp"

namespace aks {

namespace detail {

inline Vector json_vector(const nlohmann::json& j, const char* key, const char* who) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw std::invalid_argument(std::string(who) + ": missing numeric array \"" + key + "\"");
  }
  const auto& arr = j.at(key);
  Vector v(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) {
      throw std::invalid_argument(std::string(who) + ": \"" + key + "\" must hold numbers");
    }
    v(i) = arr[i].get<double>();
  }
  return v;
}

}  // namespace detail

// Toda initial data: either flaschka form {"n", "a", "b"} or phase form
// {"x", "y"}. Phase input is centered before conversion.
inline TodaFlaschka toda_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw std::invalid_argument("toda_from_json: expected a json object");
  }
  if (j.contains("a") || j.contains("b")) {
    TodaFlaschka f;
    f.a = detail::json_vector(j, "a", "toda_from_json");
    f.b = detail::json_vector(j, "b", "toda_from_json");
    if (j.contains("n") && j.at("n").is_number_integer() &&
        j.at("n").get<Eigen::Index>() != f.a.size()) {
      throw std::invalid_argument("toda_from_json: \"n\" disagrees with size(a)");
    }
    detail::validate_flaschka(f, "toda_from_json");
    return f;
  }
  if (j.contains("x") || j.contains("y")) {
    TodaPhase p;
    p.x = detail::json_vector(j, "x", "toda_from_json");
    p.y = detail::json_vector(j, "y", "toda_from_json");
    return flaschka(center(p));
  }
  throw std::invalid_argument("toda_from_json: need either (a, b) or (x, y)");
}

// Quadratic hamiltonian input: either a full matrix {"n", "A"} or diagonal
// plane data {"alpha", "beta"} building A = diag(alpha; beta).
inline QuadHamiltonian quad_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw std::invalid_argument("quad_from_json: expected a json object");
  }
  if (j.contains("A")) {
    if (!j.at("A").is_array()) {
      throw std::invalid_argument("quad_from_json: \"A\" must be a nested array");
    }
    const auto& rows = j.at("A");
    const int m = static_cast<int>(rows.size());
    Matrix a(m, m);
    for (int r = 0; r < m; ++r) {
      if (!rows[r].is_array() || static_cast<int>(rows[r].size()) != m) {
        throw std::invalid_argument("quad_from_json: \"A\" must be square");
      }
      for (int c = 0; c < m; ++c) {
        if (!rows[r][c].is_number()) {
          throw std::invalid_argument("quad_from_json: \"A\" entries must be numbers");
        }
        a(r, c) = rows[r][c].get<double>();
      }
    }
    auto h = make_quad(a);
    if (j.contains("n") && j.at("n").is_number_integer() && j.at("n").get<int>() != h.n) {
      throw std::invalid_argument("quad_from_json: \"n\" disagrees with size(A)");
    }
    return h;
  }
  if (j.contains("alpha") || j.contains("beta")) {
    Vector alpha = detail::json_vector(j, "alpha", "quad_from_json");
    Vector beta = detail::json_vector(j, "beta", "quad_from_json");
    if (alpha.size() != beta.size() || alpha.size() < 1) {
      throw std::invalid_argument("quad_from_json: alpha and beta must have equal nonzero size");
    }
    const int n = static_cast<int>(alpha.size());
    Matrix a = Matrix::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
      a(i, i) = alpha(i);
      a(n + i, n + i) = beta(i);
    }
    return make_quad(a);
  }
  throw std::invalid_argument("quad_from_json: need either \"A\" or (alpha, beta)");
}

// Lie algebras serialize as {"dim", "c", "G", "labels"}: "c" is the flat
// row-major structure constant tensor with c[(i*dim + j)*dim + k] the e_k
// coefficient of [e_i, e_j]; "G" is the nested metric matrix. The matrix
// representation is not serialized.
inline nlohmann::json algebra_to_json(const LieAlgebra& g) {
  nlohmann::json j;
  j["dim"] = g.dim;
  std::vector<double> c;
  c.reserve(static_cast<size_t>(g.dim) * g.dim * g.dim);
  for (int i = 0; i < g.dim; ++i) {
    for (int jj = 0; jj < g.dim; ++jj) {
      for (int k = 0; k < g.dim; ++k) {
        c.push_back(g.ad[i](k, jj));
      }
    }
  }
  j["c"] = c;
  nlohmann::json metric = nlohmann::json::array();
  for (int r = 0; r < g.dim; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int cc = 0; cc < g.dim; ++cc) {
      row.push_back(g.metric(r, cc));
    }
    metric.push_back(row);
  }
  j["G"] = metric;
  j["labels"] = g.labels;
  return j;
}

inline LieAlgebra algebra_from_json(const nlohmann::json& j) {
  const int dim = j.at("dim").get<int>();
  if (dim <= 0) {
    throw std::invalid_argument("algebra_from_json: dim must be positive");
  }
  const auto c = j.at("c").get<std::vector<double>>();
  if (c.size() != static_cast<size_t>(dim) * dim * dim) {
    throw std::invalid_argument("algebra_from_json: expected dim^3 structure constants");
  }
  std::vector<Matrix> ad(dim, Matrix::Zero(dim, dim));
  for (int i = 0; i < dim; ++i) {
    for (int jj = 0; jj < dim; ++jj) {
      for (int k = 0; k < dim; ++k) {
        ad[i](k, jj) = c[(static_cast<size_t>(i) * dim + jj) * dim + k];
      }
    }
  }
  const auto& gj = j.at("G");
  if (!gj.is_array() || gj.size() != static_cast<size_t>(dim)) {
    throw std::invalid_argument("algebra_from_json: G must be a dim x dim array");
  }
  Matrix metric(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const auto& row = gj.at(r);
    if (!row.is_array() || row.size() != static_cast<size_t>(dim)) {
      throw std::invalid_argument("algebra_from_json: G must be a dim x dim array");
    }
    for (int cc = 0; cc < dim; ++cc) {
      metric(r, cc) = row.at(cc).get<double>();
    }
  }
  std::vector<std::string> labels;
  if (j.contains("labels") && !j.at("labels").empty()) {
    labels = j.at("labels").get<std::vector<std::string>>();
  }
  return make_algebra(std::move(ad), std::move(metric), {}, std::move(labels));
}

}  // namespace aks
