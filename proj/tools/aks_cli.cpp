// Batch front end: toda and quadratic-hamiltonian trajectory runs with
// invariant-drift reports, pairwise involution verdicts, and the acceptance
// verification suite. All outputs are deterministic in (config, seed, input)
// and written atomically (write to a temp file, then rename). Exit codes:
// 0 success, 2 malformed input or configuration, 3 tolerance or validation
// failure.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "aks/integrate.hpp"
#include "aks/linalg.hpp"
#include "aks/orbit.hpp"
#include "aks/poly2.hpp"
#include "aks/quad_ham.hpp"
#include "aks/rng.hpp"
#include "aks/serialize.hpp"
#include "aks/toda.hpp"
#include "aks/verify.hpp"

namespace {

using aks::Matrix;
using aks::Vector;
using nlohmann::json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open input file " + path);
  return json::parse(in);
}

std::filesystem::path prepare_output_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  std::filesystem::create_directories(p);
  return p;
}

// Evenly spaced sample grid including both endpoints.
std::vector<double> sample_grid(double t_final, int intervals) {
  std::vector<double> grid;
  if (t_final == 0.0) {
    grid.push_back(0.0);
    return grid;
  }
  for (int k = 0; k <= intervals; ++k) {
    grid.push_back(t_final * static_cast<double>(k) / static_cast<double>(intervals));
  }
  return grid;
}

// RK4 states on the grid: each leg is integrated with the configured dt,
// the last substep of a leg shortened to land on the grid point.
std::vector<Vector> rk4_on_grid(const aks::VectorField& field, const Vector& s0,
                                const std::vector<double>& grid, double dt) {
  std::vector<Vector> states;
  states.push_back(s0);
  Vector s = s0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    double leg = grid[k] - grid[k - 1];
    s = aks::integrate_rk4(field, s, leg, dt).states.back();
    states.push_back(s);
  }
  return states;
}

struct TodaOptions {
  int n = 3;
  double t_final = 10.0;
  double dt = 1e-3;
  std::string method = "qr";
  std::uint64_t seed = aks::default_seed;
  std::string input;
  std::string output = ".";
  double tolerance = -1.0;  // resolved per method when negative
};

int run_toda(const TodaOptions& opt) {
  if (!(opt.dt > 0.0)) throw std::invalid_argument("toda: --dt must be positive");
  if (!(opt.t_final >= 0.0)) throw std::invalid_argument("toda: --t-final must be non-negative");

  aks::TodaFlaschka f0;
  if (!opt.input.empty()) {
    f0 = aks::toda_from_json(load_json(opt.input));
  } else {
    f0.a = Vector::Zero(opt.n);
    f0.b = Vector::Constant(opt.n - 1, 0.5);
    if (opt.n < 2) throw std::invalid_argument("toda: --n must be at least 2");
  }
  const int n = static_cast<int>(f0.a.size());
  Matrix l0 = aks::to_lax(f0);
  Vector eig0 = aks::sym_eig(l0);
  std::vector<double> inv0 = aks::toda_invariants(l0, 4);
  double tol = opt.tolerance >= 0.0 ? opt.tolerance : (opt.method == "qr" ? 1e-9 : 1e-6);

  auto grid = sample_grid(opt.t_final, 200);
  std::vector<aks::TodaFlaschka> states;
  if (opt.method == "qr") {
    for (const Matrix& l : aks::solve_toda_qr(l0, grid)) {
      states.push_back(aks::from_lax(l));
    }
  } else {
    Vector s0(2 * n - 1);
    s0 << f0.a, f0.b;
    for (const Vector& s : rk4_on_grid(aks::flaschka_field(n), s0, grid, opt.dt)) {
      states.push_back(aks::TodaFlaschka{s.head(n), s.tail(n - 1)});
    }
  }

  double max_eig_drift = 0.0;
  double max_trace_drift = 0.0;
  std::string csv = "t";
  for (int i = 1; i <= n; ++i) csv += ",a" + std::to_string(i);
  for (int i = 1; i < n; ++i) csv += ",b" + std::to_string(i);
  for (int i = 1; i <= n; ++i) csv += ",eig" + std::to_string(i);
  csv += "\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    Matrix l = aks::to_lax(states[k]);
    Vector eig = aks::sym_eig(l);
    max_eig_drift = std::max(max_eig_drift, aks::max_norm(Matrix(eig - eig0)));
    std::vector<double> inv = aks::toda_invariants(l, 4);
    for (std::size_t q = 0; q < inv.size(); ++q) {
      max_trace_drift = std::max(max_trace_drift, std::abs(inv[q] - inv0[q]));
    }
    csv += fmt17(grid[k]);
    for (int i = 0; i < n; ++i) csv += "," + fmt17(states[k].a(i));
    for (int i = 0; i + 1 < n; ++i) csv += "," + fmt17(states[k].b(i));
    for (int i = 0; i < n; ++i) csv += "," + fmt17(eig(i));
    csv += "\n";
  }

  // Cross-solver agreement on [0, min(1, t_final)], reported informationally.
  double agreement = 0.0;
  if (opt.t_final > 0.0) {
    auto cmp_grid = sample_grid(std::min(1.0, opt.t_final), 10);
    auto qr_states = aks::solve_toda_qr(l0, cmp_grid);
    Vector s0(2 * n - 1);
    s0 << f0.a, f0.b;
    auto rk_states = rk4_on_grid(aks::flaschka_field(n), s0, cmp_grid, opt.dt);
    for (std::size_t k = 0; k < cmp_grid.size(); ++k) {
      aks::TodaFlaschka fq = aks::from_lax(qr_states[k]);
      Vector sq(2 * n - 1);
      sq << fq.a, fq.b;
      agreement = std::max(agreement, aks::max_norm(Matrix(sq - rk_states[k])));
    }
  }

  bool pass = max_eig_drift <= tol && max_trace_drift <= tol;
  json report;
  report["command"] = "toda";
  report["method"] = opt.method;
  report["n"] = n;
  report["t_final"] = opt.t_final;
  report["dt"] = opt.dt;
  report["seed"] = opt.seed;
  report["max_eig_drift"] = max_eig_drift;
  report["max_trace_power_drift"] = max_trace_drift;
  report["solver_agreement"] = agreement;
  report["tolerance"] = tol;
  report["pass"] = pass;

  auto dir = prepare_output_dir(opt.output);
  write_file_atomic(dir / "toda_trajectory.csv", csv);
  write_file_atomic(dir / "toda_report.json", report.dump(2) + "\n");
  std::printf("toda: n=%d method=%s max_eig_drift=%s max_trace_power_drift=%s agreement=%s\n", n,
              opt.method.c_str(), fmt17(max_eig_drift).c_str(), fmt17(max_trace_drift).c_str(),
              fmt17(agreement).c_str());
  return pass ? 0 : 3;
}

struct QuadOptions {
  int n = 1;
  double t_final = 10.0;
  double dt = 1e-3;
  std::string method = "closed";
  std::uint64_t seed = aks::default_seed;
  std::string input;
  std::string output = ".";
  double tolerance = -1.0;
};

int run_quad(const QuadOptions& opt) {
  if (!(opt.dt > 0.0)) throw std::invalid_argument("quad: --dt must be positive");
  if (!(opt.t_final >= 0.0)) throw std::invalid_argument("quad: --t-final must be non-negative");

  aks::QuadHamiltonian h;
  Vector v0;
  if (!opt.input.empty()) {
    json j = load_json(opt.input);
    h = aks::quad_from_json(j);
    if (j.contains("v0")) {
      v0 = aks::detail::json_vector(j, "v0", "quad input");
      if (v0.size() != 2 * h.n) throw std::invalid_argument("quad: v0 size must be 2n");
    }
  } else {
    if (opt.n < 1) throw std::invalid_argument("quad: --n must be at least 1");
    h = aks::make_quad(Matrix::Identity(2 * opt.n, 2 * opt.n));
  }
  if (v0.size() == 0) {
    v0 = Vector::Zero(2 * h.n);
    v0(0) = 1.0;
  }
  double tol = opt.tolerance >= 0.0 ? opt.tolerance : (opt.method == "rk4" ? 1e-6 : 1e-10);
  bool lax_column = opt.method == "qr";

  auto grid = sample_grid(opt.t_final, 200);
  std::vector<Vector> states;
  if (opt.method == "rk4") {
    Matrix k = aks::symplectic_j(h.n) * h.a;
    aks::VectorField field = [k](const Vector& v) { return Vector(k * v); };
    states = rk4_on_grid(field, v0, grid, opt.dt);
  } else if (opt.method == "qr") {
    for (double t : grid) states.push_back(aks::quad_flow_lax(h, v0, t));
  } else {
    for (double t : grid) states.push_back(aks::quad_flow(h, v0, t));
  }

  auto energy = [&h](const Vector& v) { return 0.5 * v.dot(h.a * v); };
  double e0 = energy(v0);
  double scale = 1.0;
  for (const Vector& v : states) scale = std::max(scale, v.squaredNorm());
  double max_energy_drift = 0.0;
  double max_lax_residual = 0.0;

  std::string csv = "t";
  for (int i = 1; i <= h.n; ++i) csv += ",x" + std::to_string(i);
  for (int i = 1; i <= h.n; ++i) csv += ",y" + std::to_string(i);
  csv += ",energy";
  if (lax_column) csv += ",lax_residual";
  csv += "\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double e = energy(states[k]);
    max_energy_drift = std::max(max_energy_drift, std::abs(e - e0) / scale);
    csv += fmt17(grid[k]);
    for (int i = 0; i < 2 * h.n; ++i) csv += "," + fmt17(states[k](i));
    csv += "," + fmt17(e);
    if (lax_column) {
      double r = aks::max_norm(Matrix(states[k] - aks::quad_flow(h, v0, grid[k])));
      max_lax_residual = std::max(max_lax_residual, r);
      csv += "," + fmt17(r);
    }
    csv += "\n";
  }

  bool pass = max_energy_drift <= tol;
  json report;
  report["command"] = "quad";
  report["method"] = opt.method;
  report["n"] = h.n;
  report["t_final"] = opt.t_final;
  report["dt"] = opt.dt;
  report["seed"] = opt.seed;
  report["max_energy_drift"] = max_energy_drift;
  report["energy_scale"] = scale;
  report["tolerance"] = tol;
  if (lax_column) report["max_lax_residual"] = max_lax_residual;
  report["pass"] = pass;

  auto dir = prepare_output_dir(opt.output);
  write_file_atomic(dir / "quad_trajectory.csv", csv);
  write_file_atomic(dir / "quad_report.json", report.dump(2) + "\n");
  std::printf("quad: n=%d method=%s max_energy_drift=%s%s\n", h.n, opt.method.c_str(),
              fmt17(max_energy_drift).c_str(),
              lax_column ? (" max_lax_residual=" + fmt17(max_lax_residual)).c_str() : "");
  return pass ? 0 : 3;
}

struct InvolutionOptions {
  int n = 3;
  std::uint64_t seed = aks::default_seed;
  std::string input;
  std::string output = ".";
  double tolerance = 1e-9;
};

int run_involution(const InvolutionOptions& opt) {
  std::vector<aks::QuadHamiltonian> hams;
  if (!opt.input.empty()) {
    json j = load_json(opt.input);
    const json* list = nullptr;
    if (j.is_array()) {
      list = &j;
    } else if (j.is_object() && j.contains("matrices") && j.at("matrices").is_array()) {
      list = &j.at("matrices");
    } else {
      throw std::invalid_argument(
          "involution: input must be an array of hamiltonians or {\"matrices\": [...]}");
    }
    for (const auto& entry : *list) hams.push_back(aks::quad_from_json(entry));
    if (hams.empty()) throw std::invalid_argument("involution: empty matrix list");
    for (const auto& h : hams) {
      if (h.n != hams.front().n) {
        throw std::invalid_argument("involution: all matrices must share one dimension");
      }
    }
  } else {
    if (opt.n < 1) throw std::invalid_argument("involution: --n must be at least 1");
    hams = aks::commuting_family_diagonal(
        aks::make_quad(Matrix::Identity(2 * opt.n, 2 * opt.n)));
  }
  const int n = hams.front().n;
  auto osc = aks::build_oscillator(Matrix::Identity(2 * n, 2 * n));
  aks::Rng root(opt.seed);

  json pairs = json::array();
  bool all_agree = true;
  for (std::size_t i = 0; i < hams.size(); ++i) {
    for (std::size_t j = i; j < hams.size(); ++j) {
      auto verdict = aks::involution_commutator(hams[i], hams[j]);
      aks::Rng rng = root.split("pair-" + std::to_string(i) + "-" + std::to_string(j));
      double worst =
          aks::max_orbit_bracket(osc, hams[i].a, hams[j].a, rng, 50, {-2.0, 1.0, 3.0});
      bool by_orbit = worst <= opt.tolerance;
      bool agree = by_orbit == verdict.commute;
      all_agree = all_agree && agree;
      json row;
      row["i"] = i;
      row["j"] = j;
      row["commutator_residual"] = verdict.residual;
      row["max_orbit_bracket"] = worst;
      row["commute_by_commutator"] = verdict.commute;
      row["commute_by_orbit"] = by_orbit;
      row["agree"] = agree;
      pairs.push_back(row);
    }
  }

  json report;
  report["command"] = "involution";
  report["n"] = n;
  report["count"] = hams.size();
  report["seed"] = opt.seed;
  report["orbit_threshold"] = opt.tolerance;
  report["pairs"] = pairs;
  report["all_agree"] = all_agree;

  auto dir = prepare_output_dir(opt.output);
  write_file_atomic(dir / "involution_report.json", report.dump(2) + "\n");
  std::printf("involution: %d hamiltonians, %d pairs, criteria %s\n",
              static_cast<int>(hams.size()),
              static_cast<int>(hams.size() * (hams.size() + 1) / 2),
              all_agree ? "agree on every pair" : "DISAGREE");
  return all_agree ? 0 : 3;
}

struct VerifyOptions {
  std::uint64_t seed = aks::default_seed;
  std::string input;
  std::string output;
};

int run_verify(const VerifyOptions& opt) {
  if (!opt.input.empty()) {
    // Validation mode: check an algebra file instead of running the suite.
    json j;
    try {
      j = load_json(opt.input);
    } catch (const json::exception& e) {
      std::fprintf(stderr, "verify: parse error: %s\n", e.what());
      return 2;
    }
    aks::LieAlgebra g;
    try {
      g = aks::algebra_from_json(j);
    } catch (const std::invalid_argument& e) {
      std::string msg = e.what();
      bool shape_error = msg.rfind("algebra_from_json:", 0) == 0;
      std::fprintf(stderr, "verify: %s\n", msg.c_str());
      return shape_error ? 2 : 3;
    }
    double jac = aks::jacobi_residual(g);
    double adi = aks::ad_invariance_residual(g);
    std::printf("verify: algebra ok, dim=%d jacobi_residual=%s ad_invariance_residual=%s\n",
                g.dim, fmt17(jac).c_str(), fmt17(adi).c_str());
    return 0;
  }

  auto results = aks::run_full_verification(opt.seed);
  std::string table = aks::format_report(results);
  std::fputs(table.c_str(), stdout);
  if (!opt.output.empty()) {
    auto dir = prepare_output_dir(opt.output);
    write_file_atomic(dir / "verify_report.txt", table);
  }
  return aks::all_pass(results) ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adler-kostant-symes toolkit: toda and oscillator flows, involution tests, "
               "verification suite"};
  app.require_subcommand(1);

  TodaOptions toda;
  auto* c_toda = app.add_subcommand("toda", "open toda lattice run with drift report");
  c_toda->add_option("--n", toda.n, "number of particles (ignored with --input)");
  c_toda->add_option("--t-final", toda.t_final, "final time");
  c_toda->add_option("--dt", toda.dt, "rk4 step size");
  c_toda->add_option("--method", toda.method, "solver: qr or rk4")
      ->check(CLI::IsMember({"qr", "rk4"}));
  c_toda->add_option("--seed", toda.seed, "random seed (recorded in the report)");
  c_toda->add_option("--input", toda.input, "initial data json: {a, b} or {x, y}");
  c_toda->add_option("--output", toda.output, "output directory");
  c_toda->add_option("--tolerance", toda.tolerance, "drift bound (default by method)");

  QuadOptions quad;
  auto* c_quad = app.add_subcommand("quad", "quadratic hamiltonian flow with energy report");
  c_quad->add_option("--n", quad.n, "number of degrees of freedom (ignored with --input)");
  c_quad->add_option("--t-final", quad.t_final, "final time");
  c_quad->add_option("--dt", quad.dt, "rk4 step size");
  c_quad->add_option("--method", quad.method, "solver: closed, qr, or rk4")
      ->check(CLI::IsMember({"closed", "qr", "rk4"}));
  c_quad->add_option("--seed", quad.seed, "random seed (recorded in the report)");
  c_quad->add_option("--input", quad.input, "hamiltonian json: {n, A} or {alpha, beta}, "
                                            "optional v0");
  c_quad->add_option("--output", quad.output, "output directory");
  c_quad->add_option("--tolerance", quad.tolerance, "energy drift bound (default by method)");

  InvolutionOptions inv;
  auto* c_inv = app.add_subcommand("involution", "pairwise commutation verdicts");
  c_inv->add_option("--n", inv.n, "size of the default diagonal family (no --input)");
  c_inv->add_option("--seed", inv.seed, "random seed for orbit sampling");
  c_inv->add_option("--input", inv.input, "json array of hamiltonians or {matrices: [...]}");
  c_inv->add_option("--output", inv.output, "output directory");
  c_inv->add_option("--tolerance", inv.tolerance, "orbit bracket threshold");

  VerifyOptions ver;
  auto* c_ver = app.add_subcommand("verify", "run the acceptance suite, or validate an "
                                             "algebra file with --input");
  c_ver->add_option("--seed", ver.seed, "random seed for the suite");
  c_ver->add_option("--input", ver.input, "algebra json to validate instead");
  c_ver->add_option("--output", ver.output, "directory for the report copy");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*c_toda) return run_toda(toda);
    if (*c_quad) return run_quad(quad);
    if (*c_inv) return run_involution(inv);
    return run_verify(ver);
  } catch (const json::exception& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const std::runtime_error& e) {
    std::fprintf(stderr, "runtime error: %s\n", e.what());
    return 3;
  }
}
