#pragma once

// Benchmark harness: builds the stochastic Galerkin problem from a flat
// experiment config, runs the requested solver/preconditioner combinations,
// and emits versioned CSV rows and residual histories.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgkit/block_vector.hpp"
#include "sgkit/fem.hpp"
#include "sgkit/gmres.hpp"
#include "sgkit/mean_solver.hpp"
#include "sgkit/mesh.hpp"
#include "sgkit/multi_index.hpp"
#include "sgkit/preconditioners.hpp"
#include "sgkit/random_field.hpp"
#include "sgkit/relaxation.hpp"
#include "sgkit/report.hpp"
#include "sgkit/sg_operator.hpp"
#include "sgkit/triple_product.hpp"

namespace sgkit {

enum class FieldModel { UniformKL, Lognormal };

enum class Method { MB, AGS, AJ, GS_prec, KP, GS_solver, Jacobi_solver };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::MB: return "MB";
    case Method::AGS: return "AGS";
    case Method::AJ: return "AJ";
    case Method::GS_prec: return "GS_prec";
    case Method::KP: return "KP";
    case Method::GS_solver: return "GS_solver";
    case Method::Jacobi_solver: return "Jacobi_solver";
  }
  return "?";
}

inline Method parse_method(const std::string& s) {
  for (Method m : {Method::MB, Method::AGS, Method::AJ, Method::GS_prec, Method::KP,
                   Method::GS_solver, Method::Jacobi_solver})
    if (s == method_name(m)) return m;
  throw std::invalid_argument("unknown method '" + s + "'");
}

inline const char* model_name(FieldModel m) {
  return m == FieldModel::UniformKL ? "uniform" : "lognormal";
}

inline FieldModel parse_model(const std::string& s) {
  if (s == "uniform") return FieldModel::UniformKL;
  if (s == "lognormal") return FieldModel::Lognormal;
  throw std::invalid_argument("unknown field model '" + s + "'");
}

inline std::vector<Method> all_methods() {
  return {Method::MB,  Method::AGS,       Method::AJ,           Method::GS_prec,
          Method::KP,  Method::GS_solver, Method::Jacobi_solver};
}

struct ExperimentConfig {
  FieldModel model = FieldModel::UniformKL;
  int dim = 4;
  int order = 4;
  double sigma = 0.1;
  double L = 1.0;
  // Mean of the input field (g_0 for the lognormal model). Default matches
  // the reference benchmark's coupling under the unit-variance convention.
  double mean = 0.2 * 1.7320508075688772;
  int nx = 32, ny = 32;
  std::array<double, 2> w{1.0, 1.0};
  double tol = 1e-12;
  double inner_tol = 3e-13;
  int max_iter = 2000;   // GMRES
  int max_outer = 2000;  // relaxation sweeps
  int restart = 100;
  int coeff_order = 0;  // PCE coefficient-basis order; 0 means same as `order`
  double drop_tol = 1e-12;
  std::vector<Method> methods = all_methods();
  unsigned long long seed = 0;
  int n_field_samples = 1000;
  bool parallel_sweep = false;
};

/// Fully assembled problem: basis, field, K_i family, operator, factored mean.
struct Problem {
  Mesh mesh;
  MultiIndexBasis basis;
  MultiIndexBasis coeff_basis;  // PCE only
  FieldExpansion field;
  std::shared_ptr<const std::vector<SparseMatrix>> matrices;
  SGOperator op;
  std::unique_ptr<MeanSolver> mean;
  BlockVector rhs;
  double field_min = 0, field_max = 0;
};

inline Problem build_problem(const ExperimentConfig& cfg) {
  Problem p;
  p.mesh = build_mesh(cfg.nx, cfg.ny);
  const PolyFamily family =
      cfg.model == FieldModel::UniformKL ? PolyFamily::Legendre : PolyFamily::Hermite;
  p.basis = build_basis(cfg.dim, cfg.order, family);

  const CovarianceSpec cov{cfg.sigma, cfg.L};
  const KlExpansion2d kl = kl_expand_2d(cov, p.mesh, cfg.dim, cfg.mean);
  TripleProductTensor tensor;
  if (cfg.model == FieldModel::UniformKL) {
    p.field = kl_field(kl, p.mesh);
    tensor = triple_products(p.basis, TensorMode::KL, cfg.dim, cfg.drop_tol);
  } else {
    const int corder = cfg.coeff_order > 0 ? cfg.coeff_order : cfg.order;
    p.coeff_basis = build_basis(cfg.dim, corder, PolyFamily::Hermite);
    p.field = lognormal_pce(kl, p.coeff_basis);
    tensor = triple_products(p.basis, TensorMode::PCE, static_cast<int>(p.coeff_basis.size()) - 1,
                             cfg.drop_tol, &p.coeff_basis);
  }

  KiFamily fam = assemble_ki_family(p.mesh, p.field, cfg.w);
  p.matrices = std::make_shared<const std::vector<SparseMatrix>>(std::move(fam.matrices));
  p.op = SGOperator(p.matrices, std::move(tensor));
  p.mean = std::make_unique<MeanSolver>((*p.matrices)[0], 1.0);
  p.rhs = BlockVector(p.op.n_blocks(), p.op.block_len());
  std::copy(fam.load.begin(), fam.load.end(), p.rhs.block(0).begin());

  const MultiIndexBasis* eval_basis =
      p.field.mode == FieldMode::PCE ? &p.coeff_basis : nullptr;
  const auto range = field_sample_range(p.field, eval_basis, p.mesh, cfg.n_field_samples, cfg.seed);
  p.field_min = range.first;
  p.field_max = range.second;
  return p;
}

struct MethodResult {
  Method method = Method::MB;
  SolveReport report;
  double scaled_time = 0.0;  // wall time / deterministic mean-solve time
  double sol_diff = 0.0;     // relative 2-norm gap to the reference solution
};

struct ResultRow {
  ExperimentConfig config;
  double field_min = 0, field_max = 0;
  double det_time = 0;  // deterministic solve (factor + one solve) seconds
  std::vector<MethodResult> results;

  const MethodResult* find(Method m) const {
    for (const auto& r : results)
      if (r.method == m) return &r;
    return nullptr;
  }
};

namespace detail {

/// Runs one method on an assembled problem, attributing sparse matvecs and
/// inner mean solves from the instrumented counters.
inline MethodResult run_method(Method m, const Problem& p, const ExperimentConfig& cfg,
                               BlockVector& x) {
  MethodResult out;
  out.method = m;
  const GmresOptions gopt{cfg.tol, cfg.max_iter, cfg.restart};
  RelaxConfig rcfg;
  rcfg.tol = cfg.tol;
  rcfg.inner_tol = cfg.inner_tol;
  rcfg.max_outer = cfg.max_outer;
  rcfg.parallel_sweep = cfg.parallel_sweep;

  const std::uint64_t mv0 = p.op.matvec_count();
  const std::uint64_t is0 = p.mean->solve_count();
  std::uint64_t extra_mv = 0;

  switch (m) {
    case Method::MB: {
      MeanBasedPrecond prec(*p.mean);
      out.report = gmres(p.op, p.rhs, x, gopt, &prec);
      break;
    }
    case Method::AGS: {
      ApproxGaussSeidelPrecond prec(p.op, *p.mean);
      out.report = gmres(p.op, p.rhs, x, gopt, &prec);
      extra_mv = prec.first_order_operator().matvec_count();
      break;
    }
    case Method::AJ: {
      ApproxJacobiPrecond prec(p.op, *p.mean);
      out.report = gmres(p.op, p.rhs, x, gopt, &prec);
      extra_mv = prec.first_order_operator().matvec_count();
      break;
    }
    case Method::GS_prec: {
      GaussSeidelPrecond prec(p.op, *p.mean, 1);
      out.report = gmres(p.op, p.rhs, x, gopt, &prec);
      break;
    }
    case Method::KP: {
      KroneckerPrecond prec(p.op, *p.mean);
      out.report = gmres(p.op, p.rhs, x, gopt, &prec);
      break;
    }
    case Method::GS_solver:
      out.report = gauss_seidel_solve(p.op, p.rhs, x, rcfg, *p.mean);
      break;
    case Method::Jacobi_solver:
      out.report = jacobi_solve(p.op, p.rhs, x, rcfg, *p.mean);
      break;
  }
  out.report.matvec_count = p.op.matvec_count() - mv0 + extra_mv;
  out.report.inner_solve_count = p.mean->solve_count() - is0;
  return out;
}

}  // namespace detail

/// Builds the problem, solves with every requested method, and records
/// per-method iteration counts, counters, and the gap to the mean-based
/// GMRES reference solution.
inline ResultRow run_single(const ExperimentConfig& cfg) {
  if (cfg.methods.empty()) throw std::invalid_argument("run_single: methods must be nonempty");
  Problem p = build_problem(cfg);

  ResultRow row;
  row.config = cfg;
  row.field_min = p.field_min;
  row.field_max = p.field_max;

  {  // deterministic baseline: factor the mean matrix and solve once
    const auto t0 = std::chrono::steady_clock::now();
    MeanSolver det((*p.matrices)[0], 1.0);
    std::vector<double> xd(static_cast<std::size_t>(p.op.block_len()));
    det.solve(p.rhs.block(0), xd);
    row.det_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

  // reference solution: mean-based preconditioned GMRES
  BlockVector x_ref(p.op.n_blocks(), p.op.block_len());
  MethodResult ref = detail::run_method(Method::MB, p, cfg, x_ref);
  const double ref_norm = x_ref.norm2();

  for (Method m : cfg.methods) {
    BlockVector x(p.op.n_blocks(), p.op.block_len());
    MethodResult r;
    if (m == Method::MB) {
      r = ref;
      x = x_ref;
    } else {
      r = detail::run_method(m, p, cfg, x);
    }
    BlockVector d = x;
    d.axpy(-1.0, x_ref);
    r.sol_diff = ref_norm > 0 ? d.norm2() / ref_norm : d.norm2();
    r.scaled_time = row.det_time > 0 ? r.report.wall_time_s / row.det_time : 0.0;
    row.results.push_back(std::move(r));
  }
  return row;
}

/// Per-method residual histories for the history subcommand / figures.
inline std::vector<MethodResult> run_history(const ExperimentConfig& cfg) {
  return run_single(cfg).results;
}

enum class SweepAxis { dim, order, sigma };

inline const char* axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::dim: return "dim";
    case SweepAxis::order: return "order";
    case SweepAxis::sigma: return "sigma";
  }
  return "?";
}

inline SweepAxis parse_axis(const std::string& s) {
  if (s == "dim") return SweepAxis::dim;
  if (s == "order") return SweepAxis::order;
  if (s == "sigma") return SweepAxis::sigma;
  throw std::invalid_argument("unknown sweep axis '" + s + "'");
}

/// One run_single per axis value, rows in axis order.
inline std::vector<ResultRow> run_sweep(const ExperimentConfig& base, SweepAxis axis,
                                        const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("run_sweep: values must be nonempty");
  std::vector<ResultRow> rows;
  rows.reserve(values.size());
  for (double v : values) {
    ExperimentConfig cfg = base;
    switch (axis) {
      case SweepAxis::dim: cfg.dim = static_cast<int>(v); break;
      case SweepAxis::order: cfg.order = static_cast<int>(v); break;
      case SweepAxis::sigma: cfg.sigma = v; break;
    }
    rows.push_back(run_single(cfg));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// CSV output (schema v1; numeric fields deterministic except *_time columns)

inline std::string fmt_g17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_result_csv_header(const std::vector<Method>& methods, std::ostream& os) {
  os << "# sgkit-results v1\n";
  os << "model,dim,order,sigma,L,mean,nx,ny,tol,seed,field_min,field_max,det_time";
  for (Method m : methods) {
    const std::string n = method_name(m);
    os << ',' << n << "_time," << n << "_scaled_time," << n << "_iters," << n << "_converged,"
       << n << "_diverged," << n << "_matvecs," << n << "_inner_solves," << n << "_soldiff";
  }
  os << '\n';
}

inline void write_result_csv_row(const ResultRow& row, std::ostream& os) {
  const auto& c = row.config;
  os << model_name(c.model) << ',' << c.dim << ',' << c.order << ',' << fmt_g17(c.sigma) << ','
     << fmt_g17(c.L) << ',' << fmt_g17(c.mean) << ',' << c.nx << ',' << c.ny << ','
     << fmt_g17(c.tol) << ',' << c.seed << ',' << fmt_g17(row.field_min) << ','
     << fmt_g17(row.field_max) << ',' << fmt_g17(row.det_time);
  for (const auto& r : row.results) {
    os << ',' << fmt_g17(r.report.wall_time_s) << ',' << fmt_g17(r.scaled_time) << ','
       << r.report.iterations << ',' << (r.report.converged ? 1 : 0) << ','
       << (r.report.diverged ? 1 : 0) << ',' << r.report.matvec_count << ','
       << r.report.inner_solve_count << ',' << fmt_g17(r.sol_diff);
  }
  os << '\n';
}

inline void write_result_csv(const std::vector<ResultRow>& rows, std::ostream& os) {
  if (rows.empty()) return;
  write_result_csv_header(rows[0].config.methods, os);
  for (const auto& row : rows) write_result_csv_row(row, os);
}

// ---------------------------------------------------------------------------
// flat key=value config files; every key is also a CLI flag of the same name

inline std::vector<Method> parse_method_list(const std::string& s) {
  std::vector<Method> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(parse_method(tok));
  }
  if (out.empty()) throw std::invalid_argument("methods list is empty");
  return out;
}

inline void parse_mesh_spec(const std::string& s, int& nx, int& ny) {
  const auto x = s.find('x');
  if (x == std::string::npos) {
    nx = ny = std::stoi(s);
  } else {
    nx = std::stoi(s.substr(0, x));
    ny = std::stoi(s.substr(x + 1));
  }
}

inline void apply_config_kv(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "model") cfg.model = parse_model(value);
  else if (key == "dim") cfg.dim = std::stoi(value);
  else if (key == "order") cfg.order = std::stoi(value);
  else if (key == "sigma") cfg.sigma = std::stod(value);
  else if (key == "L") cfg.L = std::stod(value);
  else if (key == "mean") cfg.mean = std::stod(value);
  else if (key == "mesh") parse_mesh_spec(value, cfg.nx, cfg.ny);
  else if (key == "w") {
    const auto comma = value.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("w expects 'wx,wy'");
    cfg.w[0] = std::stod(value.substr(0, comma));
    cfg.w[1] = std::stod(value.substr(comma + 1));
  }
  else if (key == "tol") cfg.tol = std::stod(value);
  else if (key == "inner_tol") cfg.inner_tol = std::stod(value);
  else if (key == "max_iter") cfg.max_iter = std::stoi(value);
  else if (key == "max_outer") cfg.max_outer = std::stoi(value);
  else if (key == "restart") cfg.restart = std::stoi(value);
  else if (key == "coeff_order") cfg.coeff_order = std::stoi(value);
  else if (key == "drop_tol") cfg.drop_tol = std::stod(value);
  else if (key == "methods") cfg.methods = parse_method_list(value);
  else if (key == "seed") cfg.seed = std::stoull(value);
  else if (key == "n_field_samples") cfg.n_field_samples = std::stoi(value);
  else if (key == "parallel_sweep") cfg.parallel_sweep = (value == "1" || value == "true");
  else throw std::invalid_argument("unknown config key '" + key + "'");
}

/// Lines of "key = value"; '#' starts a comment; unknown keys are errors.
inline ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
    apply_config_kv(base, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return base;
}

}  // namespace sgkit
