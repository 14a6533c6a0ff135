// Benchmark CLI for the stochastic Galerkin solver comparisons:
//   sgbench solve    one configuration, all requested methods
//   sgbench sweep    repeat solve along a dim/order/sigma axis
//   sgbench history  per-method residual-history CSVs

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sgkit/sgkit.hpp"

namespace {

struct CliOptions {
  std::string config_file;
  std::vector<std::pair<std::string, std::string>> overrides;  // key/value in flag order
  std::string out;
  std::string axis = "sigma";
  std::string values;
  bool export_matrices = false;
  std::string dump_field;
  std::string export_tensor;
};

void add_config_flags(CLI::App* cmd, CliOptions& opts) {
  cmd->add_option("--config", opts.config_file, "flat key=value config file");
  // every config key doubles as a flag; values are parsed by the same code path
  for (const char* key : {"model", "dim", "order", "sigma", "L", "mean", "mesh", "w", "tol",
                          "inner_tol", "max_iter", "max_outer", "restart", "coeff_order",
                          "drop_tol", "methods", "seed", "n_field_samples", "parallel_sweep"}) {
    const std::string name = std::string("--") + key;
    cmd->add_option_function<std::string>(
        name,
        [&opts, key](const std::string& v) { opts.overrides.emplace_back(key, v); },
        std::string("config key ") + key);
  }
  cmd->add_option("--out", opts.out, "output CSV path (or prefix for history)");
  cmd->add_flag("--export-matrices", opts.export_matrices,
                "dump each K_i in Matrix Market format next to --out");
  cmd->add_option("--dump-field", opts.dump_field, "write the field coefficient CSV here");
  cmd->add_option("--export-tensor", opts.export_tensor, "write the triple-product tensor here");
}

sgkit::ExperimentConfig make_config(const CliOptions& opts) {
  sgkit::ExperimentConfig cfg;
  if (!opts.config_file.empty()) cfg = sgkit::load_config_file(opts.config_file, cfg);
  for (const auto& [key, value] : opts.overrides) sgkit::apply_config_kv(cfg, key, value);
  return cfg;
}

void run_exports(const sgkit::ExperimentConfig& cfg, const CliOptions& opts) {
  if (!opts.export_matrices && opts.dump_field.empty() && opts.export_tensor.empty()) return;
  const sgkit::Problem p = sgkit::build_problem(cfg);
  if (opts.export_matrices) {
    const std::string base = opts.out.empty() ? std::string("sgbench") : opts.out;
    for (int i = 0; i < p.op.n_matrices(); ++i) {
      std::ofstream f(base + "_K" + std::to_string(i) + ".mm");
      p.op.matrix(i).write_matrix_market(f);
    }
  }
  if (!opts.dump_field.empty()) {
    std::ofstream f(opts.dump_field);
    sgkit::write_field_csv(p.field, p.mesh, f);
  }
  if (!opts.export_tensor.empty()) {
    std::ofstream f(opts.export_tensor);
    p.op.tensor().write_text(f);
  }
}

void print_row(const sgkit::ResultRow& row) {
  std::printf("model=%s dim=%d order=%d sigma=%g mesh=%dx%d tol=%g\n",
              sgkit::model_name(row.config.model), row.config.dim, row.config.order,
              row.config.sigma, row.config.nx, row.config.ny, row.config.tol);
  std::printf("field range: [%.6g, %.6g]   deterministic solve: %.3es\n", row.field_min,
              row.field_max, row.det_time);
  std::printf("%-14s %8s %6s %10s %12s %10s %12s %10s\n", "method", "iters", "conv", "time[s]",
              "scaled_time", "matvecs", "inner_solves", "soldiff");
  for (const auto& r : row.results) {
    const char* status = r.report.converged ? "yes" : (r.report.diverged ? "DIV" : "max");
    std::printf("%-14s %8d %6s %10.3e %12.2f %10llu %12llu %10.2e\n",
                sgkit::method_name(r.method), r.report.iterations, status, r.report.wall_time_s,
                r.scaled_time, static_cast<unsigned long long>(r.report.matvec_count),
                static_cast<unsigned long long>(r.report.inner_solve_count), r.sol_diff);
  }
}

std::vector<double> parse_values(const std::string& s) {
  std::vector<double> vals;
  std::string tok;
  std::stringstream ss(s);
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) vals.push_back(std::stod(tok));
  return vals;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic Galerkin solver benchmark"};
  app.require_subcommand(1);

  CliOptions solve_opts, sweep_opts, hist_opts;
  CLI::App* solve = app.add_subcommand("solve", "run one configuration");
  add_config_flags(solve, solve_opts);
  CLI::App* sweep = app.add_subcommand("sweep", "sweep one axis");
  add_config_flags(sweep, sweep_opts);
  sweep->add_option("--axis", sweep_opts.axis, "dim | order | sigma")->required();
  sweep->add_option("--values", sweep_opts.values, "comma-separated axis values")->required();
  CLI::App* hist = app.add_subcommand("history", "residual history per method");
  add_config_flags(hist, hist_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      const auto cfg = make_config(solve_opts);
      const auto row = sgkit::run_single(cfg);
      print_row(row);
      if (!solve_opts.out.empty()) {
        std::ofstream f(solve_opts.out);
        sgkit::write_result_csv({row}, f);
        std::printf("wrote %s\n", solve_opts.out.c_str());
      }
      run_exports(cfg, solve_opts);
    } else if (sweep->parsed()) {
      const auto cfg = make_config(sweep_opts);
      const auto axis = sgkit::parse_axis(sweep_opts.axis);
      const auto values = parse_values(sweep_opts.values);
      const auto rows = sgkit::run_sweep(cfg, axis, values);
      for (const auto& row : rows) print_row(row);
      if (!sweep_opts.out.empty()) {
        std::ofstream f(sweep_opts.out);
        sgkit::write_result_csv(rows, f);
        std::printf("wrote %s\n", sweep_opts.out.c_str());
      }
      run_exports(cfg, sweep_opts);
    } else if (hist->parsed()) {
      const auto cfg = make_config(hist_opts);
      const auto results = sgkit::run_history(cfg);
      const std::string base = hist_opts.out.empty() ? std::string("history") : hist_opts.out;
      int max_iters = 0;
      const sgkit::MethodResult* worst = nullptr;
      for (const auto& r : results) {
        const std::string path = base + "_" + sgkit::method_name(r.method) + ".csv";
        std::ofstream f(path);
        sgkit::write_history_csv(r.report, f);
        std::printf("%-14s iters=%-6d %s -> %s\n", sgkit::method_name(r.method),
                    r.report.iterations,
                    r.report.converged ? "converged" : (r.report.diverged ? "diverged" : "max-iter"),
                    path.c_str());
        if (r.report.iterations >= max_iters) {
          max_iters = r.report.iterations;
          worst = &r;
        }
      }
      if (worst)
        std::printf("most iterations: %s (%d)\n", sgkit::method_name(worst->method), max_iters);
      run_exports(cfg, hist_opts);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
