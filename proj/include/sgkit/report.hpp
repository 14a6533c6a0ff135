#pragma once

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <vector>

namespace sgkit {

/// Outcome of one solver run. residual_history holds relative residual norms,
/// entry 0 the initial one, so its length is iterations + 1.
struct SolveReport {
  bool converged = false;
  bool diverged = false;
  bool breakdown = false;
  int iterations = 0;
  std::vector<double> residual_history;
  std::uint64_t matvec_count = 0;       // sparse K_i u_j products
  std::uint64_t inner_solve_count = 0;  // mean-matrix triangular solves
  double wall_time_s = 0.0;
};

/// CSV "iter,relres" dump shared by the GMRES and relaxation histories.
inline void write_history_csv(const SolveReport& report, std::ostream& os) {
  os << "# sgkit-results v1\n";
  os << "iter,relres\n";
  char buf[48];
  for (std::size_t i = 0; i < report.residual_history.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g", i, report.residual_history[i]);
    os << buf << '\n';
  }
}

}  // namespace sgkit
