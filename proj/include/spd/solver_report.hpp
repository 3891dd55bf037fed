#pragma once

#include <string>
#include <vector>

namespace spd {

/// One accepted iteration of an iterative solver. The line-search fields
/// record the acceptance test so descent contracts can be audited after the
/// fact: accepted objective <= ls_reference + armijo_c * step * ls_slope.
struct IterationRecord {
  int iter = 0;
  double objective = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
  double wall_ms = 0.0;
  double ls_reference = 0.0;  // nonmonotone window max (SPG) / current value (CG)
  double ls_slope = 0.0;      // directional derivative used by the Armijo test
};

struct SolverReport {
  std::vector<IterationRecord> iterations;
  bool converged = false;
  std::string termination;  // grad_tol | max_iter | line_search_failure | ...
  double total_wall_ms = 0.0;
};

}  // namespace spd
