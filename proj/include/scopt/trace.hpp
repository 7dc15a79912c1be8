#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace scopt {

// One solver iteration. Fields not meaningful for a given method stay NaN.
struct TraceRow {
  int iter = 0;
  std::string phase;       // "damped", "newton", "path", "cubic", "stage-3", ...
  double f = 0.0;          // objective value at the iterate
  double lambda = 0.0;     // Newton decrement of the working objective
  double residual;         // centering residual (path methods)
  double t;                // path parameter
  double step_norm;        // local norm of the step that produced this iterate
  double wall_s = 0.0;     // seconds since solve start
  TraceRow();
};

struct SolveTrace {
  std::string method;
  std::string status;      // "converged", "iteration-cap", "clamped", ...
  std::vector<TraceRow> rows;
  std::vector<int> stage_boundaries;  // row indices of stage starts (restart schemes)

  int iterations() const { return static_cast<int>(rows.empty() ? 0 : rows.size() - 1); }
  const TraceRow& back() const { return rows.back(); }
  // Writes one row per iteration; volatile wall_s column excluded when
  // deterministic = true.
  void write_csv(std::ostream& os, bool deterministic = false) const;
};

// Locale-independent shortest-roundtrip double formatting used by every CSV
// writer in the toolkit.
std::string format_double(double v);

}  // namespace scopt
