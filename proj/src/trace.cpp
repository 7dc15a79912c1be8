#include "scopt/trace.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace scopt {

TraceRow::TraceRow()
    : residual(std::numeric_limits<double>::quiet_NaN()),
      t(std::numeric_limits<double>::quiet_NaN()),
      step_norm(std::numeric_limits<double>::quiet_NaN()) {}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  // %.17g round-trips every double and is locale-independent for finite
  // values (no grouping, '.' decimal point in the C locale used by snprintf
  // with %g on glibc only when LC_NUMERIC=C; normalize just in case).
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  for (char* p = buf; *p; ++p)
    if (*p == ',') *p = '.';
  return buf;
}

void SolveTrace::write_csv(std::ostream& os, bool deterministic) const {
  os << "iter,phase,f,lambda,residual,t,step_norm";
  if (!deterministic) os << ",wall_s";
  os << "\n";
  for (const auto& r : rows) {
    os << r.iter << ',' << r.phase << ',' << format_double(r.f) << ','
       << format_double(r.lambda) << ',' << format_double(r.residual) << ','
       << format_double(r.t) << ',' << format_double(r.step_norm);
    if (!deterministic) os << ',' << format_double(r.wall_s);
    os << "\n";
  }
}

}  // namespace scopt
