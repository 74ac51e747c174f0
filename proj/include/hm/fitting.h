#pragma once

#include <vector>

// Least-squares line fits used by the scaling-exponent ladders. A "ladder"
// here is a list of (parameter, measurement) pairs spanning several decades;
// the slope of log(measurement) against log(parameter) is the empirical
// exponent, reported with a 95% confidence half-width.

namespace hm {

struct LineFit {
  double intercept = 0;
  double slope = 0;
  double slope_stderr = 0;
  double ci95_halfwidth = 0;  // Student-t 95% half-width for the slope
  double r2 = 0;
  double rms_residual = 0;
  int n = 0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// convenience: slope of log|y| vs log x (entries with y == 0 are skipped)
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace hm
