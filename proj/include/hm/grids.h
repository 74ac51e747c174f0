#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "hm/defaults.h"

// Graded 1-D grids and sampled radial profiles. Blow-up profiles vary over
// many decades of r, so the standard node layout is geometric:
// r_i = r_min * q^i, clipped to end exactly at the outer radius.

namespace hm {

// Geometric grid on (0, ell]; the first node is rmin_frac*ell, the last is ell.
std::vector<double> graded_grid(double ell, double q = defaults::grid_ratio,
                                double rmin_frac = defaults::grid_rmin_frac);

// Uniformly refine a grid by inserting midpoints (used by convergence ladders).
std::vector<double> refine_grid(const std::vector<double>& r);

// A scalar function sampled on a strictly increasing grid, with linear
// interpolation in between and flat extrapolation outside.
template <class T>
struct SampledProfile {
  std::vector<double> r;
  std::vector<T> v;

  SampledProfile() = default;
  SampledProfile(std::vector<double> r_, std::vector<T> v_) : r(std::move(r_)), v(std::move(v_)) {
    if (r.size() != v.size()) throw std::invalid_argument("SampledProfile: size mismatch");
  }

  size_t size() const { return r.size(); }

  T operator()(double x) const {
    if (r.empty()) throw std::runtime_error("SampledProfile: empty");
    if (x <= r.front()) return v.front();
    if (x >= r.back()) return v.back();
    size_t lo = 0, hi = r.size() - 1;
    while (hi - lo > 1) {
      size_t mid = (lo + hi) / 2;
      (r[mid] <= x ? lo : hi) = mid;
    }
    double t = (x - r[lo]) / (r[lo + 1] - r[lo]);
    return v[lo] * (1.0 - t) + v[lo + 1] * t;
  }
};

using RadialProfile = SampledProfile<double>;

}  // namespace hm
