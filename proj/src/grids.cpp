#include "hm/grids.h"

#include <cmath>

namespace hm {

std::vector<double> graded_grid(double ell, double q, double rmin_frac) {
  if (!(ell > 0) || !(q > 1) || !(rmin_frac > 0) || !(rmin_frac < 1))
    throw std::invalid_argument("graded_grid: need ell>0, q>1, 0<rmin_frac<1");
  double rmin = rmin_frac * ell;
  std::vector<double> r;
  // n chosen so that rmin*q^n reaches ell; snap the last node to ell exactly
  size_t n = static_cast<size_t>(std::ceil(std::log(1.0 / rmin_frac) / std::log(q)));
  r.reserve(n + 1);
  for (size_t i = 0; i < n; ++i) r.push_back(rmin * std::pow(q, static_cast<double>(i)));
  r.push_back(ell);
  // remove a next-to-last node that landed too close to the end
  if (r.size() >= 2 && r[r.size() - 2] > ell * (1.0 - 1e-12)) r.erase(r.end() - 2);
  return r;
}

std::vector<double> refine_grid(const std::vector<double>& r) {
  std::vector<double> out;
  out.reserve(2 * r.size());
  for (size_t i = 0; i + 1 < r.size(); ++i) {
    out.push_back(r[i]);
    out.push_back(0.5 * (r[i] + r[i + 1]));
  }
  out.push_back(r.back());
  return out;
}

}  // namespace hm
