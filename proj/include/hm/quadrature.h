#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

// Adaptive quadrature helpers. All improper integrals over [0, inf) are split
// at rho = 1 and the tail is mapped by u = 1/rho, so that algebraically
// decaying integrands become regular on (0, 1]; each piece is then handled by
// adaptive 15-point Gauss-Kronrod refinement down to the requested tolerance.

namespace hm {

inline constexpr int kQuadMaxDepth = 15;

template <class F>
double integrate(const F& f, double a, double b, double tol = 1e-10) {
  if (!(b > a)) return 0.0;
  using boost::math::quadrature::gauss_kronrod;
  double err = 0;
  double val = gauss_kronrod<double, 15>::integrate(f, a, b, kQuadMaxDepth, tol, &err);
  return val;
}

// integral of f over [a, infinity); f must decay at least like rho^{-1-eps}
template <class F>
double integrate_to_inf(const F& f, double a, double tol = 1e-10) {
  double split = std::max(a, 1.0);
  double head = integrate(f, a, split, tol);
  auto tail = [&](double u) { double r = 1.0 / u; return f(r) * r * r; };
  // u in (0, 1/split]; the integrand is bounded when f = O(rho^{-2})
  double tail_val = integrate(tail, 0.0, 1.0 / split, tol);
  return head + tail_val;
}

template <class F>
std::complex<double> integrate_c(const F& f, double a, double b, double tol = 1e-10) {
  double re = integrate([&](double s) { return f(s).real(); }, a, b, tol);
  double im = integrate([&](double s) { return f(s).imag(); }, a, b, tol);
  return {re, im};
}

// Composite trapezoid of sampled values on an arbitrary node set.
inline double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("trapezoid: size mismatch");
  double s = 0;
  for (size_t i = 0; i + 1 < x.size(); ++i) s += 0.5 * (y[i] + y[i + 1]) * (x[i + 1] - x[i]);
  return s;
}

}  // namespace hm
