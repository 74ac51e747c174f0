#include "hm/bubble.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hm/quadrature.h"

namespace hm {

namespace {
constexpr double kPi = std::numbers::pi;
}

double profile_w(double rho) {
  if (rho < 0) throw std::domain_error("profile_w: rho must be >= 0");
  return kPi - 2.0 * std::atan(rho);
}

ProfileDerivatives profile_derivatives(double rho) {
  if (rho < 0) throw std::domain_error("profile_derivatives: rho must be >= 0");
  const double d = 1.0 + rho * rho;
  return {-2.0 / d, 2.0 * rho / d, (rho * rho - 1.0) / d};
}

SpherePoint omega(const PolarPoint& y) {
  const auto pd = profile_derivatives(y.rho);
  const std::complex<double> dir = std::polar(1.0, y.theta);
  return {Vec3(dir * pd.sin_w, pd.cos_w)};
}

Vec3 rotate_Q(double alpha, const Vec3& v) {
  const double c = std::cos(alpha), s = std::sin(alpha);
  return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

SpherePoint rotate_Q(double alpha, const SpherePoint& v) { return {rotate_Q(alpha, v.p)}; }

SpherePoint bubble(const BubbleParams& params, const std::array<double, 2>& x) {
  if (!(params.lambda > 0)) throw std::invalid_argument("bubble: lambda must be > 0");
  const double dx = (x[0] - params.xi[0]) / params.lambda;
  const double dy = (x[1] - params.xi[1]) / params.lambda;
  const PolarPoint y{std::hypot(dx, dy), std::atan2(dy, dx)};
  return rotate_Q(params.alpha, omega(y));
}

TangentFrame frame(const PolarPoint& y) {
  const auto pd = profile_derivatives(y.rho);
  const std::complex<double> dir = std::polar(1.0, y.theta);
  TangentFrame f;
  f.E1 = Vec3(dir * pd.cos_w, -pd.sin_w);
  f.E2 = Vec3(dir * std::complex<double>(0, 1), 0.0);
  f.base = omega(y);
  return f;
}

double dirichlet_energy_radial(const RadialProfile& v) {
  if (v.size() < 4) throw std::invalid_argument("dirichlet_energy_radial: need >= 4 nodes");
  // midpoint rule per grid cell; the angular part sin^2(v)/r^2 * r stays
  // bounded toward r = 0 because v approaches a multiple of pi there
  double e = 0;
  for (size_t i = 0; i + 1 < v.size(); ++i) {
    const double h = v.r[i + 1] - v.r[i];
    const double rm = 0.5 * (v.r[i] + v.r[i + 1]);
    const double vr = (v.v[i + 1] - v.v[i]) / h;
    const double vm = 0.5 * (v.v[i] + v.v[i + 1]);
    const double s = std::sin(vm);
    e += (vr * vr + s * s / (rm * rm)) * rm * h;
  }
  return 2.0 * kPi * e;
}

double steady_residual(double rho) {
  if (rho == 0) throw std::domain_error("steady_residual: rho = 0 is a singular point");
  const auto pd = profile_derivatives(rho);
  const double d = 1.0 + rho * rho;
  const double w_rhorho = 4.0 * rho / (d * d);
  return w_rhorho + pd.w_rho / rho - pd.sin_w * pd.cos_w / (rho * rho);
}

double integral_rho3_wrho3(double tol) {
  auto f = [](double rho) {
    const double w_rho = -2.0 / (1.0 + rho * rho);
    return rho * rho * rho * w_rho * w_rho * w_rho;
  };
  return integrate_to_inf(f, 0.0, tol);
}

double integral_rho_wrho2_cosw(double tol) {
  auto f = [](double rho) {
    const auto pd = profile_derivatives(rho);
    return rho * pd.w_rho * pd.w_rho * pd.cos_w;
  };
  return integrate_to_inf(f, 0.0, tol);
}

}  // namespace hm
