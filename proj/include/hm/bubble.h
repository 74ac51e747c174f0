#pragma once

#include <array>
#include <complex>

#include "hm/grids.h"
#include "hm/vec3.h"

// Geometry of the degree-1 corotational bubble: the profile
//   w(rho) = pi - 2*arctan(rho),
// the harmonic map omega(y) = (e^{i theta} sin w, cos w) from R^2 to S^2, the
// rotation Q_alpha about the vertical axis, the scaled/translated/rotated
// bubble family U_{lambda,xi,alpha}, the tangent frame (E1, E2) along omega,
// the corotational Dirichlet energy, and the steady-state residual of w.
//
// Useful closed forms used throughout:
//   w_rho = -2/(1+rho^2),  sin w = 2 rho/(1+rho^2) = -rho*w_rho,
//   cos w = (rho^2-1)/(1+rho^2),  |grad omega|^2 = 2 w_rho^2.

namespace hm {

struct PolarPoint {
  double rho = 0;    // >= 0
  double theta = 0;  // radians, taken mod 2*pi
};

struct SpherePoint {
  Vec3 p;  // unit vector, |p| = 1 within 1e-12 after construction
};

struct BubbleParams {
  double lambda = 1;              // concentration scale, > 0
  std::array<double, 2> xi{0, 0}; // center in domain coordinates
  double alpha = 0;               // rotation angle
};

struct TangentFrame {
  Vec3 E1, E2;       // orthonormal, both orthogonal to base
  SpherePoint base;  // omega at the evaluation point
};

struct ProfileDerivatives {
  double w_rho;
  double sin_w;
  double cos_w;
};

double profile_w(double rho);
ProfileDerivatives profile_derivatives(double rho);
SpherePoint omega(const PolarPoint& y);
Vec3 rotate_Q(double alpha, const Vec3& v);
SpherePoint rotate_Q(double alpha, const SpherePoint& v);
SpherePoint bubble(const BubbleParams& params, const std::array<double, 2>& x);
TangentFrame frame(const PolarPoint& y);

// 2*pi * integral_0^ell (v_r^2 + sin^2(v)/r^2) r dr on the profile's own grid.
// For v = w(r/lambda) on a domain much larger than lambda this equals 8*pi up
// to O((lambda/ell)^2). (The same map under the E = (1/2)*integral convention
// would carry energy 4*pi; both numbers are reported by the identities run.)
double dirichlet_energy_radial(const RadialProfile& v);

// w_rhorho + w_rho/rho - sin(w)cos(w)/rho^2 with analytic derivatives;
// identically zero in exact arithmetic. rho = 0 is a singular point.
double steady_residual(double rho);

// The two quadrature identities every downstream kernel depends on:
//   integral_0^inf rho^3 w_rho^3 drho   = -2
//   integral_0^inf rho w_rho^2 cos w drho = 0
double integral_rho3_wrho3(double tol = 1e-10);
double integral_rho_wrho2_cosw(double tol = 1e-10);

}  // namespace hm
