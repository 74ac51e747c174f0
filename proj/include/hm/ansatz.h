#pragma once

#include <array>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "hm/bubble.h"
#include "hm/defaults.h"
#include "hm/modulation.h"
#include "hm/vec3.h"

// First approximation around the shrinking bubble and its error budget.
// The ansatz is U + Pi_{U perp}(Phi0 + Z*) + a U where U is the moving
// bubble, Phi0 a nonlocal heat correction driven by the rate path, and Z*
// a slowly relaxing background (caloric) field. This module evaluates the
// raw error of U alone (E0, E1), the corrected error split into four
// components, the tangential part of the linearized operator in three
// equivalent forms, kernel projections over the inner region, the reduced
// rate/rotation system with its matched initial data, the backward center
// correction, the unit-constraint nonlinearity, and the right-hand sides of
// the coupled inner/outer system the construction ultimately solves.

namespace hm {

// ------------------------------------------------------------ family motion

// Snapshot of the moving-bubble parameters at one instant.
struct FamilyState {
  double lambda = 1;
  double lambda_dot = 0;
  double alpha = 0;
  double alpha_dot = 0;
  std::array<double, 2> xi{0, 0};
  std::array<double, 2> xi_dot{0, 0};
  double t = 0;
};

// Rate path p = lambda e^{i alpha} plus a (by default constant) center path.
// drive() is the source fed to the heat correction: -2 pdot for s >= 0 and
// the value frozen at s = 0 (rotation rate dropped) for earlier times.
struct AnsatzPath {
  ParamPath p;
  std::array<double, 2> xi0{0, 0};
  std::array<double, 2> xi_vel{0, 0};

  FamilyState state(double t) const;
  std::array<double, 2> xi(double t) const;
  Cplx drive(double s) const;
  double T() const { return p.T(); }
};

// Base path with matched rate kappa0 and constant rotation gamma0, centered
// at q: p = lambda0(t) e^{i gamma0}, xi = q.
AnsatzPath leading_path(double kappa0, double gamma0, std::array<double, 2> q,
                        double T, const PathGridOptions& opt = {});

// ------------------------------------------------------- ring heat kernel

// k(z,t) = (1 - e^{-z^2/4t})/z^2, the radial kernel of the first angular
// mode of the plane heat equation; k(0+, t) = 1/(4t). The two derived
// combinations are returned in scale-free form as functions of
// zeta = z^2/t:  t*(z k_z) and t*(z k_z - z^2 k_zz); both vanish at
// zeta = 0 and decay like 1/zeta. Series evaluation below zeta = 1/2.
double ring_kernel(double z, double t);
double ring_weight_zkz(double zeta);
double ring_weight_curv(double zeta);

// Int_0^tau k(z, s) ds in closed form (exponential integral); z > 0.
double ring_kernel_antiderivative(double z, double tau);

// History integrals of the drive against the kernel weights:
//   I_g = Int_{-T}^t drive(s) g(z^2/(t-s)) ds/(t-s),
// g in {K, zkz, curv}. Log-resolved adaptive quadrature split at s = 0.
struct RingMoments {
  Cplx k{0, 0};
  Cplx zkz{0, 0};
  Cplx curv{0, 0};
};
RingMoments ring_moments(const AnsatzPath& path, double z, double t,
                         double tol = 1e-9);

// psi0(z,t) = Int_{-T}^t drive(s) k(z, t-s) ds (the k-moment above).
Cplx duhamel_psi0(const AnsatzPath& path, double z, double t,
                  double tol = 1e-9);

// phi0(x,t) = r e^{i theta} psi0(sqrt(r^2 + lambda(t)^2), t).
Cplx phi0_field(const AnsatzPath& path, double r, double theta, double t,
                double tol = 1e-9);

// Heat residual of the correction field: -d_t Phi0 + Lap Phi0 = R0 + R1
// with R0 carrying the instantaneous-drive and scale-mismatch parts and R1
// the center/scale drift parts. Plane components of 3-vectors (third = 0).
struct HeatResidual {
  Cplx R0{0, 0};
  Cplx R1{0, 0};
};
HeatResidual phi0_heat_residual(const AnsatzPath& path,
                                std::array<double, 2> x, double t,
                                double tol = 1e-9);

// --------------------------------------------------------------- background

// Slowly relaxing far field: plane part z* = z1 + i z2 and vertical part z3,
// with analytic first derivatives. dz = (d/dx1 - i d/dx2) z* packs
// div + i curl; dz_conj = (d/dx1 + i d/dx2) z* is its mode-2 companion.
struct BackgroundField {
  std::function<Cplx(std::array<double, 2>, double)> plane;
  std::function<double(std::array<double, 2>, double)> vertical;
  std::function<Cplx(std::array<double, 2>, double)> dz;
  std::function<Cplx(std::array<double, 2>, double)> dz_conj;
  std::function<std::array<double, 2>(std::array<double, 2>, double)>
      grad_vertical;
};

// z*(x,t) = scale * (x - q0) A (row vector times matrix), vertical part 0.
// Static and harmonic, hence an exact caloric field. Requires tr A < 0 and
// det A != 0 (throws std::domain_error("inadmissible-background") else).
BackgroundField linear_background(std::array<double, 2> q0,
                                  std::array<std::array<double, 2>, 2> A,
                                  double scale = 0.1);

// Matched initial rate and rotation from the background divergence and curl
// at the seed zero: kappa0 = hypot(div, curl) and gamma0 such that
// kappa0 = -(div + i curl) e^{-i gamma0} is a positive real identity.
// div >= 0 throws std::domain_error("inadmissible-background").
struct RatePick {
  double kappa0 = 0;
  double gamma0 = 0;
};
RatePick kappa0_gamma0(double div, double curl);

// ------------------------------------------------------------- error fields

enum class ErrorComponent { E0, E1, Estar0, Estar1, Estar2, Estar3 };

// One pointwise sample of an error field: coefficients on the rotated frame
// (Q_alpha E1, Q_alpha E2) at y = (x - xi)/lambda plus the reconstructed
// 3-vector, which is tangent to U by construction.
struct ErrorSample {
  ErrorComponent tag = ErrorComponent::E0;
  double c1 = 0;
  double c2 = 0;
  Vec3 vec;
};

// Raw error of the moving bubble, -U_t = E0 + E1: E0 carries the scale and
// rotation rates, E1 the center drift.
ErrorSample error_E0(const FamilyState& st, std::array<double, 2> x);
ErrorSample error_E1(const FamilyState& st, std::array<double, 2> x);

// d/dt of the moving bubble (analytic), equal to -(E0 + E1).
Vec3 bubble_time_derivative(const FamilyState& st, std::array<double, 2> x);

// --------------------------------------------- tangential linearized pieces

// Smooth 3-vector field of the plane point with analytic first derivatives.
struct SmoothField {
  std::function<Vec3(std::array<double, 2>)> value;
  std::function<std::array<Vec3, 2>(std::array<double, 2>)> grad;
};

// The tangential remainder tilde L_U of the linearization, i.e.
// L_U[Pi_{U perp} Phi] - Pi_{U perp} Lap Phi, in three equivalent forms:
//   polar     -(2/lambda) w_rho [(Phi_r . U) Qa E1 - (1/r)(Phi_theta . U) Qa E2]
//   mode_split the div/curl + vertical-gradient + conjugate split
//   corotational the reduction for fields (f(r) e^{i theta}, 0)
// corotational assumes that special form (centered at xi) and evaluates the
// same expression re-derived from the polar route.
enum class TangentialForm { polar, mode_split, corotational };
Vec3 tildeL_U(const SmoothField& Phi, const FamilyState& st,
              std::array<double, 2> x,
              TangentialForm form = TangentialForm::polar);

// ------------------------------------------------------- corrected error

// Sign variant for the fourth component: the projected drift residual minus
// (Phi0 + Z*).U U_t (subtract, consistent with the expanded displays) or
// plus that product (add).
enum class Estar3Sign { subtract, add };

struct EstarSet {
  ErrorSample e0, e1, e2, e3;
  Vec3 total() const;
};

// The four components of the corrected error at (x, t). Requires t < T and
// lambda(t) > 0; the background must be evaluable at (x, t).
EstarSet estar_components(const AnsatzPath& path, const BackgroundField& bg,
                          std::array<double, 2> x, double t,
                          Estar3Sign sign = Estar3Sign::subtract,
                          double tol = 1e-9);

// |total| * lambda (1 + rho^2): the decay-normalized envelope ratio.
double estar_bound_ratio(const EstarSet& set, double lambda, double rho);

// CSV-ready scan row: component,t,rho,theta,c1,c2,bound_ratio.
struct ErrorScanRow {
  std::string component;
  double t = 0, rho = 0, theta = 0, c1 = 0, c2 = 0, bound_ratio = 0;
};
std::vector<ErrorScanRow> error_scan(const AnsatzPath& path,
                                     const BackgroundField& bg,
                                     const std::vector<double>& times,
                                     const std::vector<double>& rhos,
                                     const std::vector<double>& thetas,
                                     Estar3Sign sign = Estar3Sign::subtract);

// ------------------------------------------------------ kernel projections

// Decaying kernel elements of the linearization at the standard bubble:
// l = 0 the dilation/rotation pair rho w_rho (E1, E2), l = 1 the translation
// pair w_rho (cos E1 + sin E2, -sin E1 + cos E2).
Vec3 kernel_Zlj(int l, int j, const PolarPoint& y);

// c_lj = Int_{B_2R} G . Z_lj dy / Int_{B_2R} chi |Z_lj|^2 dy with the weight
// chi = 1/(1 + |y|). G is any tangent source sampled in polar coordinates.
double project_clj(const std::function<Vec3(const PolarPoint&)>& G, int l,
                   int j, double R, double tol = 1e-9, int n_theta = 32);
double clj_denominator(int l, int j, double R, double tol = 1e-10);

// --------------------------------------------------------- reduced system

// Reduced rate/rotation system at the center: memory term of the path minus
// the rotated background divergence/curl. Both components vanish together
// as t -> T at the matched (kappa0, gamma0).
struct ReducedA {
  double A1 = 0;
  double A2 = 0;
};
ReducedA reduced_A(const ParamPath& p, const BackgroundField& bg,
                   std::array<double, 2> xi, double t, const GammaTable& tab);

// --------------------------------------------------------- center correction

// Space-time 3-vector field with analytic first space derivatives.
struct SpaceTimeField {
  std::function<Vec3(std::array<double, 2>, double)> value;
  std::function<std::array<Vec3, 2>(std::array<double, 2>, double)> grad;
};

struct XiPath {
  std::vector<double> t;
  std::vector<std::array<double, 2>> xi;
  std::vector<std::array<double, 2>> xi_dot;
};

// Backward center correction anchored at xi~(T) = q: the rate is the
// weighted translation-mode moment over B_2R of the vertical-gradient part
// of the drift error, the fourth error component, and the outer-field
// coupling; psi may be null. R(t) = lambda0 scale^{-beta}.
XiPath tilde_xi_path(const AnsatzPath& path, const BackgroundField& bg,
                     const SpaceTimeField* psi, std::array<double, 2> q,
                     double T, int n_nodes = 28,
                     double beta = defaults::beta,
                     Estar3Sign sign = Estar3Sign::subtract,
                     int n_theta = 16, double tol = 1e-7);

// ---------------------------------------------------------- nonlinearity

// Quadratic remainder of the unit-sphere constrained perturbation and the
// normal feedback a = sqrt(1 - |Pi phi|^2) - 1 at one point. phi_total is
// the full (unprojected) perturbation field. Throws
// std::domain_error("perturbation-too-large") when |Pi phi| > 1/2 at x.
// h < 0 selects the default stencil lambda/50.
struct NonlinearSample {
  Vec3 N;
  double a = 0;
};
NonlinearSample nonlinear_terms(const SpaceTimeField& phi_total,
                                const FamilyState& st,
                                std::array<double, 2> x, double t,
                                double h = -1.0);

// Pi_{U perp} phi and the reconstructed unit-length map U + Pi phi + a U.
Vec3 project_tangent(const Vec3& phi, const Vec3& U);
Vec3 constrained_map(const SpaceTimeField& phi_total, const FamilyState& st,
                     std::array<double, 2> x, double t);

// ------------------------------------------------------------ gluing system

// Inner field phi(y, tau) (tangent to omega(y)) and outer field psi(x, t),
// coupled through the cut-off at |y| = R(t) = lambda0 scale^{-beta}.
struct GluingState {
  SpaceTimeField phi;
  SpaceTimeField psi;
  AnsatzPath path;
  double beta = defaults::beta;
  double tau0 = 0;
};

// Inner clock tau(t) = tau0 + Int_0^t ds/lambda(s)^2.
double tau_lambda(const AnsatzPath& path, double t, double tau0 = 0);

// Right-hand-side-minus-time-derivative of the two coupled equations at one
// space-time point, by centered finite differences on the supplied fields.
// For phi = psi = 0 the inner residual is exactly
// lambda^2 Q_{-alpha} Pi_{U perp} (corrected error).
struct GluingResiduals {
  Vec3 inner;
  Vec3 outer;
};
GluingResiduals gluing_residuals(const GluingState& state,
                                 const BackgroundField& bg,
                                 std::array<double, 2> x, double t,
                                 double h = -1.0, double dt = -1.0,
                                 Estar3Sign sign = Estar3Sign::subtract);

}  // namespace hm
