#include "hm/ansatz.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hm/quadrature.h"

namespace hm {

namespace {

constexpr double kPi = 3.14159265358979323846;

// polar data of x relative to the moving center
struct Local {
  double r = 0, theta = 0, rho = 0;
  Cplx eith{1, 0};  // e^{i theta}; theta := 0 at the center itself
};

Local local_frame(const FamilyState& st, const std::array<double, 2>& x) {
  Local lc;
  double d1 = x[0] - st.xi[0], d2 = x[1] - st.xi[1];
  lc.r = std::hypot(d1, d2);
  if (lc.r > 0) {
    lc.theta = std::atan2(d2, d1);
    lc.eith = Cplx(d1 / lc.r, d2 / lc.r);
  }
  lc.rho = lc.r / st.lambda;
  return lc;
}

// d omega / d y_j expressed on the tangent frame; |grad omega|^2 = 2 w_rho^2
std::array<Vec3, 2> grad_omega(const PolarPoint& y) {
  ProfileDerivatives pd = profile_derivatives(y.rho);
  TangentFrame fr = frame(y);
  double c = std::cos(y.theta), s = std::sin(y.theta);
  return {pd.w_rho * (c * fr.E1 + s * fr.E2),
          pd.w_rho * (s * fr.E1 - c * fr.E2)};
}

}  // namespace

// ------------------------------------------------------------ family motion

FamilyState AnsatzPath::state(double t) const {
  FamilyState st;
  st.t = t;
  Cplx pv = p.p_at(t);
  Cplx pd = p.pdot_at(t);
  st.lambda = std::abs(pv);
  if (!(st.lambda > 0))
    throw std::domain_error("ansatz: scale must stay positive");
  st.alpha = std::arg(pv);
  Cplx rel = std::conj(pv) * pd;
  st.lambda_dot = rel.real() / st.lambda;
  st.alpha_dot = rel.imag() / (st.lambda * st.lambda);
  st.xi = xi(t);
  st.xi_dot = xi_vel;
  return st;
}

std::array<double, 2> AnsatzPath::xi(double t) const {
  return {xi0[0] + xi_vel[0] * t, xi0[1] + xi_vel[1] * t};
}

Cplx AnsatzPath::drive(double s) const {
  if (s >= 0) return -2.0 * p.pdot_at(s);
  // history before the start is frozen at the initial radial rate; the
  // rotation rate is dropped so the frozen drive stays along e^{i alpha(0)}
  Cplx p0 = p.p_at(0.0);
  double a0 = std::abs(p0);
  Cplx phase = (a0 > 0) ? p0 / a0 : Cplx(1, 0);
  double ldot0 = (std::conj(phase) * p.pdot_at(0.0)).real();
  return -2.0 * ldot0 * phase;
}

AnsatzPath leading_path(double kappa0, double gamma0, std::array<double, 2> q,
                        double T, const PathGridOptions& opt) {
  if (!(kappa0 > 0)) throw std::domain_error("leading_path: kappa0 must be positive");
  auto grid = std::make_shared<PathGrid>(build_time_grid(T, opt));
  AnsatzPath ap;
  ap.p = p0_path(std::polar(kappa0, gamma0), grid);
  ap.xi0 = q;
  ap.xi_vel = {0, 0};
  return ap;
}

// ------------------------------------------------------- ring heat kernel

double ring_kernel(double z, double t) {
  if (!(t > 0)) throw std::domain_error("ring_kernel: requires t > 0");
  if (z == 0) return 1.0 / (4.0 * t);
  // -expm1 keeps full precision when z^2/4t is small
  return -std::expm1(-z * z / (4.0 * t)) / (z * z);
}

double ring_weight_zkz(double zeta) {
  if (zeta < 0) throw std::domain_error("ring_weight_zkz: zeta < 0");
  if (zeta < 0.5) {
    // sum_{n>=1} (-1)^n n x^n / (2 (n+1)!),  x = zeta/4; leading term -x/4
    double x = zeta / 4.0;
    double fact = 1.0;  // (n+1)! running value, n = 0 -> 1
    double xp = 1.0;
    double sum = 0.0;
    for (int n = 1; n <= 24; ++n) {
      fact *= (n + 1);
      xp *= x;
      double term = ((n % 2) ? -1.0 : 1.0) * n * xp / (2.0 * fact);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return -2.0 * K_kernel(zeta).K + 0.5 * std::exp(-zeta / 4.0);
}

double ring_weight_curv(double zeta) {
  if (zeta < 0) throw std::domain_error("ring_weight_curv: zeta < 0");
  if (zeta < 0.5) {
    // sum_{n>=2} (-1)^{n+1} n(n-1) x^n / (n+1)!,  x = zeta/4; leading -x^2/3
    double x = zeta / 4.0;
    double fact = 2.0;  // (n+1)! running value, n = 1 -> 2
    double xp = x;
    double sum = 0.0;
    for (int n = 2; n <= 26; ++n) {
      fact *= (n + 1);
      xp *= x;
      double term = (((n + 1) % 2) ? -1.0 : 1.0) * n * (n - 1) * xp / fact;
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return -8.0 * K_kernel(zeta).K + std::exp(-zeta / 4.0) * (2.0 + zeta / 4.0);
}

double ring_kernel_antiderivative(double z, double tau) {
  if (!(z > 0)) throw std::domain_error("ring_kernel_antiderivative: z > 0");
  if (!(tau > 0)) return 0.0;
  double x = z * z / (4.0 * tau);
  // Int_0^tau k dz = tau (1-e^{-x})/z^2 + (1/4) E1(x)
  double e1 = -std::expint(-x);
  return -std::expm1(-x) * tau / (z * z) + 0.25 * e1;
}

namespace {

// I[g](z,t) = Int_{-T}^t drive(s) g(z^2/(t-s)) ds/(t-s), resolved in
// u = log(t-s) and split at the drive kink s = 0. The far tail is dropped
// once the kernel suppression reaches e^{-36}.
template <class W>
Cplx history_moment(const AnsatzPath& path, double z, double t, double tol,
                    const W& weight) {
  double T = path.T();
  double u_hi = std::log(t + T);
  double u_lo = std::min(u_hi, std::log(std::max(z * z, 1e-300))) - 36.0;
  auto f = [&](double u) {
    double tau = std::exp(u);
    return path.drive(t - tau) * weight(z * z / tau);
  };
  double u_mid = (t > 0) ? std::log(t) : u_lo;
  if (u_mid > u_lo && u_mid < u_hi)
    return integrate_c(f, u_lo, u_mid, tol) + integrate_c(f, u_mid, u_hi, tol);
  return integrate_c(f, u_lo, u_hi, tol);
}

}  // namespace

RingMoments ring_moments(const AnsatzPath& path, double z, double t,
                         double tol) {
  if (!(z > 0)) throw std::domain_error("ring_moments: requires z > 0");
  RingMoments m;
  m.k = history_moment(path, z, t, tol,
                       [](double zeta) { return K_kernel(zeta).K; });
  m.zkz = history_moment(path, z, t, tol, ring_weight_zkz);
  m.curv = history_moment(path, z, t, tol, ring_weight_curv);
  return m;
}

Cplx duhamel_psi0(const AnsatzPath& path, double z, double t, double tol) {
  if (!(z > 0)) throw std::domain_error("duhamel_psi0: requires z > 0");
  return history_moment(path, z, t, tol,
                        [](double zeta) { return K_kernel(zeta).K; });
}

Cplx phi0_field(const AnsatzPath& path, double r, double theta, double t,
                double tol) {
  double lam = std::abs(path.p.p_at(t));
  double z = std::sqrt(r * r + lam * lam);
  return r * std::polar(1.0, theta) * duhamel_psi0(path, z, t, tol);
}

HeatResidual phi0_heat_residual(const AnsatzPath& path,
                                std::array<double, 2> x, double t,
                                double tol) {
  FamilyState st = path.state(t);
  Local lc = local_frame(st, x);
  double lam = st.lambda;
  double z = std::sqrt(lc.r * lc.r + lam * lam);
  RingMoments m = ring_moments(path, z, t, tol);
  HeatResidual h;
  // scale mismatch between the plane Laplacian and the z-profile kernel
  h.R0 = lc.r * lc.eith *
         (-path.drive(t) / (z * z) + (lam * lam / (z * z * z * z)) * m.curv);
  Cplx xidc{st.xi_dot[0], st.xi_dot[1]};
  double xdx = (x[0] - st.xi[0]) * st.xi_dot[0] +
               (x[1] - st.xi[1]) * st.xi_dot[1];
  h.R1 = xidc * m.k +
         (lc.r / (z * z)) * lc.eith * (xdx - lam * st.lambda_dot) * m.zkz;
  return h;
}

// --------------------------------------------------------------- background

BackgroundField linear_background(std::array<double, 2> q0,
                                  std::array<std::array<double, 2>, 2> A,
                                  double scale) {
  double tr = A[0][0] + A[1][1];
  double det = A[0][0] * A[1][1] - A[0][1] * A[1][0];
  if (!(tr < 0) || det == 0 || !(scale > 0))
    throw std::domain_error("inadmissible-background");
  BackgroundField bg;
  bg.plane = [=](std::array<double, 2> x, double) {
    double d1 = x[0] - q0[0], d2 = x[1] - q0[1];
    return scale * Cplx(d1 * A[0][0] + d2 * A[1][0],
                        d1 * A[0][1] + d2 * A[1][1]);
  };
  bg.vertical = [](std::array<double, 2>, double) { return 0.0; };
  Cplx dz_const = scale * Cplx(tr, A[0][1] - A[1][0]);
  Cplx dzc_const = scale * Cplx(A[0][0] - A[1][1], A[0][1] + A[1][0]);
  bg.dz = [=](std::array<double, 2>, double) { return dz_const; };
  bg.dz_conj = [=](std::array<double, 2>, double) { return dzc_const; };
  bg.grad_vertical = [](std::array<double, 2>, double) {
    return std::array<double, 2>{0, 0};
  };
  return bg;
}

RatePick kappa0_gamma0(double div, double curl) {
  if (!(div < 0)) throw std::domain_error("inadmissible-background");
  RatePick r;
  r.kappa0 = std::hypot(div, curl);
  r.gamma0 = std::atan2(-curl, -div);
  return r;
}

// ------------------------------------------------------------- error fields

namespace {

ErrorSample frame_sample(ErrorComponent tag, double c1, double c2,
                         const Vec3& QE1, const Vec3& QE2) {
  ErrorSample s;
  s.tag = tag;
  s.c1 = c1;
  s.c2 = c2;
  s.vec = c1 * QE1 + c2 * QE2;
  return s;
}

}  // namespace

ErrorSample error_E0(const FamilyState& st, std::array<double, 2> x) {
  Local lc = local_frame(st, x);
  ProfileDerivatives pd = profile_derivatives(lc.rho);
  TangentFrame fr = frame({lc.rho, lc.theta});
  Vec3 QE1 = rotate_Q(st.alpha, fr.E1);
  Vec3 QE2 = rotate_Q(st.alpha, fr.E2);
  double rw = lc.rho * pd.w_rho;
  return frame_sample(ErrorComponent::E0, (st.lambda_dot / st.lambda) * rw,
                      st.alpha_dot * rw, QE1, QE2);
}

ErrorSample error_E1(const FamilyState& st, std::array<double, 2> x) {
  Local lc = local_frame(st, x);
  ProfileDerivatives pd = profile_derivatives(lc.rho);
  TangentFrame fr = frame({lc.rho, lc.theta});
  Vec3 QE1 = rotate_Q(st.alpha, fr.E1);
  Vec3 QE2 = rotate_Q(st.alpha, fr.E2);
  double c = std::cos(lc.theta), s = std::sin(lc.theta);
  double w = pd.w_rho / st.lambda;
  return frame_sample(ErrorComponent::E1,
                      w * (st.xi_dot[0] * c + st.xi_dot[1] * s),
                      w * (st.xi_dot[0] * s - st.xi_dot[1] * c), QE1, QE2);
}

Vec3 bubble_time_derivative(const FamilyState& st, std::array<double, 2> x) {
  return -(error_E0(st, x).vec + error_E1(st, x).vec);
}

// --------------------------------------------- tangential linearized pieces

Vec3 tildeL_U(const SmoothField& Phi, const FamilyState& st,
              std::array<double, 2> x, TangentialForm form) {
  if (!Phi.value || !Phi.grad)
    throw std::invalid_argument("tildeL_U: field and gradient required");
  Local lc = local_frame(st, x);
  if (!(lc.r > 0))
    throw std::domain_error("tildeL_U: evaluation point at the center");
  ProfileDerivatives pd = profile_derivatives(lc.rho);
  TangentFrame fr = frame({lc.rho, lc.theta});
  Vec3 QE1 = rotate_Q(st.alpha, fr.E1);
  Vec3 QE2 = rotate_Q(st.alpha, fr.E2);
  std::array<Vec3, 2> g = Phi.grad(x);
  double c = std::cos(lc.theta), s = std::sin(lc.theta);
  double lam = st.lambda;

  switch (form) {
    case TangentialForm::polar: {
      Vec3 U = rotate_Q(st.alpha, fr.base).p;
      Vec3 Phi_r = c * g[0] + s * g[1];
      Vec3 Phi_th = lc.r * (-s * g[0] + c * g[1]);
      double c1 = -(2.0 / lam) * pd.w_rho * Phi_r.dot(U);
      double c2 = (2.0 / lam) * pd.w_rho * Phi_th.dot(U) / lc.r;
      return c1 * QE1 + c2 * QE2;
    }
    case TangentialForm::mode_split: {
      Cplx d1 = g[0].plane(), d2 = g[1].plane();
      Cplx D = d1 - Cplx(0, 1) * d2;     // div + i curl of the plane part
      Cplx Dbar = d1 + Cplx(0, 1) * d2;  // conjugate-mode companion
      Cplx ema = std::polar(1.0, -st.alpha);
      double rww = lc.rho * pd.w_rho * pd.w_rho;
      Cplx m0 = ema * D;
      Cplx m2 = std::polar(1.0, st.alpha) * std::conj(Dbar) * lc.eith * lc.eith;
      double amp1 = -(2.0 / lam) * pd.w_rho * pd.cos_w;
      double c1 = (rww / lam) * (m0.real() + m2.real()) +
                  amp1 * (g[0].z * c + g[1].z * s);
      double c2 = (rww / lam) * (m0.imag() + m2.imag()) +
                  amp1 * (g[0].z * s - g[1].z * c);
      return c1 * QE1 + c2 * QE2;
    }
    case TangentialForm::corotational: {
      // assumes Phi = (f(r) e^{i theta}, 0) around the same center
      Cplx emth = std::conj(lc.eith);
      Cplx f = emth * Phi.value(x).plane();
      Cplx f_r = emth * (c * g[0] + s * g[1]).plane();
      Cplx ema = std::polar(1.0, -st.alpha);
      double rww = lc.rho * pd.w_rho * pd.w_rho;
      double c1 = (2.0 / lam) * rww * (ema * f_r).real();
      double c2 = (2.0 / lam) * rww * (ema * f).imag() / lc.r;
      return c1 * QE1 + c2 * QE2;
    }
  }
  throw std::invalid_argument("tildeL_U: unknown form");
}

// ------------------------------------------------------- corrected error

namespace {

struct EstarParts {
  ErrorSample e0, e1a, e1b, e2, e3;
};

// All four components at one point given precomputed history moments.
EstarParts estar_eval(const AnsatzPath& path, const BackgroundField& bg,
                      const std::array<double, 2>& x, double t,
                      const FamilyState& st, const RingMoments& m,
                      Estar3Sign sign) {
  (void)path;
  Local lc = local_frame(st, x);
  double lam = st.lambda;
  double z = std::sqrt(lc.r * lc.r + lam * lam);
  ProfileDerivatives pd = profile_derivatives(lc.rho);
  TangentFrame fr = frame({lc.rho, lc.theta});
  Vec3 QE1 = rotate_Q(st.alpha, fr.E1);
  Vec3 QE2 = rotate_Q(st.alpha, fr.E2);
  Vec3 U = rotate_Q(st.alpha, fr.base).p;
  Cplx ema = std::polar(1.0, -st.alpha);
  Cplx Jk = ema * m.k, Jz = ema * m.zkz, Jc = ema * m.curv;
  double rww = lc.rho * pd.w_rho * pd.w_rho;
  double r2z2 = (lc.r * lc.r) / (z * z);
  double c = std::cos(lc.theta), s = std::sin(lc.theta);

  EstarParts parts;

  // rate component: what is left of the scale/rotation error once the
  // nonlocal correction has cancelled the slowly decaying part, plus the
  // corotational action on the correction and the background divergence
  Cplx eDz = ema * bg.dz(x, t);
  double c01 = (rww / lam) * (-st.lambda_dot + 2.0 * Jk.real() +
                              2.0 * r2z2 * Jz.real() + eDz.real()) +
               (rww * pd.cos_w / (4.0 * lam)) * Jc.real();
  double c02 = (rww / lam) * (2.0 * Jk.imag() + eDz.imag()) +
               (rww / (4.0 * lam)) * Jc.imag();
  parts.e0 = frame_sample(ErrorComponent::Estar0, c01, c02, QE1, QE2);

  // translation component: the raw center drift plus the vertical-gradient
  // mode of the background
  double w1 = pd.w_rho / lam;
  parts.e1a = frame_sample(ErrorComponent::Estar1,
                           w1 * (st.xi_dot[0] * c + st.xi_dot[1] * s),
                           w1 * (st.xi_dot[0] * s - st.xi_dot[1] * c), QE1,
                           QE2);
  std::array<double, 2> gz3 = bg.grad_vertical(x, t);
  double amp1 = -(2.0 / lam) * pd.w_rho * pd.cos_w;
  parts.e1b = frame_sample(ErrorComponent::Estar1,
                           amp1 * (gz3[0] * c + gz3[1] * s),
                           amp1 * (gz3[0] * s - gz3[1] * c), QE1, QE2);

  // conjugate-mode component of the background
  Cplx G2 = std::polar(1.0, st.alpha) * std::conj(bg.dz_conj(x, t));
  Cplx b2 = G2 * lc.eith * lc.eith;
  parts.e2 = frame_sample(ErrorComponent::Estar2, (rww / lam) * b2.real(),
                          (rww / lam) * b2.imag(), QE1, QE2);

  // drift residual of the heat correction, projected, plus the normal
  // feedback of the full correction against the moving bubble
  Cplx xidc{st.xi_dot[0], st.xi_dot[1]};
  double xdx = (x[0] - st.xi[0]) * st.xi_dot[0] +
               (x[1] - st.xi[1]) * st.xi_dot[1];
  Cplx R1 = xidc * m.k +
            (lc.r / (z * z)) * lc.eith * (xdx - lam * st.lambda_dot) * m.zkz;
  Vec3 R1v{R1, 0.0};
  Vec3 PiR1 = R1v - R1v.dot(U) * U;
  double phist_U = lc.r * pd.sin_w * Jk.real() +
                   pd.sin_w * (bg.plane(x, t) * ema * std::conj(lc.eith)).real() +
                   bg.vertical(x, t) * pd.cos_w;
  double rw = lc.rho * pd.w_rho;
  Vec3 E0v = ((st.lambda_dot / lam) * rw) * QE1 + (st.alpha_dot * rw) * QE2;
  Vec3 E1v = parts.e1a.vec;
  Vec3 Ut = -(E0v + E1v);
  double sgn = (sign == Estar3Sign::subtract) ? -1.0 : 1.0;
  Vec3 e3v = PiR1 + sgn * phist_U * Ut;
  ErrorSample e3;
  e3.tag = ErrorComponent::Estar3;
  e3.vec = e3v;
  e3.c1 = e3v.dot(QE1);
  e3.c2 = e3v.dot(QE2);
  parts.e3 = e3;
  return parts;
}

ErrorSample merge_e1(const ErrorSample& a, const ErrorSample& b) {
  ErrorSample s;
  s.tag = ErrorComponent::Estar1;
  s.c1 = a.c1 + b.c1;
  s.c2 = a.c2 + b.c2;
  s.vec = a.vec + b.vec;
  return s;
}

}  // namespace

Vec3 EstarSet::total() const { return e0.vec + e1.vec + e2.vec + e3.vec; }

EstarSet estar_components(const AnsatzPath& path, const BackgroundField& bg,
                          std::array<double, 2> x, double t, Estar3Sign sign,
                          double tol) {
  FamilyState st = path.state(t);
  Local lc = local_frame(st, x);
  double z = std::sqrt(lc.r * lc.r + st.lambda * st.lambda);
  RingMoments m = ring_moments(path, z, t, tol);
  EstarParts parts = estar_eval(path, bg, x, t, st, m, sign);
  EstarSet set;
  set.e0 = parts.e0;
  set.e1 = merge_e1(parts.e1a, parts.e1b);
  set.e2 = parts.e2;
  set.e3 = parts.e3;
  return set;
}

double estar_bound_ratio(const EstarSet& set, double lambda, double rho) {
  return set.total().norm() * lambda * (1.0 + rho * rho);
}

std::vector<ErrorScanRow> error_scan(const AnsatzPath& path,
                                     const BackgroundField& bg,
                                     const std::vector<double>& times,
                                     const std::vector<double>& rhos,
                                     const std::vector<double>& thetas,
                                     Estar3Sign sign) {
  std::vector<ErrorScanRow> rows;
  for (double t : times) {
    FamilyState st = path.state(t);
    for (double rho : rhos) {
      double z = st.lambda * std::sqrt(rho * rho + 1.0);
      RingMoments m = ring_moments(path, z, t, 1e-9);
      for (double theta : thetas) {
        std::array<double, 2> x{
            st.xi[0] + st.lambda * rho * std::cos(theta),
            st.xi[1] + st.lambda * rho * std::sin(theta)};
        EstarParts parts = estar_eval(path, bg, x, t, st, m, sign);
        ErrorSample e1 = merge_e1(parts.e1a, parts.e1b);
        auto add = [&](const std::string& name, double c1, double c2,
                       const Vec3& v) {
          rows.push_back({name, t, rho, theta, c1, c2,
                          v.norm() * st.lambda * (1.0 + rho * rho)});
        };
        ErrorSample r0 = error_E0(st, x), r1 = error_E1(st, x);
        add("E0", r0.c1, r0.c2, r0.vec);
        add("E1", r1.c1, r1.c2, r1.vec);
        add("Estar0", parts.e0.c1, parts.e0.c2, parts.e0.vec);
        add("Estar1", e1.c1, e1.c2, e1.vec);
        add("Estar2", parts.e2.c1, parts.e2.c2, parts.e2.vec);
        add("Estar3", parts.e3.c1, parts.e3.c2, parts.e3.vec);
        Vec3 tot = parts.e0.vec + e1.vec + parts.e2.vec + parts.e3.vec;
        add("EstarTotal", parts.e0.c1 + e1.c1 + parts.e2.c1 + parts.e3.c1,
            parts.e0.c2 + e1.c2 + parts.e2.c2 + parts.e3.c2, tot);
      }
    }
  }
  return rows;
}

// ------------------------------------------------------ kernel projections

Vec3 kernel_Zlj(int l, int j, const PolarPoint& y) {
  if ((l != 0 && l != 1) || (j != 1 && j != 2))
    throw std::invalid_argument("kernel_Zlj: l in {0,1}, j in {1,2}");
  ProfileDerivatives pd = profile_derivatives(y.rho);
  TangentFrame fr = frame(y);
  if (l == 0) return (y.rho * pd.w_rho) * (j == 1 ? fr.E1 : fr.E2);
  double c = std::cos(y.theta), s = std::sin(y.theta);
  if (j == 1) return pd.w_rho * (c * fr.E1 + s * fr.E2);
  return pd.w_rho * (-s * fr.E1 + c * fr.E2);
}

double clj_denominator(int l, int j, double R, double tol) {
  if ((l != 0 && l != 1) || (j != 1 && j != 2))
    throw std::invalid_argument("clj_denominator: l in {0,1}, j in {1,2}");
  auto f = [&](double rho) {
    ProfileDerivatives pd = profile_derivatives(rho);
    double zz = pd.w_rho * pd.w_rho * (l == 0 ? rho * rho : 1.0);
    return 2.0 * kPi * zz * rho / (1.0 + rho);
  };
  return integrate(f, 0.0, 2.0 * R, tol);
}

double project_clj(const std::function<Vec3(const PolarPoint&)>& G, int l,
                   int j, double R, double tol, int n_theta) {
  if (!G) throw std::invalid_argument("project_clj: source required");
  auto radial = [&](double rho) {
    double acc = 0;
    for (int k = 0; k < n_theta; ++k) {
      double theta = 2.0 * kPi * (k + 0.5) / n_theta;
      PolarPoint y{rho, theta};
      acc += G(y).dot(kernel_Zlj(l, j, y));
    }
    return rho * acc * (2.0 * kPi / n_theta);
  };
  double num = integrate(radial, 0.0, 2.0 * R, tol);
  return num / clj_denominator(l, j, R, std::min(tol, 1e-10));
}

// --------------------------------------------------------- reduced system

ReducedA reduced_A(const ParamPath& p, const BackgroundField& bg,
                   std::array<double, 2> xi, double t, const GammaTable& tab) {
  double alpha = std::arg(p.p_at(t));
  Cplx rot = std::polar(1.0, -alpha) * bg.dz(xi, t);
  ReducedA out;
  out.A1 = B_reduced(p, t, 1, tab) - rot.real();
  out.A2 = B_reduced(p, t, 2, tab) - rot.imag();
  return out;
}

// --------------------------------------------------------- center correction

XiPath tilde_xi_path(const AnsatzPath& path, const BackgroundField& bg,
                     const SpaceTimeField* psi, std::array<double, 2> q,
                     double T, int n_nodes, double beta, Estar3Sign sign,
                     int n_theta, double tol) {
  if (n_nodes < 3) throw std::invalid_argument("tilde_xi_path: n_nodes >= 3");
  double L = -std::log(T);
  double ell_hi = std::min(L + 12.0, path.p.grid->ell_end() - 0.5);

  // graded radial panels out to 2R, Gauss-Legendre 7 inside each panel
  static const double gl_x[7] = {-0.9491079123427585, -0.7415311855993945,
                                 -0.4058451513773972, 0.0,
                                 0.4058451513773972,  0.7415311855993945,
                                 0.9491079123427585};
  static const double gl_w[7] = {0.1294849661688697, 0.2797053914892767,
                                 0.3818300505051189, 0.4179591836734694,
                                 0.3818300505051189, 0.2797053914892767,
                                 0.1294849661688697};

  XiPath out;
  out.t.resize(n_nodes);
  out.xi.resize(n_nodes);
  out.xi_dot.resize(n_nodes);

  std::vector<std::array<double, 2>> F(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    double ell = L + (ell_hi - L) * i / (n_nodes - 1);
    double t = T - std::exp(-ell);
    out.t[i] = t;
    FamilyState st = path.state(t);
    double lam = st.lambda;
    double R = outer_radius_R(t, T, beta);

    // panel breakpoints: fine near the core, geometric to the cut-off
    std::vector<double> brk{0.0, 0.5, 1.0};
    double b = 2.0;
    while (b < 2.0 * R) {
      brk.push_back(b);
      b *= 2.0;
    }
    brk.push_back(2.0 * R);

    double M1 = 0, M2 = 0;
    for (size_t pnl = 0; pnl + 1 < brk.size(); ++pnl) {
      double h0 = 0.5 * (brk[pnl + 1] - brk[pnl]);
      double mid = 0.5 * (brk[pnl + 1] + brk[pnl]);
      for (int gk = 0; gk < 7; ++gk) {
        double rho = mid + h0 * gl_x[gk];
        if (rho <= 0) continue;
        double z = lam * std::sqrt(rho * rho + 1.0);
        RingMoments m = ring_moments(path, z, t, tol);
        double a1 = 0, a2 = 0;
        for (int k = 0; k < n_theta; ++k) {
          double theta = 2.0 * kPi * (k + 0.5) / n_theta;
          std::array<double, 2> x{st.xi[0] + lam * rho * std::cos(theta),
                                  st.xi[1] + lam * rho * std::sin(theta)};
          EstarParts parts = estar_eval(path, bg, x, t, st, m, sign);
          Vec3 V = rotate_Q(-st.alpha,
                            lam * lam * (parts.e1b.vec + parts.e3.vec));
          if (psi && psi->value) {
            // tangential action of the rotated outer field at bubble scale
            SmoothField q_in;
            double alpha = st.alpha;
            q_in.value = [&, alpha](std::array<double, 2> yy) {
              std::array<double, 2> xx{st.xi[0] + lam * yy[0],
                                       st.xi[1] + lam * yy[1]};
              return rotate_Q(-alpha, psi->value(xx, t));
            };
            if (psi->grad) {
              q_in.grad = [&, alpha](std::array<double, 2> yy) {
                std::array<double, 2> xx{st.xi[0] + lam * yy[0],
                                         st.xi[1] + lam * yy[1]};
                auto gx = psi->grad(xx, t);
                return std::array<Vec3, 2>{lam * rotate_Q(-alpha, gx[0]),
                                           lam * rotate_Q(-alpha, gx[1])};
              };
            } else {
              q_in.grad = [&, alpha](std::array<double, 2> yy) {
                double hh = 0.02;
                std::array<Vec3, 2> g;
                for (int d = 0; d < 2; ++d) {
                  auto yp = yy, ym = yy;
                  yp[d] += hh;
                  ym[d] -= hh;
                  g[d] = (q_in.value(yp) - q_in.value(ym)) / (2.0 * hh);
                }
                return g;
              };
            }
            FamilyState unit;  // standard bubble: lambda 1, centered, alpha 0
            std::array<double, 2> yy{rho * std::cos(theta),
                                     rho * std::sin(theta)};
            V += tildeL_U(q_in, unit, yy, TangentialForm::polar);
          }
          PolarPoint y{rho, theta};
          a1 += V.dot(kernel_Zlj(1, 1, y));
          a2 += V.dot(kernel_Zlj(1, 2, y));
        }
        double wgt = h0 * gl_w[gk] * rho * (2.0 * kPi / n_theta);
        M1 += wgt * a1;
        M2 += wgt * a2;
      }
    }
    double norml = (1.0 + R * R) / (2.0 * kPi);
    F[i] = {norml * M1, norml * M2};
    out.xi_dot[i] = F[i];
  }

  // anchor at the final node and accumulate backward; the tail beyond the
  // last node is negligible (integrand * remaining time -> 0)
  out.xi[n_nodes - 1] = q;
  for (int i = n_nodes - 2; i >= 0; --i) {
    double dt = out.t[i + 1] - out.t[i];
    out.xi[i] = {out.xi[i + 1][0] - 0.5 * dt * (F[i][0] + F[i + 1][0]),
                 out.xi[i + 1][1] - 0.5 * dt * (F[i][1] + F[i + 1][1])};
  }
  return out;
}

// ---------------------------------------------------------- nonlinearity

Vec3 project_tangent(const Vec3& phi, const Vec3& U) {
  return phi - phi.dot(U) * U;
}

namespace {

double normal_feedback(const Vec3& Pi) {
  double q = 1.0 - Pi.dot(Pi);
  if (q < 0) throw std::domain_error("perturbation-too-large");
  return std::sqrt(q) - 1.0;
}

}  // namespace

NonlinearSample nonlinear_terms(const SpaceTimeField& phi_total,
                                const FamilyState& st,
                                std::array<double, 2> x, double t, double h) {
  if (!phi_total.value)
    throw std::invalid_argument("nonlinear_terms: field required");
  if (h <= 0) h = st.lambda / 50.0;
  BubbleParams bp{st.lambda, st.xi, st.alpha};
  auto U_at = [&](const std::array<double, 2>& p) { return bubble(bp, p).p; };
  auto Pi_at = [&](const std::array<double, 2>& p) {
    Vec3 U = U_at(p);
    Vec3 ph = phi_total.value(p, t);
    return ph - ph.dot(U) * U;
  };
  Vec3 Pi0 = Pi_at(x);
  if (Pi0.norm() > 0.5) throw std::domain_error("perturbation-too-large");
  double a0 = normal_feedback(Pi0);

  Vec3 dPi[2], dU[2], dAU[2];
  double da[2];
  for (int j = 0; j < 2; ++j) {
    std::array<double, 2> pts[4] = {x, x, x, x};
    pts[0][j] -= 2 * h;
    pts[1][j] -= h;
    pts[2][j] += h;
    pts[3][j] += 2 * h;
    Vec3 Pi[4], U[4], AU[4];
    double av[4];
    for (int k = 0; k < 4; ++k) {
      Pi[k] = Pi_at(pts[k]);
      U[k] = U_at(pts[k]);
      av[k] = normal_feedback(Pi[k]);
      AU[k] = av[k] * U[k];
    }
    // 4th-order centered first derivative
    dPi[j] = (Pi[0] - 8.0 * Pi[1] + 8.0 * Pi[2] - Pi[3]) / (12.0 * h);
    dU[j] = (U[0] - 8.0 * U[1] + 8.0 * U[2] - U[3]) / (12.0 * h);
    dAU[j] = (AU[0] - 8.0 * AU[1] + 8.0 * AU[2] - AU[3]) / (12.0 * h);
    da[j] = (av[0] - 8.0 * av[1] + 8.0 * av[2] - av[3]) / (12.0 * h);
  }
  double bracket = 0;
  for (int j = 0; j < 2; ++j) {
    bracket += 2.0 * dAU[j].dot(dU[j] + dPi[j]) + 2.0 * dU[j].dot(dPi[j]) +
               dPi[j].dot(dPi[j]) + dAU[j].dot(dAU[j]);
  }
  Vec3 N = bracket * Pi0 - a0 * bubble_time_derivative(st, x);
  for (int j = 0; j < 2; ++j) N += 2.0 * da[j] * dU[j];
  return {N, a0};
}

Vec3 constrained_map(const SpaceTimeField& phi_total, const FamilyState& st,
                     std::array<double, 2> x, double t) {
  BubbleParams bp{st.lambda, st.xi, st.alpha};
  Vec3 U = bubble(bp, x).p;
  Vec3 Pi = project_tangent(phi_total.value(x, t), U);
  double a = normal_feedback(Pi);
  return (1.0 + a) * U + Pi;
}

// ------------------------------------------------------------ gluing system

double tau_lambda(const AnsatzPath& path, double t, double tau0) {
  double T = path.T();
  auto f = [&](double ell) {
    double s = T - std::exp(-ell);
    double lam = std::abs(path.p.p_at(s));
    return std::exp(-ell) / (lam * lam);
  };
  double l0 = -std::log(T);
  double l1 = -std::log(T - t);
  if (t >= 0) return tau0 + integrate(f, l0, l1, 1e-10);
  return tau0 - integrate(f, l1, l0, 1e-10);
}

namespace {

// C^2 transition 1 -> 0 across s in [1, 3/2] (quintic smoothstep)
double eta0(double s) {
  if (s <= 1) return 1;
  if (s >= 1.5) return 0;
  double u = 2.0 * (s - 1.0);
  return 1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
}
double eta0_d(double s) {
  if (s <= 1 || s >= 1.5) return 0;
  double u = 2.0 * (s - 1.0);
  return -2.0 * 30.0 * u * u * (1.0 - u) * (1.0 - u);
}
double eta0_dd(double s) {
  if (s <= 1 || s >= 1.5) return 0;
  double u = 2.0 * (s - 1.0);
  return -4.0 * 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u);
}

struct CutoffData {
  double eta = 0;
  std::array<double, 2> grad{0, 0};
  double lap = 0;
};

double cutoff_value(const AnsatzPath& path, double beta,
                    const std::array<double, 2>& x, double t) {
  FamilyState st = path.state(t);
  double R = outer_radius_R(t, path.T(), beta);
  double r = std::hypot(x[0] - st.xi[0], x[1] - st.xi[1]);
  return eta0(r / (R * st.lambda));
}

CutoffData cutoff_data(const FamilyState& st, double R,
                       const std::array<double, 2>& x) {
  CutoffData cd;
  double w = R * st.lambda;
  double d1 = x[0] - st.xi[0], d2 = x[1] - st.xi[1];
  double r = std::hypot(d1, d2);
  double s = r / w;
  cd.eta = eta0(s);
  if (r > 0) {
    double e1 = eta0_d(s), e2 = eta0_dd(s);
    cd.grad = {e1 * d1 / (r * w), e1 * d2 / (r * w)};
    cd.lap = (e2 + e1 / s) / (w * w);
  }
  return cd;
}

// generic centered FD helpers on a 3-vector field of y (fixed second arg)
template <class F>
std::array<Vec3, 2> fd_grad(const F& f, const std::array<double, 2>& y,
                            double h) {
  std::array<Vec3, 2> g;
  for (int j = 0; j < 2; ++j) {
    auto p2 = y, p1 = y, m1 = y, m2 = y;
    p2[j] += 2 * h;
    p1[j] += h;
    m1[j] -= h;
    m2[j] -= 2 * h;
    g[j] = (f(m2) - 8.0 * f(m1) + 8.0 * f(p1) - f(p2)) / (12.0 * h);
  }
  return g;
}

template <class F>
Vec3 fd_laplacian(const F& f, const std::array<double, 2>& y, double h) {
  Vec3 acc;
  Vec3 center = f(y);
  for (int j = 0; j < 2; ++j) {
    auto p2 = y, p1 = y, m1 = y, m2 = y;
    p2[j] += 2 * h;
    p1[j] += h;
    m1[j] -= h;
    m2[j] -= 2 * h;
    acc += (-f(p2) + 16.0 * f(p1) - 30.0 * center + 16.0 * f(m1) - f(m2)) /
           (12.0 * h * h);
  }
  return acc;
}

}  // namespace

GluingResiduals gluing_residuals(const GluingState& state,
                                 const BackgroundField& bg,
                                 std::array<double, 2> x, double t, double h,
                                 double dt, Estar3Sign sign) {
  const AnsatzPath& path = state.path;
  double T = path.T();
  FamilyState st = path.state(t);
  double lam = st.lambda;
  if (h <= 0) h = lam / 50.0;
  if (dt <= 0) dt = 1e-4 * (T - t);
  double R = outer_radius_R(t, T, state.beta);
  Local lc = local_frame(st, x);
  std::array<double, 2> y{lc.rho * std::cos(lc.theta),
                          lc.rho * std::sin(lc.theta)};
  double tau = tau_lambda(path, t, state.tau0);
  PolarPoint yp{lc.rho, lc.theta};
  ProfileDerivatives pd = profile_derivatives(lc.rho);
  Vec3 om = omega(yp).p;
  std::array<Vec3, 2> gom = grad_omega(yp);
  BubbleParams bp{st.lambda, st.xi, st.alpha};
  Vec3 U = bubble(bp, x).p;
  Vec3 Ut = bubble_time_derivative(st, x);

  bool have_phi = static_cast<bool>(state.phi.value);
  bool have_psi = static_cast<bool>(state.psi.value);

  auto phi_at = [&](const std::array<double, 2>& yy) {
    return have_phi ? state.phi.value(yy, tau) : Vec3{};
  };
  auto psi_at = [&](const std::array<double, 2>& xx) {
    return have_psi ? state.psi.value(xx, t) : Vec3{};
  };

  double hy = 1.0 / 50.0;  // inner-variable stencil
  Vec3 phi0v = phi_at(y);
  std::array<Vec3, 2> dphi{};
  Vec3 lap_phi{};
  Vec3 dphi_dtau{};
  if (have_phi) {
    if (state.phi.grad) {
      auto g = state.phi.grad(y, tau);
      dphi = {g[0], g[1]};
    } else {
      dphi = fd_grad(phi_at, y, hy);
    }
    lap_phi = fd_laplacian(phi_at, y, hy);
    double dta = 1e-3 * (1.0 + std::abs(tau));
    dphi_dtau = (state.phi.value(y, tau + dta) - state.phi.value(y, tau - dta)) /
                (2.0 * dta);
  }

  // corrected error of the ansatz at this point (tangent to U)
  EstarSet es = estar_components(path, bg, x, t, sign, 1e-9);
  Vec3 Etot = es.total();
  Vec3 PiE = Etot - Etot.dot(U) * U;

  GluingResiduals out;

  // inner problem
  {
    double gradsq = 2.0 * pd.w_rho * pd.w_rho;
    Vec3 Lphi = lap_phi + gradsq * phi0v -
                2.0 * (gom[0].dot(dphi[0]) + gom[1].dot(dphi[1])) * om;
    Vec3 rhs = Lphi + lam * lam * rotate_Q(-st.alpha, PiE);
    if (have_psi) {
      Vec3 q0 = rotate_Q(-st.alpha, psi_at(x));
      Vec3 Pq = q0 - q0.dot(om) * om;
      auto q_dot_omega = [&](const std::array<double, 2>& yy) {
        std::array<double, 2> xx{st.xi[0] + lam * yy[0], st.xi[1] + lam * yy[1]};
        PolarPoint ypp{std::hypot(yy[0], yy[1]), std::atan2(yy[1], yy[0])};
        return Vec3{rotate_Q(-st.alpha, psi_at(xx)).dot(omega(ypp).p), 0, 0};
      };
      auto gqo = fd_grad(q_dot_omega, y, hy);
      rhs += gradsq * Pq - 2.0 * (gqo[0].x * gom[0] + gqo[1].x * gom[1]);
    }
    out.inner = rhs - dphi_dtau;
  }

  // outer problem
  {
    CutoffData cd = cutoff_data(st, R, x);
    Vec3 rhs;

    if (have_psi) {
      rhs += fd_laplacian(psi_at, x, h);
      std::array<Vec3, 2> dpsi{};
      if (state.psi.grad) {
        auto g = state.psi.grad(x, t);
        dpsi = {g[0], g[1]};
      } else {
        dpsi = fd_grad(psi_at, x, h);
      }
      // analytic bubble gradient: (1/lambda) Q_alpha d_y omega
      std::array<Vec3, 2> dU{rotate_Q(st.alpha, gom[0]) / lam,
                             rotate_Q(st.alpha, gom[1]) / lam};
      Vec3 psi0 = psi_at(x);
      double gradU2 = 2.0 * pd.w_rho * pd.w_rho / (lam * lam);
      Vec3 coupling = gradU2 * psi0;
      for (int j = 0; j < 2; ++j) {
        double dpsiU = dpsi[j].dot(U) + psi0.dot(dU[j]);
        coupling -= 2.0 * dpsiU * dU[j];
      }
      rhs += (1.0 - cd.eta) * coupling;
      rhs -= psi0.dot(U) * Ut;
    }

    if (have_phi) {
      // time derivative of the cut-off along the moving window
      double deta_dt =
          (cutoff_value(path, state.beta, x, t + dt) -
           cutoff_value(path, state.beta, x, t - dt)) /
          (2.0 * dt);
      Vec3 bracket = cd.lap * phi0v - deta_dt * phi0v;
      bracket += (2.0 / lam) * (cd.grad[0] * dphi[0] + cd.grad[1] * dphi[1]);
      rhs += rotate_Q(st.alpha, bracket);
      // rotation-rate action on the transplanted inner field
      Cplx spin = Cplx(0, st.alpha_dot) * std::polar(1.0, st.alpha) *
                  phi0v.plane();
      rhs += Vec3{spin, 0.0};
      rhs -= (st.lambda_dot / lam) * (y[0] * dphi[0] + y[1] * dphi[1]);
      rhs -= (st.xi_dot[0] * dphi[0] + st.xi_dot[1] * dphi[1]) / lam;
    }

    // full nonlinearity of the constrained perturbation
    SpaceTimeField total;
    total.value = [&](std::array<double, 2> xx, double tt) {
      Local lxx = local_frame(st, xx);
      Vec3 v{phi0_field(path, lxx.r, lxx.theta, tt, 1e-9), 0.0};
      v += Vec3{bg.plane(xx, tt), bg.vertical(xx, tt)};
      if (have_psi) v += state.psi.value(xx, tt);
      if (have_phi) {
        CutoffData cxx = cutoff_data(st, R, xx);
        std::array<double, 2> yy{(xx[0] - st.xi[0]) / lam,
                                 (xx[1] - st.xi[1]) / lam};
        v += cxx.eta * rotate_Q(st.alpha, state.phi.value(yy, tau));
      }
      return v;
    };
    rhs += nonlinear_terms(total, st, x, t, h).N;

    rhs += (1.0 - cd.eta) * PiE;

    if (have_psi) {
      Vec3 dpsi_dt = (state.psi.value(x, t + dt) - state.psi.value(x, t - dt)) /
                     (2.0 * dt);
      rhs -= dpsi_dt;
    }
    out.outer = rhs;
  }

  return out;
}

}  // namespace hm
