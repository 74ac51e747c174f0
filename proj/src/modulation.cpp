#include "hm/modulation.h"

#include <boost/math/special_functions/expint.hpp>

#include <algorithm>
#include <cmath>

#include "hm/defaults.h"
#include "hm/fitting.h"
#include "hm/quadrature.h"

namespace hm {

namespace {

double expint_E1(double x) { return boost::math::expint(1, x); }

// ---- local cubic interpolation on an ascending knot set -------------------

int bracket_index(const std::vector<double>& x, double xx) {
  int n = static_cast<int>(x.size());
  int k = static_cast<int>(std::upper_bound(x.begin(), x.end(), xx) - x.begin()) - 1;
  return std::clamp(k, 0, n - 2);
}

template <class Y>
Y cubic_at(const std::vector<double>& x, const std::vector<Y>& y, double xx) {
  int n = static_cast<int>(x.size());
  if (n < 2) return y.empty() ? Y{} : y.front();
  if (n < 4) {  // linear fallback
    int k = bracket_index(x, xx);
    double w = (xx - x[k]) / (x[k + 1] - x[k]);
    return y[k] * (1.0 - w) + y[k + 1] * w;
  }
  int k = bracket_index(x, xx);
  int i0 = std::clamp(k - 1, 0, n - 4);
  Y acc{};
  for (int i = i0; i < i0 + 4; ++i) {
    double li = 1.0;
    for (int j = i0; j < i0 + 4; ++j) {
      if (j == i) continue;
      li *= (xx - x[j]) / (x[i] - x[j]);
    }
    acc += y[i] * li;
  }
  return acc;
}

// ---- adaptive composite Simpson for complex-valued history integrands -----

template <class F>
Cplx simpson_fixed(const F& f, double a, double b, int n) {
  double h = (b - a) / n;
  Cplx s = f(a) + f(b);
  for (int i = 1; i < n; i += 2) s += 4.0 * f(a + i * h);
  for (int i = 2; i < n; i += 2) s += 2.0 * f(a + i * h);
  return s * (h / 3.0);
}

template <class F>
Cplx integrate_log_sub(const F& f, double a, double b, double rel_tol,
                       double abs_floor = 1e-300) {
  if (!(b > a)) return {0.0, 0.0};
  int n = 64;
  Cplx prev = simpson_fixed(f, a, b, n);
  for (n *= 2; n <= (1 << 15); n *= 2) {
    Cplx cur = simpson_fixed(f, a, b, n);
    if (std::abs(cur - prev) <= rel_tol * std::abs(cur) + abs_floor) return cur;
    prev = cur;
  }
  return prev;
}

// per-cell Simpson of a callable sampled between grid knots
template <class F>
Cplx cell_integral(const F& f, double a, double b) {
  double m = 0.5 * (a + b);
  return (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
}

// natural cubic spline moments (second derivatives) via the Thomas algorithm
std::vector<double> spline_moments(const std::vector<double>& x,
                                   const std::vector<double>& y) {
  int n = static_cast<int>(x.size());
  std::vector<double> m(n, 0.0);
  if (n < 3) return m;
  std::vector<double> di(n, 2.0), up(n, 0.0), lo(n, 0.0), rhs(n, 0.0);
  di[0] = di[n - 1] = 1.0;
  for (int i = 1; i + 1 < n; ++i) {
    double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
    lo[i] = h0 / (h0 + h1);
    up[i] = h1 / (h0 + h1);
    rhs[i] = 6.0 / (h0 + h1) *
             ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
  }
  for (int i = 1; i < n; ++i) {
    double w = lo[i] / di[i - 1];
    di[i] -= w * up[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  m[n - 1] = rhs[n - 1] / di[n - 1];
  for (int i = n - 2; i >= 0; --i) m[i] = (rhs[i] - up[i] * m[i + 1]) / di[i];
  return m;
}

double spline_eval(const std::vector<double>& x, const std::vector<double>& y,
                   const std::vector<double>& m, double xx) {
  int k = bracket_index(x, xx);
  double h = x[k + 1] - x[k];
  double A = (x[k + 1] - xx) / h, B = (xx - x[k]) / h;
  return A * y[k] + B * y[k + 1] +
         ((A * A * A - A) * m[k] + (B * B * B - B) * m[k + 1]) * h * h / 6.0;
}

// 2x2 least squares for y ~ c1*f1 + c2*f2
void lsq2(const std::vector<double>& f1, const std::vector<double>& f2,
          const std::vector<double>& y, double* c1, double* c2) {
  double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
  for (size_t i = 0; i < y.size(); ++i) {
    a11 += f1[i] * f1[i];
    a12 += f1[i] * f2[i];
    a22 += f2[i] * f2[i];
    b1 += f1[i] * y[i];
    b2 += f2[i] * y[i];
  }
  double det = a11 * a22 - a12 * a12;
  if (std::abs(det) < 1e-300) {
    *c1 = *c2 = 0;
    return;
  }
  *c1 = (b1 * a22 - b2 * a12) / det;
  *c2 = (a11 * b2 - a12 * b1) / det;
}

}  // namespace

// ------------------------------------------------------------------ kernels

KernelValues K_kernel(double zeta) {
  if (!(zeta >= 0.0)) throw std::domain_error("K_kernel: zeta must be >= 0");
  KernelValues r{};
  if (zeta < 0.1) {
    double z = zeta;
    r.K = 0.25 - z / 32.0 + z * z / 384.0 - z * z * z / 6144.0 +
          z * z * z * z / 122880.0 - z * z * z * z * z / 2949120.0;
    r.K1 = -1.0 / 32.0 + z / 192.0 - z * z / 2048.0 + z * z * z / 30720.0 -
           z * z * z * z / 589824.0;
    r.K2 = 1.0 / 192.0 - z / 1024.0 + z * z / 10240.0 - z * z * z / 147456.0 +
           z * z * z * z / 2752512.0;
    return r;
  }
  double E = std::exp(-0.25 * zeta);
  r.K = (1.0 - E) / zeta;
  r.K1 = 0.25 * E / zeta - (1.0 - E) / (zeta * zeta);
  r.K2 = -E / (16.0 * zeta) - E / (2.0 * zeta * zeta) +
         2.0 * (1.0 - E) / (zeta * zeta * zeta);
  return r;
}

double gamma_j(double tau, int j) {
  if (j != 1 && j != 2) throw std::invalid_argument("gamma_j: j must be 1 or 2");
  if (!(tau >= 0.0)) throw std::domain_error("gamma_j: tau must be >= 0");
  auto f = [&](double rho) {
    double d = 1.0 + rho * rho;
    double w3 = -8.0 * rho * rho * rho / (d * d * d);
    double z = tau * d;
    KernelValues k = K_kernel(z);
    double br = (j == 1) ? (k.K + z * k.K1 * (rho * rho) / d)
                         : (k.K + 0.25 * z * k.K1 - 0.25 * z * z * k.K2);
    return w3 * br;
  };
  return integrate_to_inf(f, 0.0, 1e-11);
}

double gamma_tail_constant(int j) {
  // gamma_j ~ c/tau + d/tau^2; eliminate d with two ladder points
  double t1 = 1e5, t2 = 1e6;
  double g1v = gamma_j(t1, j), g2v = gamma_j(t2, j);
  return (t2 * (t2 * g2v) - t1 * (t1 * g1v)) / (t2 - t1);
}

GammaTable::GammaTable(double tau_min, double tau_max, int pts_per_decade)
    : tau_min_(tau_min), tau_max_(tau_max) {
  raw0_ = gamma_j(0.0, 1);
  ghat0_ = -raw0_;
  int decades = static_cast<int>(std::ceil(std::log10(tau_max / tau_min)));
  int n = decades * pts_per_decade + 1;
  double x0 = std::log(tau_min), x1 = std::log(tau_max);
  for (int i = 0; i < n; ++i) {
    double x = x0 + (x1 - x0) * i / (n - 1);
    x_.push_back(x);
    tau_.push_back(std::exp(x));
  }
  for (int j = 0; j < 2; ++j) {
    y_[j].resize(n);
    for (int i = 0; i < n; ++i) y_[j][i] = -gamma_j(tau_[i], j + 1);
    y2_[j] = spline_moments(x_, y_[j]);
    // near-zero model: ghat - ghat(0) ~ tau (A + B log tau), fitted on the
    // lowest two decades
    std::vector<double> f1, f2, yy;
    for (int i = 0; i < n && tau_[i] <= tau_min * 110.0; ++i) {
      f1.push_back(tau_[i]);
      f2.push_back(tau_[i] * std::log(tau_[i]));
      yy.push_back(y_[j][i] - ghat0_);
    }
    lsq2(f1, f2, yy, &near_a_[j], &near_b_[j]);
    // tail model: ghat ~ c/tau + d/tau^2, fitted on the top two decades
    f1.clear();
    f2.clear();
    yy.clear();
    for (int i = 0; i < n; ++i) {
      if (tau_[i] < tau_max / 110.0) continue;
      f1.push_back(1.0 / tau_[i]);
      f2.push_back(1.0 / (tau_[i] * tau_[i]));
      yy.push_back(y_[j][i]);
    }
    lsq2(f1, f2, yy, &tail_c_[j], &tail_d_[j]);
  }
}

double GammaTable::eval(int j, double tau) const {
  if (!(tau >= 0.0) || tau > 1e280)
    throw std::domain_error("GammaTable: tau outside covered range");
  if (tau < tau_min_) {
    if (tau == 0.0) return ghat0_;
    return ghat0_ + tau * (near_a_[j] + near_b_[j] * std::log(tau));
  }
  if (tau > tau_max_)
    return tail_c_[j] / tau + tail_d_[j] / (tau * tau);
  return spline_eval(x_, y_[j], y2_[j], std::log(tau));
}

double GammaTable::g1(double tau) const { return eval(0, tau); }
double GammaTable::g2(double tau) const { return eval(1, tau); }

std::vector<double> GammaTable::raw_column(int j) const {
  if (j != 1 && j != 2) throw std::invalid_argument("raw_column: j in {1,2}");
  std::vector<double> out(y_[j - 1].size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = -y_[j - 1][i];
  return out;
}

// -------------------------------------------------------------------- paths

Lambda0 lambda0(double t, double T, double kappa) {
  if (!(T > 0.0 && T < 1.0)) throw std::domain_error("lambda0: need 0 < T < 1");
  if (!(t < T)) throw std::domain_error("lambda0: need t < T");
  double L = -std::log(T);
  double ell = -std::log(T - t);
  Lambda0 r{};
  r.value = kappa * L * (std::exp(-ell) / ell - expint_E1(ell));
  r.slope = -kappa * L / (ell * ell);
  return r;
}

double lambda0_scale_at_ell(double ell, double T) {
  return -std::log(T) * std::exp(-ell) / (ell * ell);
}

double lambda0_scale(double t, double T) {
  return lambda0_scale_at_ell(-std::log(T - t), T);
}

double outer_radius_R(double t, double T, double beta) {
  return std::pow(lambda0_scale(t, T), -beta);
}

int PathGrid::index_below(double ell_query) const {
  return bracket_index(ell, ell_query);
}

PathGrid build_time_grid(double T, const PathGridOptions& opt) {
  if (!(T > 0.0 && T < 0.5))
    throw std::domain_error("build_time_grid: need 0 < T < 1/2");
  PathGrid g;
  g.T = T;
  double h = 1.5 * T / opt.n_uniform;
  for (int i = 0; i < opt.n_uniform; ++i) {
    double t = -T + i * h;
    g.t.push_back(t);
    g.ell.push_back(-std::log(T - t));
  }
  double L = -std::log(T);
  double ell = L + std::log(2.0);  // t = T/2
  double ell_end = L + opt.ell_extra;
  while (ell <= ell_end + 1e-12) {
    g.ell.push_back(ell);
    g.t.push_back(T - std::exp(-ell));
    ell += opt.dl;
  }
  return g;
}

ParamPath::ParamPath(std::shared_ptr<const PathGrid> g)
    : grid(std::move(g)),
      q(grid->n(), Cplx{0.0, 0.0}),
      p(grid->n(), Cplx{0.0, 0.0}) {}

void ParamPath::finalize() {
  const auto& ell = grid->ell;
  int n = grid->n();
  double Lend = ell.back();
  // p(t) = -Int_t^T pdot ds = -Int_ell^inf q(l) e^{-l}/l^2 dl
  Cplx tail = -q.back() * (std::exp(-Lend) / Lend - expint_E1(Lend));
  p[n - 1] = tail;
  for (int i = n - 2; i >= 0; --i) {
    double a = ell[i], b = ell[i + 1];
    // exponential-fitted trapezoid: integrand e^{-l} g(l), g interpolated
    // linearly between the endpoint values
    Cplx ga = q[i] / (a * a);
    Cplx gb = q[i + 1] / (b * b);
    Cplx beta = (gb - ga) / (b - a);
    // Int_a^b e^{-l}(alpha + beta l) dl = [-e^{-l}(alpha + beta l + beta)]
    Cplx seg = std::exp(-a) * (ga + beta) - std::exp(-b) * (gb + beta);
    p[i] = p[i + 1] - seg;
  }
}

Cplx ParamPath::pdot_at_ell(double x) const {
  const auto& ell = grid->ell;
  if (x <= ell.front()) return q.front() / (x * x);
  if (x >= ell.back()) return q.back() / (x * x);
  return cubic_at(ell, q, x) / (x * x);
}

Cplx ParamPath::p_at_ell(double x) const {
  const auto& ell = grid->ell;
  if (x >= ell.back())
    return -q.back() * (std::exp(-x) / x - expint_E1(x));
  if (x <= ell.front()) x = ell.front();
  int k = bracket_index(ell, x);
  // integrate within the bracketing cell from the stored right endpoint
  double b = ell[k + 1];
  Cplx ga = q[k] / (ell[k] * ell[k]);
  Cplx gb = q[k + 1] / (b * b);
  Cplx slope = (gb - ga) / (b - ell[k]);
  Cplx gx = ga + slope * (x - ell[k]);
  Cplx seg = std::exp(-x) * (gx + slope) - std::exp(-b) * (gb + slope);
  return p[k + 1] - seg;
}

Cplx ParamPath::pdot_at(double t) const { return pdot_at_ell(-std::log(T() - t)); }
Cplx ParamPath::p_at(double t) const { return p_at_ell(-std::log(T() - t)); }

double ParamPath::dabs_at_ell(double x) const {
  Cplx pp = p_at_ell(x);
  double ab = std::abs(pp);
  if (ab < 1e-280) return 0.0;
  return (pp.real() * pdot_at_ell(x).real() + pp.imag() * pdot_at_ell(x).imag()) / ab;
}

ParamPath p0_path(Cplx kappa, std::shared_ptr<const PathGrid> grid) {
  ParamPath p(std::move(grid));
  double L = -std::log(p.grid->T);
  std::fill(p.q.begin(), p.q.end(), -kappa * L);
  p.finalize();
  return p;
}

PathFn path_fn(const ParamPath& p) {
  return [&p](double ell) { return p.pdot_at_ell(ell); };
}

PathFn const_path_fn(Cplx value) {
  return [value](double) { return value; };
}

// ---------------------------------------------------------------- operators

namespace {

// B0 core keyed on ell_t; Tt = e^{-ell_t}
Cplx b0_core(const PathFn& g, double ell_t, double T, double tol) {
  double Tt = std::exp(-ell_t);
  double lam = lambda0_scale_at_ell(ell_t, T);
  double cut = lam * lam;
  double t_plus_T = 2.0 * T - Tt;
  if (!(t_plus_T > cut)) return {0.0, 0.0};
  double uLo = 2.0 * std::log(lam);
  double uHi = std::log(t_plus_T);
  auto F = [&](double u) { return g(-std::log(Tt + std::exp(u))); };
  return integrate_log_sub(F, uLo, uHi, tol);
}

}  // namespace

Cplx B0_op(const PathFn& g, double t, double T, double tol) {
  if (!(t > -T)) return {0.0, 0.0};
  return b0_core(g, -std::log(T - t), T, tol);
}

Cplx B0_at_T(const ParamPath& p) {
  const auto& ell = p.grid->ell;
  Cplx acc = p.q.back() / ell.back();  // tail with q ~ const: Int q/l^2 = q/L
  auto f = [&](double x) { return p.pdot_at_ell(x); };
  for (int i = 0; i + 1 < p.grid->n(); ++i)
    acc += cell_integral(f, ell[i], ell[i + 1]);
  return acc;
}

namespace {

struct BtildeRaw {
  Cplx far, near;
};

BtildeRaw btilde_core(const ParamPath& p, double ell_t, int j,
                      const GammaTable& tab, double tol) {
  BtildeRaw out{};
  double T = p.T();
  double Tt = std::exp(-ell_t);
  Cplx pt = p.p_at_ell(ell_t);
  double lam_t = std::abs(pt);
  double lam0 = lambda0_scale_at_ell(ell_t, T);
  double cut = lam0 * lam0;
  double t_plus_T = 2.0 * T - Tt;
  if (!(t_plus_T > cut) || lam_t <= 0.0) return out;
  double lt2 = lam_t * lam_t;
  auto ghat = [&](double z) { return (j == 1) ? tab.g1(z) : tab.g2(z); };
  // far: weight 2*ghat - 1, u = log(t-s) from log(cut) to log(t+T)
  auto Ffar = [&](double u) {
    double zeta = lt2 * std::exp(-u);
    return p.pdot_at_ell(-std::log(Tt + std::exp(u))) * (2.0 * ghat(zeta) - 1.0);
  };
  out.far = integrate_log_sub(Ffar, 2.0 * std::log(lam0), std::log(t_plus_T), tol);
  // near: 2 Int_{t-cut}^t pdot ghat(zeta) ds/(t-s), zeta = lt2/(t-s)
  double vLo = std::log(lt2 / cut);
  double vHi = vLo + 42.0;
  auto Fnear = [&](double v) {
    double tminus_s = lt2 * std::exp(-v);
    return 2.0 * p.pdot_at_ell(-std::log(Tt + tminus_s)) * ghat(std::exp(v));
  };
  out.near = integrate_log_sub(Fnear, vLo, vHi, tol);
  double tailc = (j == 1) ? tab.tail1() : tab.tail2();
  out.near += 2.0 * p.pdot_at_ell(ell_t) * tailc * std::exp(-vHi);
  return out;
}

Cplx btilde_full_core(const ParamPath& p, double ell_t, const GammaTable& tab,
                      double tol) {
  Cplx pt = p.p_at_ell(ell_t);
  double ab = std::abs(pt);
  if (ab < 1e-280) return {0.0, 0.0};
  Cplx unit = pt / ab;
  BtildeRaw b1 = btilde_core(p, ell_t, 1, tab, tol);
  BtildeRaw b2 = btilde_core(p, ell_t, 2, tab, tol);
  Cplx s1 = b1.far + b1.near, s2 = b2.far + b2.near;
  double re_part = (std::conj(unit) * s1).real();
  double im_part = (std::conj(unit) * s2).imag();
  return unit * Cplx{re_part, im_part};
}

}  // namespace

BtildeParts Btilde_parts(const ParamPath& p, double t, int j,
                         const GammaTable& tab) {
  if (j != 1 && j != 2)
    throw std::invalid_argument("Btilde_parts: j must be 1 or 2");
  BtildeRaw r = btilde_core(p, -std::log(p.T() - t), j, tab, 1e-8);
  return {r.far, r.near};
}

Cplx Btilde_full(const ParamPath& p, double t, const GammaTable& tab) {
  return btilde_full_core(p, -std::log(p.T() - t), tab, 1e-8);
}

double B_reduced(const ParamPath& p, double t, int j, const GammaTable& tab) {
  if (j != 1 && j != 2)
    throw std::invalid_argument("B_reduced: j must be 1 or 2");
  double T = p.T();
  double ell_t = -std::log(T - t);
  double Tt = std::exp(-ell_t);
  Cplx pt = p.p_at_ell(ell_t);
  double lam_t = std::abs(pt);
  if (lam_t < 1e-280) return 0.0;
  double lam0 = lambda0_scale_at_ell(ell_t, T);
  double cut = lam0 * lam0;
  double lt2 = lam_t * lam_t;
  auto ghat = [&](double z) { return (j == 1) ? tab.g1(z) : tab.g2(z); };
  auto Ffar = [&](double u) {
    double zeta = lt2 * std::exp(-u);
    return p.pdot_at_ell(-std::log(Tt + std::exp(u))) * ghat(zeta);
  };
  Cplx I = integrate_log_sub(Ffar, 2.0 * std::log(lam0),
                             std::log(2.0 * T - Tt), 1e-9);
  double vLo = std::log(lt2 / cut), vHi = vLo + 42.0;
  auto Fnear = [&](double v) {
    double tminus_s = lt2 * std::exp(-v);
    return p.pdot_at_ell(-std::log(Tt + tminus_s)) * ghat(std::exp(v));
  };
  I += integrate_log_sub(Fnear, vLo, vHi, 1e-9);
  double tailc = (j == 1) ? tab.tail1() : tab.tail2();
  I += p.pdot_at_ell(ell_t) * tailc * std::exp(-vHi);
  Cplx rot = I * std::conj(pt / lam_t);  // e^{-i alpha(t)} * integral
  return (j == 1) ? 2.0 * rot.real() : 2.0 * rot.imag();
}

Cplx psi_diagnostic(const ParamPath& p, double t) {
  double ell_t = -std::log(p.T() - t);
  const auto& ell = p.grid->ell;
  auto f = [&](double x) { return p.pdot_at_ell(x); };
  Cplx acc{0.0, 0.0};
  for (int i = 0; i + 1 < p.grid->n() && ell[i] < ell_t; ++i)
    acc += cell_integral(f, ell[i], std::min(ell[i + 1], ell_t));
  return acc + p.pdot_at_ell(ell_t) * ell_t;
}

SRParts S_R_split(const PathFn& g, double t, double T, double delta,
                  double tol) {
  SRParts out{};
  double ell_t = -std::log(T - t);
  double Tt = std::exp(-ell_t);
  double L = -std::log(T);
  double lam0 = lambda0_scale_at_ell(ell_t, T);
  double cut0 = lam0 * lam0;
  double cutS = std::pow(Tt, 1.0 + delta);
  double t_plus_T = 2.0 * T - Tt;
  Cplx gt = g(ell_t);
  // (1+delta) log(T-t) - 2 log lambda0, written cancellation-free
  double coeff = (1.0 - delta) * ell_t + 4.0 * std::log(ell_t) - 2.0 * std::log(L);
  auto F = [&](double u) { return g(-std::log(Tt + std::exp(u))); };
  Cplx far{0.0, 0.0};
  if (t_plus_T > cutS)
    far = integrate_log_sub(F, std::log(cutS), std::log(t_plus_T), tol);
  out.S = gt * coeff + far;
  auto Fr = [&](double u) { return gt - g(-std::log(Tt + std::exp(u))); };
  if (cutS > cut0)
    out.R = -integrate_log_sub(Fr, std::log(cut0), std::log(cutS), tol,
                               1e-14 * (1.0 + std::abs(gt)));
  return out;
}

Cplx L0tilde_apply(const PathFn& g, double t, double T, double delta) {
  double ell_t = -std::log(T - t);
  double ell_lo = -std::log(2.0 * T);
  Cplx hist = integrate_log_sub(g, ell_lo, ell_t, 1e-9);
  return (1.0 - delta) * ell_t * g(ell_t) + hist;
}

Cplx L1mult_apply(const PathFn& g, double t, double T, double delta,
                  double tol) {
  double ell_t = -std::log(T - t);
  double Tt = std::exp(-ell_t);
  double L = -std::log(T);
  double cutS = std::pow(Tt, 1.0 + delta);
  double t_plus_T = 2.0 * T - Tt;
  Cplx far{0.0, 0.0};
  auto F = [&](double u) { return g(-std::log(Tt + std::exp(u))); };
  if (t_plus_T > cutS)
    far = integrate_log_sub(F, std::log(cutS), std::log(t_plus_T), tol);
  return g(ell_t) * (4.0 * std::log(ell_t) - 2.0 * std::log(L)) + far;
}

Cplx L1tilde_apply(const PathFn& g, double t, double T, double delta,
                   double tol) {
  double ell_t = -std::log(T - t);
  double Tt = std::exp(-ell_t);
  double L = -std::log(T);
  auto Fu = [&](double u) { return g(-std::log(Tt + std::exp(u))); };
  // window [t-(T-t), t-(T-t)^{1+delta}] of the local history
  Cplx t1 = integrate_log_sub(Fu, (1.0 + delta) * std::log(Tt), std::log(Tt), tol);
  // -Int over the last (T-t) of history against the 1/(T-s) kernel
  Cplx t2 = -integrate_log_sub(g, ell_t - std::log(2.0), ell_t, tol);
  // distant history against the kernel difference 1/(t-s) - 1/(T-s)
  auto Fd = [&](double u) {
    double e = std::exp(u);
    return g(-std::log(Tt + e)) * (Tt / (Tt + e));
  };
  Cplx t3 = integrate_log_sub(Fd, std::log(Tt), std::log(2.0 * T - Tt), tol);
  Cplx t4 = (4.0 * std::log(ell_t) - 2.0 * std::log(L)) * g(ell_t);
  return t1 + t2 + t3 + t4;
}

ParamPath T0_inverse(const std::function<Cplx(double)>& f, double delta,
                     std::shared_ptr<const PathGrid> grid) {
  double beta = (2.0 - delta) / (1.0 - delta);
  const auto& ell = grid->ell;
  int n = grid->n();
  std::vector<Cplx> fv(n);
  for (int i = 0; i < n; ++i) fv[i] = f(ell[i]);

  // tail of J beyond the last node: fit |f| ~ power or exponential decay
  Cplx tail{0.0, 0.0};
  {
    double fmax = 0;
    for (auto& v : fv) fmax = std::max(fmax, std::abs(v));
    Cplx fn = fv[n - 1];
    double Lend = ell[n - 1];
    if (std::abs(fn) > 1e-30 * std::max(1.0, fmax)) {
      std::vector<double> xs_p, xs_e, ys;
      for (int i = std::max(0, n - 9); i < n; ++i) {
        if (std::abs(fv[i]) <= 0) continue;
        xs_p.push_back(std::log(ell[i]));
        xs_e.push_back(ell[i]);
        ys.push_back(std::log(std::abs(fv[i])));
      }
      LineFit pw = fit_line(xs_p, ys);
      LineFit ex = fit_line(xs_e, ys);
      double khat = -pw.slope, mhat = -ex.slope;
      double tp = (khat + 1.0 - beta > 0.02)
                      ? std::pow(Lend, beta - 1.0) / (khat + 1.0 - beta)
                      : -1.0;
      double te = (mhat > 1e-3) ? std::pow(Lend, beta - 2.0) / mhat : -1.0;
      double pick = -1.0;
      if (tp >= 0 && (te < 0 || pw.rms_residual <= ex.rms_residual)) pick = tp;
      else if (te >= 0) pick = te;
      if (pick >= 0) tail = fn * pick;
    }
  }

  std::vector<Cplx> J(n);
  J[n - 1] = tail;
  auto h = [&](double x) { return std::pow(x, beta - 2.0) * f(x); };
  for (int i = n - 2; i >= 0; --i)
    J[i] = J[i + 1] + cell_integral(h, ell[i], ell[i + 1]);

  ParamPath g(grid);
  double c1 = 1.0 / (1.0 - delta);
  double c2 = (beta - 1.0) / (1.0 - delta);
  for (int i = 0; i < n; ++i) {
    Cplx gdot = c1 * fv[i] / ell[i] + c2 * std::pow(ell[i], -beta) * J[i];
    g.q[i] = gdot * ell[i] * ell[i];
  }
  g.finalize();
  return g;
}

// -------------------------------------------------------------------- norms

double norm_mu_l(const std::vector<Cplx>& g, const PathGrid& grid, double mu,
                 double l) {
  double best = 0;
  for (int i = 0; i < grid.n(); ++i) {
    double e = grid.ell[i];
    double w = std::exp(mu * e) * std::pow(e, l);
    best = std::max(best, w * std::abs(g[i]));
  }
  return best;
}

double norm_holder(const std::function<Cplx(double)>& f, const PathGrid& grid,
                   double gamma_exp, double m, double l) {
  double best = 0;
  const double thetas[] = {1.0, 0.5, 0.25, 0.05, 0.01};
  for (int i = 0; i < grid.n(); ++i) {
    double t = grid.t[i];
    double Tt = std::exp(-grid.ell[i]);
    Cplx ft = f(t);
    for (double th : thetas) {
      double dt = th * Tt / 10.0;
      double s = t - dt;
      if (s < -grid.T) continue;
      double quot = std::abs(ft - f(s)) / std::pow(dt, gamma_exp);
      double w = std::exp(m * grid.ell[i]) * std::pow(grid.ell[i], l);
      best = std::max(best, w * quot);
    }
  }
  return best;
}

double norm_star_k(const ParamPath& g, double k) {
  double best = 0;
  for (int i = 0; i < g.grid->n(); ++i) {
    double e = g.grid->ell[i];
    best = std::max(best, std::pow(e, k) * std::abs(g.q[i]) / (e * e));
  }
  return best;
}

double norm_dstar_k(const std::vector<Cplx>& f, const PathGrid& grid,
                    double k) {
  double best = 0;
  for (int i = 0; i < grid.n(); ++i)
    best = std::max(best, std::pow(grid.ell[i], k) * std::abs(f[i]));
  return best;
}

// ------------------------------------------------------------------ solvers

namespace {

struct NodeSweep {
  std::vector<Cplx> btilde;  // projected combined memory operator
  std::vector<double> dabs;  // d|p|/dt
};

NodeSweep sweep_path(const ParamPath& p, const GammaTable& tab, double tol) {
  int n = p.grid->n();
  NodeSweep s;
  s.btilde.resize(n);
  s.dabs.resize(n);
  for (int i = 0; i < n; ++i) {
    double e = p.grid->ell[i];
    s.btilde[i] = btilde_full_core(p, e, tab, tol);
    s.dabs[i] = p.dabs_at_ell(e);
  }
  return s;
}

ParamPath combine(const ParamPath& a, const ParamPath& b) {
  ParamPath out(a.grid);
  for (int i = 0; i < a.grid->n(); ++i) out.q[i] = a.q[i] + b.q[i];
  out.finalize();
  return out;
}

ParamPath path_from_gdot(const std::vector<Cplx>& gd,
                         std::shared_ptr<const PathGrid> grid) {
  ParamPath out(std::move(grid));
  for (int i = 0; i < out.grid->n(); ++i) {
    double e = out.grid->ell[i];
    out.q[i] = gd[i] * e * e;
  }
  out.finalize();
  return out;
}

double update_norm(const std::vector<Cplx>& nw, const std::vector<Cplx>& old,
                   const PathGrid& grid, double k) {
  double best = 0;
  for (int i = 0; i < grid.n(); ++i)
    best = std::max(best,
                    std::pow(grid.ell[i], k + 1.0) * std::abs(nw[i] - old[i]));
  return best;
}

void finish_report(PicardReport* rep, bool hit) {
  rep->converged = hit;
  rep->worst_ratio_after2 = 0;
  for (size_t i = 2; i < rep->step_norms.size(); ++i) {
    if (rep->step_norms[i - 1] > 0)
      rep->worst_ratio_after2 = std::max(
          rep->worst_ratio_after2, rep->step_norms[i] / rep->step_norms[i - 1]);
  }
}

// Taper switching the far-history part of the operator off near t = -T,
// where the integration window would otherwise reach before the start of the
// path. Smooth step in t/T: 1 on [0,T], 0 below -T/4.
double eta_taper(double t, double T) {
  double x = t / T;
  if (x >= 0.0) return 1.0;
  if (x <= -0.25) return 0.0;
  double y = (x + 0.25) / 0.25;
  return y * y * (3.0 - 2.0 * y);
}

// Direct collocation solve of S_delta[gdot](t_i) = h_i on the grid nodes.
// The operator is Volterra in ell with diagonal weight
// (1-delta) ell + eta (4 log ell - 2 log|log T|), so a forward march is
// stable: the far-history integral reaches at most into the current cell, and
// that sliver is treated implicitly through a quadratic interpolation basis.
// When udir (unit direction of the total path, lagged) is given, the local
// response of the -2 d|p|/dt term is solved implicitly as well:
//   B gdot - 2 Re(conj(u) gdot) = rhs
// split into components along u and i*u. This requires
// (1-delta)|log(2T)| > 2, i.e. the horizon must be small enough for the
// window parameter.
std::vector<Cplx> march_S_solve(const std::vector<Cplx>& h, double delta,
                                const PathGrid& grid, double tol,
                                const std::vector<Cplx>* udir = nullptr) {
  const auto& ell = grid.ell;
  const auto& tt = grid.t;
  int n = grid.n();
  double T = grid.T;
  double L = -std::log(T);
  std::vector<Cplx> gd(n, Cplx{0.0, 0.0});

  // local cubic interpolation restricted to the already-solved prefix
  auto prefix_at = [&](double x, int imax) -> Cplx {
    if (imax <= 0) return gd[0];
    if (x <= ell[0]) return gd[0];
    if (x >= ell[imax]) return gd[imax];
    int k = bracket_index(ell, x);
    if (k > imax - 1) k = imax - 1;
    int i0 = std::clamp(k - 1, 0, std::max(0, imax - 3));
    int m = std::min(4, imax + 1 - i0);
    if (m < 2) return gd[i0];
    Cplx acc{};
    for (int i = i0; i < i0 + m; ++i) {
      double li = 1.0;
      for (int j = i0; j < i0 + m; ++j) {
        if (j == i) continue;
        li *= (x - ell[j]) / (ell[i] - ell[j]);
      }
      acc += gd[i] * li;
    }
    return acc;
  };

  for (int i = 0; i < n; ++i) {
    double ei = ell[i];
    double et = eta_taper(tt[i], T);
    double coeff = (1.0 - delta) * ei +
                   et * (4.0 * std::log(ei) - 2.0 * std::log(L));
    double Tt = std::exp(-ei);
    double cutS = std::exp(-(1.0 + delta) * ei);
    double tpT = 2.0 * T - Tt;
    // solve B gdot - 2 Re(conj(u) gdot) = R at one node (B real, u unit)
    auto local_solve = [&](double B, Cplx R) -> Cplx {
      if (!udir) return R / B;
      Cplx u = (*udir)[i];
      Cplx Rf = std::conj(u) * R;  // rhs rotated into the path frame
      double x = Rf.real() / (B - 2.0 * u.real());
      double y = (Rf.imag() - 2.0 * x * u.imag()) / B;
      return u * Cplx{x, y};
    };
    if (i == 0 || et <= 0.0 || !(tpT > cutS)) {
      gd[i] = local_solve(coeff, h[i]);
      continue;
    }
    double uLo = std::log(cutS), uHi = std::log(tpT);
    double dtc = tt[i] - tt[i - 1];
    double uMid = (cutS >= dtc) ? uLo : std::min(std::log(dtc), uHi);

    Cplx far_known{0.0, 0.0};
    if (uHi > uMid) {
      auto F = [&](double u) {
        return prefix_at(-std::log(Tt + std::exp(u)), i - 1);
      };
      far_known = integrate_log_sub(F, uMid, uHi, tol);
    }
    double b_cur = 0.0;
    Cplx sliver_known{0.0, 0.0};
    if (uMid > uLo) {
      // quadratic basis on the last three nodes (linear when only two exist)
      double x2 = ell[i], x1 = ell[i - 1];
      double x0 = (i >= 2) ? ell[i - 2] : x1;
      bool quad = i >= 2;
      auto wcur = [&](double u) {
        double xs = -std::log(Tt + std::exp(u));
        xs = std::clamp(xs, x1, x2);
        return quad ? (xs - x0) * (xs - x1) / ((x2 - x0) * (x2 - x1))
                    : (xs - x1) / (x2 - x1);
      };
      auto wknown = [&](double u) -> Cplx {
        double xs = -std::log(Tt + std::exp(u));
        xs = std::clamp(xs, x1, x2);
        if (!quad) return gd[i - 1] * ((x2 - xs) / (x2 - x1));
        double w0 = (xs - x1) * (xs - x2) / ((x0 - x1) * (x0 - x2));
        double w1 = (xs - x0) * (xs - x2) / ((x1 - x0) * (x1 - x2));
        return gd[i - 2] * w0 + gd[i - 1] * w1;
      };
      b_cur = integrate_log_sub([&](double u) { return Cplx{wcur(u), 0.0}; },
                                uLo, uMid, tol)
                  .real();
      sliver_known = integrate_log_sub(wknown, uLo, uMid, tol);
    }
    gd[i] = local_solve(coeff + et * b_cur,
                        h[i] - et * (far_known + sliver_known));
  }
  return gd;
}

// The collocation system S_delta[gdot] = h + c has a one-parameter family of
// solutions (c free); the admissible one is singled out by the decay class:
// corrections must fall off faster than the 1/ell mode that a constant
// right-hand side excites. Given gB = march(1), pick c by weighted least
// squares so the tail of gA + c*gB is as small as possible.
Cplx deflate_constant(std::vector<Cplx>* gA, const std::vector<Cplx>& gB,
                      const PathGrid& grid, double m) {
  double Lcut = grid.ell.back() - 10.0;
  Cplx num{0.0, 0.0};
  double den = 0.0;
  for (int i = 0; i < grid.n(); ++i) {
    double e = grid.ell[i];
    if (e < Lcut) continue;
    double w = std::pow(e, 2.0 * m);
    num += w * std::conj(gB[i]) * (*gA)[i];
    den += w * std::norm(gB[i]);
  }
  Cplx c = (den > 0) ? -num / den : Cplx{0.0, 0.0};
  for (size_t i = 0; i < gA->size(); ++i) (*gA)[i] += c * gB[i];
  return c;
}

// unit direction of the path at each node (falls back to +1 at the tip)
std::vector<Cplx> path_directions(const ParamPath& p) {
  int n = p.grid->n();
  std::vector<Cplx> u(n);
  for (int i = 0; i < n; ++i) {
    double m = std::abs(p.p[i]);
    u[i] = (m > 0) ? p.p[i] / m : (i > 0 ? u[i - 1] : Cplx{1.0, 0.0});
  }
  return u;
}

// One modulation stage: repeatedly solve the collocation system
//   S_delta[gdot](t_i) - 2 Re(conj(u_i) gdot_i)
//     = -B0[base pdot](t_i) + 2 rho_i - Btilde[p](t_i) + c
// where rho is the part of d|p|/dt not responding to the current unknown.
// The nonlocal terms are lagged one iteration (Picard); the constant is
// deflated into the decay class each pass against a fresh neutral-mode solve.
// base_b0 holds the precomputed full-history B0 of the base path.
//
// When ref is given, the stage is an increment correction on top of an
// already balanced base path: the data becomes the defect of the base
// system, eta-tapered because the base equation is only enforced where the
// history window fits inside the horizon, while the modulus and memory terms
// enter as differences against the frozen base sweep. An optional drive adds
// an external right-hand side that is kept in full.
// relax < 1 damps the update: the lagged memory-kernel response at the
// first nodes has loop gain slightly past -1 when the diagonal margin
// (1-delta)|log 2T| - 2 is small, and half-steps restore contraction
// without moving the fixed point.
std::vector<Cplx> run_stage(const ParamPath& base,
                            const std::vector<Cplx>& base_b0, double delta,
                            const GammaTable& tab, const SolveOptions& opt,
                            PicardReport* rep, const NodeSweep* ref = nullptr,
                            Cplx ref_c = Cplx{0.0, 0.0},
                            const std::vector<Cplx>* drive = nullptr,
                            double relax = 1.0) {
  auto grid = base.grid;
  int n = grid->n();
  std::vector<Cplx> gd(n, Cplx{0.0, 0.0});
  std::vector<Cplx> ones(n, Cplx{1.0, 0.0});
  ParamPath corr = path_from_gdot(gd, grid);
  double first = -1;
  bool hit = false;
  for (int it = 0; it < opt.max_iter; ++it) {
    ParamPath ptot = combine(base, corr);
    NodeSweep s = sweep_path(ptot, tab, opt.quad_tol);
    std::vector<Cplx> u = path_directions(ptot);
    std::vector<Cplx> h(n);
    for (int i = 0; i < n; ++i) {
      double resp = (std::conj(u[i]) * gd[i]).real();
      if (ref) {
        Cplx defect =
            base_b0[i] - 2.0 * ref->dabs[i] + ref->btilde[i] - ref_c;
        h[i] = -eta_taper(grid->t[i], grid->T) * defect +
               2.0 * (s.dabs[i] - ref->dabs[i] - resp) -
               (s.btilde[i] - ref->btilde[i]);
      } else {
        h[i] = -base_b0[i] + 2.0 * (s.dabs[i] - resp) - s.btilde[i];
      }
      if (drive) h[i] += (*drive)[i];
    }
    std::vector<Cplx> next = march_S_solve(h, delta, *grid, opt.quad_tol, &u);
    std::vector<Cplx> gB = march_S_solve(ones, delta, *grid, opt.quad_tol, &u);
    rep->c_star = deflate_constant(&next, gB, *grid, opt.k_star + 1.0);
    if (relax != 1.0)
      for (int i = 0; i < n; ++i) next[i] = gd[i] + relax * (next[i] - gd[i]);
    double step = update_norm(next, gd, *grid, opt.k_star);
    rep->step_norms.push_back(step);
    gd = next;
    corr = path_from_gdot(gd, grid);
    if (first < 0) first = std::max(step, 1e-300);
    if (step <= opt.picard_tol * first || step < 1e-14) {
      hit = true;
      break;
    }
  }
  finish_report(rep, hit);
  return gd;
}

std::vector<Cplx> b0_sweep(const ParamPath& p, double tol) {
  PathFn g = path_fn(p);
  int n = p.grid->n();
  std::vector<Cplx> out(n);
  for (int i = 0; i < n; ++i)
    out[i] = b0_core(g, p.grid->ell[i], p.grid->T, tol);
  return out;
}

}  // namespace

PkappaResult solve_pkappa(Cplx kappa, double T, double delta0, double delta,
                          const GammaTable& tab, const SolveOptions& opt) {
  auto grid = std::make_shared<const PathGrid>(build_time_grid(T));
  int n = grid->n();
  // the modulus-term response has gain 2 against the diagonal (1-delta) ell;
  // the march is only well-posed when the horizon is small enough
  if ((1.0 - delta) * grid->ell[0] - 2.0 < 0.05)
    throw std::domain_error(
        "solve_pkappa: (1-delta)|log(2T)| must exceed 2; decrease delta or T");
  ParamPath base = p0_path(kappa, grid);

  // full-history B0 of the base ansatz (linear in kappa: computed at kappa=1)
  ParamPath unit_base = p0_path(Cplx{1.0, 0.0}, grid);
  std::vector<Cplx> E1 = b0_sweep(unit_base, opt.quad_tol);
  std::vector<Cplx> base_b0(n);
  for (int i = 0; i < n; ++i) base_b0[i] = kappa * E1[i];

  PkappaResult out;

  // stage 1: solve at the coarse window parameter
  std::vector<Cplx> g1 =
      run_stage(base, base_b0, delta0, tab, opt, &out.stage1);
  ParamPath p1 = path_from_gdot(g1, grid);
  ParamPath stage1_path = combine(base, p1);
  out.p_stage1 = stage1_path;
  out.stage1_star_norm = norm_star_k(p1, opt.k_star + 1.0);

  // stage 2: correct the increment at the fine window parameter. The data is
  // the measured defect of the stage-1 system (its fully evaluated B0 against
  // the constant it enforced), and the stage adds its own constant on top.
  std::vector<Cplx> b0_s1 = b0_sweep(stage1_path, opt.quad_tol);
  NodeSweep ref1 = sweep_path(stage1_path, tab, opt.quad_tol);
  std::vector<Cplx> g2 =
      run_stage(stage1_path, b0_s1, delta, tab, opt, &out.stage2, &ref1,
                out.stage1.c_star, nullptr, 0.5);
  ParamPath full = combine(stage1_path, path_from_gdot(g2, grid));
  out.p = full;
  // total free constant enforced across both stages; the remaining defect of
  // the full equation vanishes as t -> T
  out.c_kappa = out.stage1.c_star + out.stage2.c_star;

  // measured combined residual against the enforced constant
  NodeSweep sf = sweep_path(full, tab, opt.final_tol);
  std::vector<Cplx> b0f = b0_sweep(full, opt.final_tol);
  out.t_samples.resize(n);
  out.residual_abs.resize(n);
  std::vector<double> window_x, window_y;
  double L = -std::log(T);
  for (int i = 0; i < n; ++i) {
    Cplx res = b0f[i] - 2.0 * sf.dabs[i] + sf.btilde[i] - out.c_kappa;
    out.t_samples[i] = grid->t[i];
    out.residual_abs[i] = std::abs(res);
    double e = grid->ell[i];
    if (e > L + 0.5 && e < L + 10.0 && out.residual_abs[i] > 0) {
      window_x.push_back(std::exp(-e));
      window_y.push_back(out.residual_abs[i]);
    }
  }
  out.fitted_exponent = fit_loglog(window_x, window_y).slope;
  return out;
}

LamalResult solve_lamal(const std::function<Cplx(double)>& a, Cplx aT,
                        double T, double delta0, double delta,
                        const GammaTable& tab, const SolveOptions& opt) {
  LamalResult out{};
  out.aT = aT;
  double L = -std::log(T);
  double D = L / (L - std::log(2.0));  // |c(kappa)| ~ D |kappa|
  double src = opt.source_coeff;
  auto a_ext = [&](double t) { return a(std::max(t, 0.0)); };

  Cplx kappa = -src * aT / D;
  Cplx kappa_prev{}, ctot_prev{};
  bool have_prev = false;

  PkappaResult pk;
  std::vector<Cplx> gc;
  std::shared_ptr<const PathGrid> grid;

  for (int outer = 0; outer < 12; ++outer) {
    ++out.outer_evals;
    pk = solve_pkappa(kappa, T, delta0, delta, tab, opt);
    grid = pk.p.grid;
    int n = grid->n();
    std::vector<Cplx> b0_pk = b0_sweep(pk.p, opt.quad_tol);
    NodeSweep refp = sweep_path(pk.p, tab, opt.quad_tol);
    std::vector<Cplx> drive(n);
    for (int i = 0; i < n; ++i) drive[i] = src * (a_ext(grid->t[i]) - aT);

    // drive-correction stage at the fine window parameter, run as an
    // increment on the balanced constant-drive path
    PicardReport rep;
    gc = run_stage(pk.p, b0_pk, delta, tab, opt, &rep, &refp, pk.c_kappa,
                   &drive, 0.5);
    out.corr = rep;

    // the constant left unbalanced in the full system at this kappa; the
    // outer root-find drives it to zero
    Cplx ctot = pk.c_kappa + rep.c_star - src * aT;
    out.c_final = ctot;
    double scale = std::max(std::abs(aT), std::abs(kappa));
    if (std::abs(ctot) <= 1e-6 * scale) break;

    Cplx step;
    if (have_prev && std::abs(kappa - kappa_prev) > 0) {
      Cplx m = (ctot - ctot_prev) / (kappa - kappa_prev);
      if (std::abs(m) < 1e-12) m = -D;
      step = -ctot / m;
    } else {
      step = ctot / D;  // dc/dkappa ~ -D
    }
    if (std::abs(step) > 0.5 * std::abs(kappa))
      step *= 0.5 * std::abs(kappa) / std::abs(step);
    kappa_prev = kappa;
    ctot_prev = ctot;
    have_prev = true;
    kappa += step;
  }

  out.kappa = kappa;
  out.kappa_abs_gap = std::fabs(std::abs(kappa) / std::abs(aT) - 1.0);
  double g0 = std::arg(-aT);
  out.kappa_arg_gap = std::fabs(std::arg(kappa * std::polar(1.0, -g0)));
  out.base = pk;

  // full-system residual against the drive
  ParamPath full = combine(pk.p, path_from_gdot(gc, grid));
  out.p = full;
  int n = grid->n();
  NodeSweep sf = sweep_path(full, tab, opt.final_tol);
  std::vector<Cplx> b0f = b0_sweep(full, opt.final_tol);
  out.t_samples.resize(n);
  out.residual_abs.resize(n);
  out.envelope.resize(n);
  std::vector<double> wx, wy;
  double floor = 5.0 * std::abs(out.c_final);
  for (int i = 0; i < n; ++i) {
    Cplx res = b0f[i] - 2.0 * sf.dabs[i] + sf.btilde[i] -
               src * a_ext(grid->t[i]);
    out.t_samples[i] = grid->t[i];
    out.residual_abs[i] = std::abs(res);
    double Rw =
        std::pow(lambda0_scale_at_ell(grid->ell[i], T), -defaults::beta);
    out.envelope[i] = std::pow(Rw, 1.0 - defaults::a_weight);
    double e = grid->ell[i];
    if (e > L + 0.5 && e < L + 12.0 && out.residual_abs[i] > floor)
      wx.push_back(std::exp(-e)), wy.push_back(out.residual_abs[i] /
                                               out.envelope[i]);
  }
  LineFit fit = fit_loglog(wx, wy);
  out.sigma2_fit = fit.slope;
  out.sigma2_ci95 = fit.ci95_halfwidth;
  return out;
}

}  // namespace hm
