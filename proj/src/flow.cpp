#include "hm/flow.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hm/bubble.h"

namespace hm {

namespace {

// C^2 plateau: 1 for s <= 1, 0 for s >= 3/2.
double plateau(double s) {
  if (s <= 1.0) return 1.0;
  if (s >= 1.5) return 0.0;
  const double u = 2.0 * (s - 1.0);
  return 1.0 - u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

void check_state(const RadialState& s) {
  if (s.grid.size() < 8 || s.grid.size() != s.v.size())
    throw std::invalid_argument("radial state: bad grid");
  if (!(s.grid.front() > 0)) throw std::invalid_argument("radial state: grid must start above 0");
}

// Flux-factorized rows of the linear part v_rr + v_r/r - v/r^2, using the
// exact identity  v_rr + v_r/r - v/r^2 = d_r[(1/r) d_r(r v)].  Differencing
// the factored form puts both homogeneous solutions r and 1/r in the exact
// discrete kernel on any grid, so a slaved far-field tail A/r + B*r costs no
// truncation error (a plain 3-point stencil slowly drains such tails on a
// graded grid, which visibly corrupts long collapse runs).  Unknowns are
// 0..n-1; r[n] carries the boundary value; below r[0] sits the origin, where
// the factored flux of r*v vanishes identically, so no origin value enters.
struct OperatorRows {
  std::vector<double> sub, diag, sup;  // tridiagonal stencil
  std::vector<double> r2;              // consistent r^2 weight: row sum = -1/r2
};

OperatorRows factored_rows(const std::vector<double>& r) {
  const size_t n = r.size() - 1;  // unknowns 0..n-1; r[n] carries bc
  OperatorRows L;
  L.sub.assign(n, 0.0);
  L.diag.assign(n, 0.0);
  L.sup.assign(n, 0.0);
  L.r2.assign(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    const double rm = (i == 0) ? 0.0 : r[i - 1];
    const double hm_ = r[i] - rm;
    const double hp = r[i + 1] - r[i];
    const double mm = 0.5 * (rm + r[i]);
    const double mp = 0.5 * (r[i] + r[i + 1]);
    const double del = 0.5 * (r[i + 1] - rm);
    L.sub[i] = rm / (hm_ * mm * del);
    L.diag[i] = -(r[i] / (hp * mp) + r[i] / (hm_ * mm)) / del;
    L.sup[i] = r[i + 1] / (hp * mp * del);
    L.r2[i] = mm * mp;
  }
  return L;
}

// u - sin(u)cos(u): the bounded local reaction left after absorbing the
// nearest branch multiple of pi into the linear operator; series below 0.1
// where the direct form loses all digits to cancellation.
double odd_reaction(double u) {
  if (std::abs(u) < 0.1) {
    const double u2 = u * u;
    return u * u2 *
           (2.0 / 3.0 +
            u2 * (-2.0 / 15.0 + u2 * (4.0 / 315.0 - u2 * (2.0 / 2835.0))));
  }
  return u - 0.5 * std::sin(2.0 * u);
}

}  // namespace

RadialState initial_bubble_state(double ell, double lambda_init, double bc,
                                 double rmin, double ratio) {
  if (!(ell > 0) || !(lambda_init > 0) || !(lambda_init < ell))
    throw std::invalid_argument("initial_bubble_state: need 0 < lambda_init < ell");
  if (rmin <= 0) rmin = lambda_init / 50.0;
  RadialState s;
  s.grid = graded_grid(ell, ratio, rmin / ell);
  s.v.resize(s.grid.size());
  s.bc = bc;
  s.origin = M_PI;
  for (size_t i = 0; i < s.grid.size(); ++i) {
    const double r = s.grid[i];
    const double chi = plateau(3.0 * r / ell);
    s.v[i] = profile_w(r / lambda_init) * chi + bc * (1.0 - chi);
  }
  s.v.back() = bc;
  return s;
}

void step_inplace(RadialState& s, double dt,
                  const std::function<double(double)>* source) {
  check_state(s);
  if (!(dt > 0)) throw std::invalid_argument("step: dt must be positive");
  const size_t n = s.grid.size() - 1;
  const OperatorRows L = factored_rows(s.grid);

  // Increment form of the semi-implicit step,
  //   (I - dt A - dt N'(v)) delta = dt [ A(v - k pi) + N(v) + g ],
  // with A the factored linear rows and N(v) = (v - sin v cos v)/r^2 the
  // local reaction. Each row is shifted by its nearest multiple of pi, so
  // the stiff core never forms pi-sized products: an exact steady state
  // yields delta = 0 identically.
  std::vector<double> a(n), b(n), c(n), rhs(n);
  for (size_t i = 0; i < n; ++i) {
    const double kpi = M_PI * std::nearbyint(s.v[i] / M_PI);
    const double um = (i == 0) ? 0.0 : s.v[i - 1] - kpi;  // row 0: sub = 0
    const double u0 = s.v[i] - kpi;
    const double up = s.v[i + 1] - kpi;  // i = n-1 reads the boundary value
    const double su = std::sin(u0);
    a[i] = -dt * L.sub[i];
    b[i] = 1.0 - dt * (L.diag[i] + 2.0 * su * su / L.r2[i]);
    c[i] = -dt * L.sup[i];
    rhs[i] = dt * (L.sub[i] * um + L.diag[i] * u0 + L.sup[i] * up +
                   odd_reaction(u0) / L.r2[i]);
    if (source) rhs[i] += dt * (*source)(s.grid[i]);
  }

  // Thomas solve for the increment; the boundary value does not move
  std::vector<double> cw(n), x(n);
  double beta = b[0];
  cw[0] = c[0] / beta;
  x[0] = rhs[0] / beta;
  for (size_t i = 1; i < n; ++i) {
    beta = b[i] - a[i] * cw[i - 1];
    cw[i] = c[i] / beta;
    x[i] = (rhs[i] - a[i] * x[i - 1]) / beta;
  }
  for (size_t i = n - 1; i-- > 0;) x[i] -= cw[i] * x[i + 1];

  for (size_t i = 0; i < n; ++i) s.v[i] += x[i];
  s.v[n] = s.bc;
  s.t += dt;
  if (!std::isfinite(s.v[0]))
    throw std::runtime_error("step: implicit solve failed to converge");
}

RadialState step(RadialState s, double dt) {
  step_inplace(s, dt);
  return s;
}

double state_energy(const RadialState& s) {
  check_state(s);
  std::vector<double> r(s.grid.size() + 1), v(s.v.size() + 1);
  r[0] = 0.0;
  v[0] = s.origin;
  std::copy(s.grid.begin(), s.grid.end(), r.begin() + 1);
  std::copy(s.v.begin(), s.v.end(), v.begin() + 1);
  return dirichlet_energy_radial(RadialProfile(std::move(r), std::move(v)));
}

LambdaFit detect_lambda(const RadialState& s, double rms_gate) {
  check_state(s);
  LambdaFit out;
  const double vr0 = (s.v[0] - s.origin) / s.grid[0];
  out.lambda_slope_est = (vr0 < 0) ? -2.0 / vr0
                                   : std::numeric_limits<double>::infinity();

  // seed: slope estimator, or the half-angle crossing w(1) = pi/2
  double lam = out.lambda_slope_est;
  if (!(lam > 0) || !(lam < s.grid.back())) {
    lam = 0;
    for (size_t i = 0; i < s.grid.size(); ++i)
      if (std::abs(s.v[i] - s.origin) > M_PI / 2) {
        lam = s.grid[i];
        break;
      }
    if (!(lam > 0)) throw std::runtime_error("detect_lambda: no bubble detected");
  }

  // Gauss-Newton on the scale, window r < 10*lambda re-derived each sweep
  double rms = 0;
  for (int it = 0; it < 12; ++it) {
    double num = 0, den = 0, ss = 0;
    size_t cnt = 0;
    for (size_t i = 0; i < s.grid.size() && (s.grid[i] < 10.0 * lam || cnt < 8); ++i) {
      const double rho = s.grid[i] / lam;
      const double e = s.v[i] - profile_w(rho);
      const double J = -(s.grid[i] / (lam * lam)) * profile_derivatives(rho).w_rho;
      num += J * e;
      den += J * J;
      ss += e * e;
      ++cnt;
    }
    if (den == 0 || cnt < 4) throw std::runtime_error("detect_lambda: no bubble detected");
    const double dlam = num / den;
    lam = std::max(0.2 * lam, std::min(5.0 * lam, lam + dlam));
    rms = std::sqrt(ss / double(cnt));
    if (std::abs(dlam) < 1e-14 * lam) break;
  }
  out.lambda = lam;
  out.rms = rms;
  if (!(rms <= rms_gate))
    throw std::runtime_error("detect_lambda: no bubble detected (rms above gate)");
  return out;
}

namespace {

// rebuild the graded grid so the first node sits at rmin, carrying v over by
// interpolation (origin-anchored below the old first node)
void regrid(RadialState& s, double rmin, double ratio, double ell) {
  std::vector<double> r(s.grid.size() + 1), v(s.v.size() + 1);
  r[0] = 0.0;
  v[0] = s.origin;
  std::copy(s.grid.begin(), s.grid.end(), r.begin() + 1);
  std::copy(s.v.begin(), s.v.end(), v.begin() + 1);
  const RadialProfile old(std::move(r), std::move(v));
  s.grid = graded_grid(ell, ratio, rmin / ell);
  s.v.resize(s.grid.size());
  for (size_t i = 0; i < s.grid.size(); ++i) s.v[i] = old(s.grid[i]);
  s.v.back() = s.bc;
}

double cheap_lambda(const RadialState& s) {
  const double vr0 = (s.v[0] - s.origin) / s.grid[0];
  return (vr0 < 0) ? -2.0 / vr0 : std::numeric_limits<double>::infinity();
}

}  // namespace

BlowupEvent run_to_blowup(const RadialState& initial, const FlowConfig& cfg) {
  RadialState s = initial;
  BlowupEvent ev;

  auto record = [&](double lam_fit, double dt) {
    TraceRow row;
    row.t = s.t;
    row.lambda = lam_fit;
    row.lambda_slope_est = cheap_lambda(s);
    row.energy = state_energy(s);
    row.dt = dt;
    row.n_nodes = int(s.grid.size());
    ev.trace.push_back(row);
    ev.energy_trace.push_back({s.t, row.energy});
  };

  double lam = 0;
  try {
    lam = detect_lambda(s).lambda;
  } catch (const std::runtime_error&) {
    // no bubble in the initial data: evolve briefly on the grid scale and
    // report a non-blow-up run
    const double dt = cfg.dt_factor * 1e-2 * cfg.ell * cfg.ell;
    for (int k = 0; k < 512; ++k) step_inplace(s, dt);
    ev.blew_up = false;
    record(0.0, dt);
    ev.final_state = std::move(s);
    return ev;
  }

  const double lambda_min = cfg.lambda_min_frac * cfg.ell;
  double lam_fit = lam;
  double last_rec = 2.0 * lam_fit;
  double lam_min_seen = lam_fit;
  long long k = 0;

  // dt floor is the classic dt_factor*lambda^2; once the scale starts
  // halving, a fraction of the time since the last halving tracks the
  // collapse clock instead, which is what keeps deep runs affordable.
  double lam_clock = lam;
  double t_clock = s.t;
  double dt = cfg.dt_factor * lam * lam;

  while (true) {
    if (lam_fit < lambda_min) {
      ev.blew_up = true;
      break;
    }
    if (lam_fit > 1.5 * lam_min_seen || k >= cfg.max_steps) {
      ev.blew_up = false;  // stalled or re-expanding
      break;
    }
    if (s.grid.front() > lam / (0.5 * cfg.rmin_per_lambda))
      regrid(s, lam / cfg.rmin_per_lambda, cfg.grid_ratio, cfg.ell);
    dt = cfg.dt_factor * lam * lam;
    if (cfg.dt_mod_frac > 0)
      dt = std::max(dt, cfg.dt_mod_frac * (s.t - t_clock));
    step_inplace(s, dt);
    ++k;
    lam = std::min(cheap_lambda(s), 0.9 * cfg.ell);
    if (lam < 0.5 * lam_clock) {
      lam_clock = lam;
      t_clock = s.t;
    }
    if (k % cfg.fit_stride == 0) {
      lam_fit = detect_lambda(s).lambda;
      lam_min_seen = std::min(lam_min_seen, lam_fit);
      if (lam_fit <= 0.97 * last_rec || lam_fit >= last_rec / 0.97) {
        record(lam_fit, dt);
        last_rec = lam_fit;
      }
    }
  }
  record(lam_fit, dt);
  ev.lambda_end = lam_fit;

  if (ev.blew_up) {
    // extrapolate the tail of lambda(t) to zero with a straight line fitted
    // over the last factor-4 of scales
    double sw = 0, swt = 0, swl = 0, swtt = 0, swtl = 0;
    for (const TraceRow& row : ev.trace) {
      if (!(row.lambda > 0) || row.lambda > 4.0 * ev.lambda_end) continue;
      sw += 1;
      swt += row.t;
      swl += row.lambda;
      swtt += row.t * row.t;
      swtl += row.t * row.lambda;
    }
    const double det = sw * swtt - swt * swt;
    if (sw >= 3 && det != 0) {
      const double slope = (sw * swtl - swt * swl) / det;
      const double icept = (swtt * swl - swt * swtl) / det;
      if (slope < 0) ev.T_hat = -icept / slope;
    }
    if (!std::isfinite(ev.T_hat) || ev.T_hat <= s.t)
      ev.T_hat = s.t + ev.lambda_end;  // fallback: one scale beyond the end
  }
  ev.final_state = std::move(s);
  return ev;
}

RadialProfile body_map(const BlowupEvent& ev) {
  if (!ev.blew_up) throw std::runtime_error("body_map: run did not blow up");
  const RadialState& s = ev.final_state;
  std::vector<double> r(s.grid.size() + 1), v(s.v.size() + 1);
  r[0] = 0.0;
  v[0] = 0.0;
  for (size_t i = 0; i < s.grid.size(); ++i) {
    r[i + 1] = s.grid[i];
    v[i + 1] = s.v[i] - profile_w(s.grid[i] / ev.lambda_end);
  }
  return RadialProfile(std::move(r), std::move(v));
}

RateFit fit_rate(const std::vector<std::array<double, 2>>& t_lambda,
                 double T_hat, double window_decades) {
  if (!(window_decades > 0)) throw std::invalid_argument("fit_rate: bad window");
  double d_end = std::numeric_limits<double>::infinity();
  for (const auto& s : t_lambda)
    if (s[0] < T_hat && s[1] > 0) d_end = std::min(d_end, T_hat - s[0]);
  if (!std::isfinite(d_end)) throw std::runtime_error("fit_rate: window too short");
  const double d_hi = d_end * std::pow(10.0, window_decades);

  RateFit out;
  out.t_lo = T_hat - d_hi;
  out.t_hi = T_hat - d_end;
  double sxx = 0, sxy = 0;
  double comp_min = std::numeric_limits<double>::infinity(), comp_max = 0;
  std::vector<std::array<double, 2>> window;  // (d, lambda)
  for (const auto& s : t_lambda) {
    const double d = T_hat - s[0];
    if (!(d >= d_end && d <= d_hi) || !(s[1] > 0)) continue;
    const double x = d / (std::log(d) * std::log(d));
    sxx += x * x;
    sxy += x * s[1];
    const double comp = s[1] / x;
    comp_min = std::min(comp_min, comp);
    comp_max = std::max(comp_max, comp);
    out.typeII_ratio.push_back({d, s[1] / d});
    window.push_back({d, s[1]});
  }
  if (window.size() < 8 || window.back()[0] == window.front()[0])
    throw std::runtime_error("fit_rate: window too short");
  out.kappa_hat = sxy / sxx;
  double ss = 0;
  for (const auto& s : window) {
    const double model = out.kappa_hat * s[0] / (std::log(s[0]) * std::log(s[0]));
    ss += std::pow(std::log(s[1] / model), 2);
  }
  out.residual = std::sqrt(ss / double(window.size()));
  std::sort(out.typeII_ratio.begin(), out.typeII_ratio.end(),
            [](const auto& a, const auto& b) { return a[0] > b[0]; });
  out.typeII_spread = out.typeII_ratio.front()[1] / out.typeII_ratio.back()[1];
  out.compensated_spread = comp_max / comp_min;
  out.matches_log2_law = out.compensated_spread <= 3.0;
  return out;
}

RateFit fit_rate(const BlowupEvent& ev, double window_decades) {
  if (!ev.blew_up) throw std::runtime_error("fit_rate: run did not blow up");
  std::vector<std::array<double, 2>> tl;
  for (const TraceRow& row : ev.trace)
    if (row.lambda > 0) tl.push_back({row.t, row.lambda});
  return fit_rate(tl, ev.T_hat, window_decades);
}

ReverseResult reverse_continue(const RadialProfile& v_star, double kappa,
                               double eps, double duration,
                               const FlowConfig& cfg) {
  if (!(kappa > 0) || !(eps > 0) || !(eps < 1))
    throw std::invalid_argument("reverse_continue: need kappa > 0 and eps in (0,1)");
  ReverseResult out;
  out.eps = eps;
  const double lgr = std::log(eps);
  out.lambda_eps = kappa * eps / (lgr * lgr);

  RadialState s;
  s.grid = graded_grid(cfg.ell, cfg.grid_ratio,
                       out.lambda_eps / cfg.rmin_per_lambda / cfg.ell);
  s.v.resize(s.grid.size());
  s.origin = -M_PI;  // attached bubble carries the opposite orientation
  s.t = eps;
  for (size_t i = 0; i < s.grid.size(); ++i)
    s.v[i] = v_star(s.grid[i]) - profile_w(s.grid[i] / out.lambda_eps);
  s.bc = s.v.back();

  {
    // body-map energy on the same grid (origin value 0)
    std::vector<double> r(s.grid.size() + 1), v(s.v.size() + 1);
    r[0] = 0.0;
    v[0] = 0.0;
    for (size_t i = 0; i < s.grid.size(); ++i) {
      r[i + 1] = s.grid[i];
      v[i + 1] = v_star(s.grid[i]);
    }
    out.energy_before = dirichlet_energy_radial(RadialProfile(std::move(r), std::move(v)));
  }
  out.energy_after = state_energy(s);
  out.jump = out.energy_after - out.energy_before;

  // scale of the attached bubble, from the deficit against the body map
  auto fit_attached = [&](const RadialState& st) {
    RadialState diff = st;
    diff.origin = M_PI;
    for (size_t i = 0; i < st.grid.size(); ++i)
      diff.v[i] = v_star(st.grid[i]) - st.v[i];
    return detect_lambda(diff);
  };

  auto record = [&](double lam, double dt) {
    TraceRow row;
    row.t = s.t;
    row.lambda = lam;
    row.lambda_slope_est = 0;
    row.energy = state_energy(s);
    row.dt = dt;
    row.n_nodes = int(s.grid.size());
    out.trace.push_back(row);
  };

  double lam = out.lambda_eps;
  record(lam, 0.0);
  long long k = 0;
  double last_rec = lam;
  double lam_clock = lam;
  double t_clock = s.t;
  double dt = cfg.dt_factor * lam * lam;
  while (s.t < eps + duration && k < cfg.max_steps) {
    if (s.grid.front() < lam / (4.0 * cfg.rmin_per_lambda) ||
        s.grid.front() > lam / (0.5 * cfg.rmin_per_lambda))
      regrid(s, lam / cfg.rmin_per_lambda, cfg.grid_ratio, cfg.ell);
    dt = cfg.dt_factor * lam * lam;
    if (cfg.dt_mod_frac > 0)
      dt = std::max(dt, cfg.dt_mod_frac * (s.t - t_clock));
    step_inplace(s, dt);
    ++k;
    if (k % cfg.fit_stride == 0) {
      lam = fit_attached(s).lambda;
      if (lam > 2.0 * lam_clock || lam < 0.5 * lam_clock) {
        lam_clock = lam;
        t_clock = s.t;
      }
      if (lam >= 1.03 * last_rec || lam <= last_rec / 1.03) {
        record(lam, dt);
        last_rec = lam;
      }
      if (lam > 0.3 * cfg.ell) break;         // bubble fully unwound
      if (lam < 0.2 * out.lambda_eps) break;  // collapsing instead: report as-is
    }
  }
  lam = fit_attached(s).lambda;
  record(lam, dt);
  out.final_state = std::move(s);
  return out;
}

}  // namespace hm
