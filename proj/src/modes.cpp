#include "hm/modes.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hm/bubble.h"
#include "hm/quadrature.h"

namespace hm {

namespace {

// Thomas solve of a real tridiagonal system with complex right-hand side.
void solve_tridiag(std::vector<double> a, std::vector<double> b, std::vector<double> c,
                   std::vector<Cplx>& d) {
  const size_t n = b.size();
  for (size_t i = 1; i < n; ++i) {
    const double m = a[i] / b[i - 1];
    b[i] -= m * c[i - 1];
    d[i] -= m * d[i - 1];
  }
  d[n - 1] /= b[n - 1];
  for (size_t i = n - 1; i-- > 0;) d[i] = (d[i] - c[i] * d[i + 1]) / b[i];
}

double chi_weight(double rho) { return 1.0 / (1.0 + rho); }

}  // namespace

Cplx ModeProfile::at(double rho) const {
  if (grid.empty()) throw std::runtime_error("ModeProfile: empty");
  if (rho <= grid.front()) return values.front();
  if (rho >= grid.back()) return values.back();
  size_t lo = 0, hi = grid.size() - 1;
  while (hi - lo > 1) {
    size_t mid = (lo + hi) / 2;
    (grid[mid] <= rho ? lo : hi) = mid;
  }
  const double t = (rho - grid[lo]) / (grid[lo + 1] - grid[lo]);
  return values[lo] * (1.0 - t) + values[lo + 1] * t;
}

double mode_potential(int k, double rho) {
  if (rho <= 0) throw std::domain_error("mode_potential: rho = 0 is a singular point");
  const double cw = profile_derivatives(rho).cos_w;
  const double c2w = 2.0 * cw * cw - 1.0;
  return double(k) * k + 2.0 * k * cw + c2w;
}

ModeProfile apply_Lk(const ModeProfile& phi) {
  const size_t n = phi.grid.size();
  if (n < 5) throw std::invalid_argument("apply_Lk: need >= 5 nodes");
  ModeProfile out;
  out.k = phi.k;
  out.grid = phi.grid;
  out.values.assign(n, Cplx(std::nan(""), std::nan("")));
  for (size_t i = 1; i + 1 < n; ++i) {
    const double rm = phi.grid[i - 1], r0 = phi.grid[i], rp = phi.grid[i + 1];
    const double hm_ = r0 - rm, hp = rp - r0;
    const double rhalf_m = 0.5 * (rm + r0), rhalf_p = 0.5 * (r0 + rp);
    // conservative (1/rho)(rho phi')' on the nonuniform grid
    const Cplx flux_p = rhalf_p * (phi.values[i + 1] - phi.values[i]) / hp;
    const Cplx flux_m = rhalf_m * (phi.values[i] - phi.values[i - 1]) / hm_;
    const Cplx lap = (flux_p - flux_m) / (r0 * 0.5 * (hm_ + hp));
    out.values[i] = lap - mode_potential(phi.k, r0) * phi.values[i] / (r0 * r0);
  }
  return out;
}

double kernel_element_value(int k, double rho) {
  const double d = rho * rho + 1.0;
  switch (k) {
    case 0: return rho / d;
    case 1: return 1.0 / d;
    case -1: return 2.0 * rho * rho / d;
    case -2: return rho * rho * rho / d;
    default: throw std::invalid_argument("kernel_element: unsupported mode index");
  }
}

ModeProfile kernel_element(int k, const std::vector<double>& grid) {
  ModeProfile z;
  z.k = k;
  z.grid = grid;
  z.values.reserve(grid.size());
  for (double r : grid) z.values.emplace_back(kernel_element_value(k, r), 0.0);
  return z;
}

ModeProfile green_solve_mode(int k, const std::function<Cplx(double)>& g, double R,
                             int nodes_per_decade) {
  if (!(R > 0)) throw std::invalid_argument("green_solve_mode: R must be > 0");
  const double rout = 4.0 * R;
  const double rmin = rout * 1e-8;
  const int decades = 8;
  const int n = decades * nodes_per_decade + 1;
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i)
    grid[i] = rmin * std::pow(rout / rmin, double(i) / (n - 1));

  auto zk = [k](double r) { return kernel_element_value(k, r); };
  auto inner_integrand_re = [&](double s) { return g(s).real() * zk(s) * s; };
  auto inner_integrand_im = [&](double s) { return g(s).imag() * zk(s) * s; };

  // cumulative inner integral I(r) = integral_0^r g Z_k s ds at the nodes
  std::vector<Cplx> inner(n);
  inner[0] = Cplx(integrate(inner_integrand_re, 0.0, grid[0], 1e-13),
                  integrate(inner_integrand_im, 0.0, grid[0], 1e-13));
  for (int i = 1; i < n; ++i)
    inner[i] = inner[i - 1] + Cplx(integrate(inner_integrand_re, grid[i - 1], grid[i], 1e-13),
                                   integrate(inner_integrand_im, grid[i - 1], grid[i], 1e-13));

  // I(r) anywhere: nearest lower node plus an on-demand correction
  auto inner_at = [&](double r) -> Cplx {
    auto it = std::upper_bound(grid.begin(), grid.end(), r);
    if (it == grid.begin())
      return Cplx(integrate(inner_integrand_re, 0.0, r, 1e-13),
                  integrate(inner_integrand_im, 0.0, r, 1e-13));
    const size_t j = static_cast<size_t>(it - grid.begin()) - 1;
    return inner[j] + Cplx(integrate(inner_integrand_re, grid[j], r, 1e-13),
                           integrate(inner_integrand_im, grid[j], r, 1e-13));
  };

  auto outer_integrand_re = [&](double r) {
    const double z = zk(r);
    return inner_at(r).real() / (r * z * z);
  };
  auto outer_integrand_im = [&](double r) {
    const double z = zk(r);
    return inner_at(r).imag() / (r * z * z);
  };

  // cumulative outer integral from rout backwards
  std::vector<Cplx> outer(n);
  outer[n - 1] = 0.0;
  for (int i = n - 2; i >= 0; --i)
    outer[i] = outer[i + 1] + Cplx(integrate(outer_integrand_re, grid[i], grid[i + 1], 1e-12),
                                   integrate(outer_integrand_im, grid[i], grid[i + 1], 1e-12));

  ModeProfile phi;
  phi.k = k;
  phi.grid = grid;
  phi.values.resize(n);
  for (int i = 0; i < n; ++i) phi.values[i] = zk(grid[i]) * outer[i];
  return phi;
}

ModeEvolution evolve_mode(int k, const std::function<Cplx(double, double)>& h,
                          const std::function<double(double)>& R_of_tau, double tau0,
                          double tau1, const EvolveOptions& opt) {
  if (!(tau1 > tau0) || !(tau0 > 0))
    throw std::invalid_argument("evolve_mode: need 0 < tau0 < tau1");

  // fixed reference grid on (0, 1]: geometric with a few uniform head nodes
  std::vector<double> ref;
  {
    const double xmin = 1e-5;
    const int n = opt.n_space;
    ref.reserve(n);
    for (int i = 0; i < n; ++i) ref.push_back(xmin * std::pow(1.0 / xmin, double(i) / (n - 1)));
  }
  const size_t n = ref.size();

  auto make_grid = [&](double tau) {
    std::vector<double> g(n);
    const double rout = 4.0 * R_of_tau(tau);
    for (size_t i = 0; i < n; ++i) g[i] = rout * ref[i];
    return g;
  };

  // one backward-Euler step of length dtau from state (grid_old, v_old) at tau
  auto take_step = [&](const std::vector<double>& grid_old, const std::vector<Cplx>& v_old,
                       double tau, double dtau) {
    const double tau_new = tau + dtau;
    std::vector<double> grid_new = make_grid(tau_new);
    ModeProfile carrier{k, grid_old, v_old};
    std::vector<Cplx> rhs(n);
    for (size_t i = 0; i < n; ++i) rhs[i] = carrier.at(grid_new[i]) + dtau * h(grid_new[i], tau_new);
    // assemble (I - dtau*A) with A the conservative L_k stencil
    std::vector<double> lo(n, 0.0), di(n, 1.0), up(n, 0.0);
    for (size_t i = 1; i + 1 < n; ++i) {
      const double rm = grid_new[i - 1], r0 = grid_new[i], rp = grid_new[i + 1];
      const double hm_ = r0 - rm, hp = rp - r0, cell = 0.5 * (hm_ + hp) * r0;
      const double am = 0.5 * (rm + r0) / hm_ / cell;
      const double ap = 0.5 * (r0 + rp) / hp / cell;
      const double v = mode_potential(k, r0) / (r0 * r0);
      lo[i] = -dtau * am;
      up[i] = -dtau * ap;
      di[i] = 1.0 + dtau * (am + ap + v);
    }
    // inner boundary: phi -> 0 at the origin for every k except the
    // translation mode, which is even (zero slope)
    if (k == 1) { di[0] = 1.0; up[0] = -1.0; rhs[0] = 0.0; }
    else        { di[0] = 1.0; up[0] = 0.0;  rhs[0] = 0.0; }
    di[n - 1] = 1.0; lo[n - 1] = 0.0; rhs[n - 1] = 0.0;  // outer Dirichlet
    solve_tridiag(lo, di, up, rhs);
    return std::pair{grid_new, rhs};
  };

  ModeEvolution evo;
  evo.k = k;
  double tau = tau0, dtau = opt.dtau_init;
  std::vector<double> grid = make_grid(tau0);
  std::vector<Cplx> v(n, 0.0);
  evo.tau_nodes.push_back(tau0);
  evo.outer_radius.push_back(R_of_tau(tau0));
  evo.snapshots.push_back(ModeProfile{k, grid, v});

  int rejects = 0;
  while (tau < tau1) {
    dtau = std::min({dtau, tau1 - tau, opt.dtau_max_frac * tau});
    auto [g_full, v_full] = take_step(grid, v, tau, dtau);
    auto [g_h1, v_h1] = take_step(grid, v, tau, 0.5 * dtau);
    auto [g_h2, v_h2] = take_step(g_h1, v_h1, tau + 0.5 * dtau, 0.5 * dtau);
    double err = 0, scale = 1e-300;
    for (size_t i = 0; i < n; ++i) {
      err = std::max(err, std::abs(v_full[i] - v_h2[i]));
      scale = std::max(scale, std::abs(v_h2[i]));
    }
    const double rel = err / std::max(scale, 1e-14);
    if (rel > opt.rel_tol && dtau > 1e-12 * tau) {
      dtau *= 0.5;
      if (++rejects > opt.max_rejects)
        throw std::runtime_error("evolve_mode: step-size rejections exceeded the retry budget");
      continue;
    }
    rejects = 0;
    tau += dtau;
    grid = std::move(g_h2);
    v = std::move(v_h2);
    evo.tau_nodes.push_back(tau);
    evo.outer_radius.push_back(R_of_tau(tau));
    evo.snapshots.push_back(ModeProfile{k, grid, v});
    if (rel < 0.05 * opt.rel_tol) dtau *= 1.6;
  }
  return evo;
}

ModeProjection project_mode(const ModeProfile& h, double R) {
  const int k = h.k;
  if (k != 0 && k != 1)
    throw std::invalid_argument("project_mode: only the k = 0 and k = 1 kernels are slow-decaying");
  const double rmax = 2.0 * R;
  auto zk = [k](double r) { return kernel_element_value(k, r); };
  const double two_pi = 2.0 * std::numbers::pi;

  // angular reduction: h . Z_{k1} integrates to 2*pi Re(h_k) Z_k rho drho and
  // h . Z_{k2} to +/- 2*pi Im(h_k) Z_k rho drho (orientation of the second
  // kernel direction: +Im for k=0, -Im for k=1)
  auto re_part = [&](double r) { return h.at(r).real() * zk(r) * r; };
  auto im_part = [&](double r) { return h.at(r).imag() * zk(r) * r; };
  const double sgn2 = (k == 0) ? 1.0 : -1.0;
  ModeProjection out;
  out.raw1 = two_pi * integrate(re_part, 0.0, rmax, 1e-11);
  out.raw2 = sgn2 * two_pi * integrate(im_part, 0.0, rmax, 1e-11);

  auto denom_f = [&](double r) { return chi_weight(r) * zk(r) * zk(r) * r; };
  const double denom = two_pi * integrate(denom_f, 0.0, rmax, 1e-11);

  const Cplx unit2 = (k == 0) ? Cplx(0, 1) : Cplx(0, -1);
  const Cplx coeff = (out.raw1 + (out.raw2 * unit2) * Cplx(1, 0)) / denom;
  out.corrected = h;
  for (size_t i = 0; i < h.grid.size(); ++i) {
    const double r = h.grid[i];
    if (r <= rmax) out.corrected.values[i] -= coeff * chi_weight(r) * zk(r);
  }
  return out;
}

double weighted_norm_snapshot(const ModeProfile& h, double tau, const WeightSpec& spec) {
  double m = 0;
  for (size_t i = 0; i < h.grid.size(); ++i) {
    const double w = std::pow(tau, spec.nu) * (1.0 + std::pow(h.grid[i], spec.a));
    const double val = std::abs(h.values[i]);
    if (std::isfinite(val)) m = std::max(m, w * val);
  }
  return m;
}

double weighted_norm(const ModeEvolution& h, const WeightSpec& spec) {
  double m = 0;
  for (size_t j = 0; j < h.snapshots.size(); ++j)
    m = std::max(m, weighted_norm_snapshot(h.snapshots[j], h.tau_nodes[j], spec));
  return m;
}

}  // namespace hm
