#pragma once
// Rate/rotation modulation machinery for the concentration parameter
// p(t) = lambda(t) e^{i alpha(t)}: the averaged memory kernels Gamma_j built
// from K(zeta) = (1 - e^{-zeta/4})/zeta, the history operator B0 and its
// split forms, weighted-space inverses, and the Picard solvers that produce a
// rate path from a slowly varying complex drive a(t).
//
// Conventions. ell = -log(T-t) is the primary time coordinate (T < 1, so
// ell > 0 on the whole window [-T, T]). Rate derivatives are stored as
// q(ell) = pdot * ell^2, which is exactly constant for the base ansatz
// pdot = -kappa |log T| / log^2(T-t). The defining integrals for Gamma_j
// evaluate to -1/2 at 0; every downstream operator needs the normalization
// Gamma(0) = +1/2 (the far-history weight 2*Gamma-1 must vanish as zeta->0),
// so the table negates on use and the raw sign is reported separately.

#include <complex>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace hm {

using Cplx = std::complex<double>;

// ---------------------------------------------------------------- kernels

struct KernelValues {
  double K;   // (1 - e^{-zeta/4})/zeta, limit 1/4
  double K1;  // dK/dzeta, limit -1/32
  double K2;  // d2K/dzeta2, limit 1/192
};

// Series evaluation below zeta = 0.1 (the direct formulas lose digits to
// cancellation there); analytic elsewhere. zeta < 0 is a domain error.
KernelValues K_kernel(double zeta);

// Raw averaged kernel: integral over rho of rho^3 w_rho^3 times
//   j=1: K + zeta K' rho^2/(1+rho^2)
//   j=2: K + (1/4) zeta K' - (1/4) zeta^2 K''
// at zeta = tau (1+rho^2). Value at tau = 0 is -1/2. Adaptive quadrature,
// relative tolerance 1e-8. j must be 1 or 2.
double gamma_j(double tau, int j);

// Limit of tau * gamma_j(tau) as tau -> infinity (raw sign), extrapolated
// from a tau-ladder.
double gamma_tail_constant(int j);

// Normalized kernel table: stores ghat_j = -gamma_j on a log-spaced grid with
// cubic-spline interpolation in log(tau), a fitted tau*(A + B log tau) model
// below tau_min and a fitted c/tau + d/tau^2 tail above tau_max.
class GammaTable {
 public:
  GammaTable(double tau_min = 1e-8, double tau_max = 1e6,
             int pts_per_decade = 24);

  double g1(double tau) const;  // normalized: +1/2 at 0
  double g2(double tau) const;
  double tail1() const { return tail_c_[0]; }  // lim tau*ghat_1
  double tail2() const { return tail_c_[1]; }
  double raw_at_zero() const { return raw0_; }  // as-written value (-1/2)
  double tau_min() const { return tau_min_; }
  double tau_max() const { return tau_max_; }

  // CSV rows are the raw (as-written) values: tau,gamma1,gamma2.
  const std::vector<double>& taus() const { return tau_; }
  std::vector<double> raw_column(int j) const;

 private:
  double eval(int j, double tau) const;
  double tau_min_, tau_max_;
  std::vector<double> x_;               // log(tau) knots
  std::vector<double> tau_;             // knots
  std::vector<double> y_[2], y2_[2];    // normalized values + spline moments
  double near_a_[2], near_b_[2];        // ghat - ghat(0) ~ tau (A + B log tau)
  double tail_c_[2], tail_d_[2];        // ghat ~ c/tau + d/tau^2
  double ghat0_;                        // +1/2 (computed)
  double raw0_;
};

// ---------------------------------------------------------------- paths

// Base rate ansatz. value = kappa |log T| Int_t^T ds/log^2(T-s) (closed form
// via the exponential integral E1), slope = -kappa |log T|/log^2(T-t).
// Requires t < T < 1.
struct Lambda0 {
  double value;
  double slope;
};
Lambda0 lambda0(double t, double T, double kappa);

// Scale factor |log T| (T-t)/log^2(T-t) used in history cutoffs and weights.
double lambda0_scale(double t, double T);
double lambda0_scale_at_ell(double ell, double T);
// R(t) = lambda0_scale(t)^{-beta}.
double outer_radius_R(double t, double T, double beta);

struct PathGridOptions {
  int n_uniform = 160;      // nodes on [-T, T/2)
  double dl = 0.075;        // ell spacing of the clustered segment
  double ell_extra = 26.0;  // clustered segment reaches ell = |log T| + extra
};

// Shared time grid on [-T, t_end], t_end = T - T e^{-ell_extra}: uniform in t
// up to T/2, then equi-spaced in ell = -log(T-t).
struct PathGrid {
  double T = 0;
  std::vector<double> ell;  // strictly increasing
  std::vector<double> t;    // t[i] = T - exp(-ell[i])
  int n() const { return static_cast<int>(ell.size()); }
  double ell_of_minusT() const { return ell.front(); }
  double ell_end() const { return ell.back(); }
  int index_below(double ell_query) const;  // last i with ell[i] <= query
};
PathGrid build_time_grid(double T, const PathGridOptions& opt = {});

// Sampled complex rate path on a PathGrid. q[i] = pdot(t_i) * ell_i^2;
// p is rebuilt from q by finalize() (backward integration, p(T) = 0 + the
// asymptotic tail beyond the last node). Interpolation is local-cubic in ell.
struct ParamPath {
  std::shared_ptr<const PathGrid> grid;
  std::vector<Cplx> q;
  std::vector<Cplx> p;

  ParamPath() = default;  // empty shell; usable only after assignment
  explicit ParamPath(std::shared_ptr<const PathGrid> g);
  void finalize();

  Cplx pdot_at_ell(double ell) const;
  Cplx p_at_ell(double ell) const;
  Cplx pdot_at(double t) const;
  Cplx p_at(double t) const;
  double dabs_at_ell(double ell) const;  // d|p|/dt = Re(conj(p) pdot)/|p|
  double T() const { return grid->T; }
};

// Base path q = -kappa |log T| (constant in ell): pdot = -kappa|logT|/ell^2.
ParamPath p0_path(Cplx kappa, std::shared_ptr<const PathGrid> grid);

// Complex path sampled through a callable of ell.
using PathFn = std::function<Cplx(double ell)>;
PathFn path_fn(const ParamPath& p);       // its pdot
PathFn const_path_fn(Cplx value);

// ---------------------------------------------------------------- operators

// B0[g](t) = Int_{-T}^{t - lambda0_scale(t)^2} g(s)/(t-s) ds, adaptive in
// u = log(t-s), relative tolerance tol. Empty interval -> 0.
Cplx B0_op(const PathFn& g, double t, double T, double tol = 1e-8);

// Int_{-T}^{T} pdot(s)/(T-s) ds = Int q(ell)/ell^2 dell + tail (q -> const).
Cplx B0_at_T(const ParamPath& p);

struct BtildeParts {
  Cplx far;   // weight 2*ghat_j - 1 up to the lambda0^2 cutoff
  Cplx near;  // weight 2*ghat_j over the last lambda0^2 of history
};
BtildeParts Btilde_parts(const ParamPath& p, double t, int j,
                         const GammaTable& tab);

// Radial/angular projected combination
//   (p/|p|) Re(conj(p)/|p| * Btilde_1) + i (p/|p|) Im(conj(p)/|p| * Btilde_2)
Cplx Btilde_full(const ParamPath& p, double t, const GammaTable& tab);

// Reduced-system diagnostics: B_j(t) = 2 Re/Im(e^{-i alpha(t)}
// Int_{-T}^t pdot(s) ghat_j(|p(t)|^2/(t-s)) ds/(t-s)); for constant alpha,
// B2 vanishes identically and B1 -> -kappa as t -> T.
double B_reduced(const ParamPath& p, double t, int j, const GammaTable& tab);

// psi(t) = Int_{-T}^t pdot/(T-s) ds - pdot(t) log(T-t); constant along the
// base ansatz.
Cplx psi_diagnostic(const ParamPath& p, double t);

struct SRParts {
  Cplx S;  // g(t)[(1+delta)log(T-t) - 2 log lambda0] + far history
  Cplx R;  // -Int (g(t)-g(s))/(t-s) over the intermediate window
};
// S + R = B0[g](t) exactly.
SRParts S_R_split(const PathFn& g, double t, double T, double delta,
                  double tol = 1e-8);

// L0t[g](t) = (1-delta)|log(T-t)| g(t) + Int_{-T}^t g(s)/(T-s) ds.
Cplx L0tilde_apply(const PathFn& g, double t, double T, double delta);
// L1t = S_delta - L0t, written cancellation-free:
//   g(t)(4 log ell - 2 log|log T|) + [four-window split of the history].
Cplx L1tilde_apply(const PathFn& g, double t, double T, double delta,
                   double tol = 1e-7);
// L1 of the multiplicative split S_delta = (1-delta) ell g + L1mult[g]:
//   L1mult[g](t) = g(t)(4 log ell - 2 log|log T|) + far history integral.
Cplx L1mult_apply(const PathFn& g, double t, double T, double delta,
                  double tol = 1e-7);

// Particular inverse of L0t: given f with f(T) = 0 decaying like
// |log(T-t)|^{-k}, k > beta - 1, beta = (2-delta)/(1-delta), returns g with
//   gdot = f/((1-delta) ell) + ((beta-1)/(1-delta)) ell^{-beta} J(t),
//   J(t) = Int_t^T |log(T-s)|^{beta-2} f(s)/(T-s) ds,  g(T) = 0.
// L0t[gdot] - f is then constant in t.
ParamPath T0_inverse(const std::function<Cplx(double ell)>& f, double delta,
                     std::shared_ptr<const PathGrid> grid);

// Weighted norms. norm_mu_l: sup (T-t)^{-mu} |log(T-t)|^l |g|.
double norm_mu_l(const std::vector<Cplx>& g, const PathGrid& grid, double mu,
                 double l);
// Pairwise Holder seminorm, pairs restricted to t - s <= (T-t)/10:
// sup (T-t)^{-m} |log(T-t)|^l |f(t)-f(s)|/(t-s)^gamma.
double norm_holder(const std::function<Cplx(double t)>& f,
                   const PathGrid& grid, double gamma_exp, double m, double l);
// sup |log(T-t)|^k |gdot| and sup |log(T-t)|^k |f|.
double norm_star_k(const ParamPath& g, double k);
double norm_dstar_k(const std::vector<Cplx>& f, const PathGrid& grid,
                    double k);

// ---------------------------------------------------------------- solvers

struct PicardReport {
  std::vector<double> step_norms;  // per-iteration update norms
  bool converged = false;
  // worst ratio step[k+1]/step[k] over k >= 1 (monotone decrease check)
  double worst_ratio_after2 = 0.0;
  Cplx c_star{};  // free constant enforced by the final linear solve
};

struct SolveOptions {
  double picard_tol = 1e-5;   // relative decrease of the update norm
  int max_iter = 24;
  double quad_tol = 3e-7;     // in-loop history quadrature tolerance
  double final_tol = 1e-8;    // reporting quadrature tolerance
  double source_coeff = 1.0;  // coefficient on the drive a(t); the T-limit
                              // identity fixes kappa ~ -source_coeff*a(T)
  double k_star = 1.9;        // exponent for the *-norm monitors
};

struct PkappaResult {
  ParamPath p;                  // combined path (base + both corrections)
  ParamPath p_stage1;           // base + first correction
  Cplx c_kappa;                 // T-limit constant B0[pdot](T)
  PicardReport stage1, stage2;
  std::vector<double> t_samples;
  std::vector<double> residual_abs;  // |B0 - 2 d|p|/dt + Btilde - c_kappa|
  double fitted_exponent = 0;        // slope of log|res| vs log(T-t)
  double stage1_star_norm = 0;       // sup ell^{k+1} |pdot_1|
};

PkappaResult solve_pkappa(Cplx kappa, double T, double delta0, double delta,
                          const GammaTable& tab, const SolveOptions& opt = {});

struct LamalResult {
  Cplx kappa;
  Cplx aT;
  Cplx c_final;                 // residual constant at the root
  double kappa_abs_gap = 0;     // | |kappa|/|a(T)| - 1 |
  double kappa_arg_gap = 0;     // |arg kappa - arg(-a(T))|
  ParamPath p;                  // full path
  PicardReport corr;            // drive-correction Picard report
  std::vector<double> t_samples;
  std::vector<double> residual_abs;   // full-system residual (no constant)
  std::vector<double> envelope;       // (T-t)^0 * R^{1-a} comparison weight
  double sigma2_fit = 0;              // slope of log(|res| R^{a-1}) vs log(T-t)
  double sigma2_ci95 = 0;
  int outer_evals = 0;
  PkappaResult base;
};

// Drive a(t) given as a callable on [0,T] (extended constant below 0) with
// its end value aT = a(T). Outer loop root-finds kappa so the additive
// constant vanishes; inner loop is the multiplicative-split Picard iteration
// at parameter delta.
LamalResult solve_lamal(const std::function<Cplx(double t)>& a, Cplx aT,
                        double T, double delta0, double delta,
                        const GammaTable& tab, const SolveOptions& opt = {});

}  // namespace hm
