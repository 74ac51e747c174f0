#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "hm/grids.h"

// Direct simulation of the corotational angle flow
//   v_t = v_rr + v_r/r - sin(v)cos(v)/r^2
// on (0, ell] with the boundary value held fixed and the origin pinned to
// its branch value (pi for a forward bubble, -pi after attaching the
// reversed bubble). Includes concentration-scale detection, adaptive
// run-to-blow-up with regridding, rate fitting with the logarithmic
// correction, and continuation past the singular time by attaching an
// opposite-orientation bubble.

namespace hm {

struct RadialState {
  std::vector<double> grid;  // strictly increasing nodes on (0, ell]
  std::vector<double> v;     // angle at the nodes; v.back() is the boundary value
  double t = 0;
  double bc = 0;             // boundary value, held fixed by the stepper
  double origin = M_PI;      // pinned branch value at r = 0
};

// v0(r) = w(r/lambda_init) * chi(r) + bc * (1 - chi(r)) with a smooth chi
// equal to 1 for r < ell/3 and 0 for r > ell/2.
RadialState initial_bubble_state(double ell, double lambda_init, double bc,
                                 double rmin = -1, double ratio = 1.06);

// One semi-implicit step: diffusion implicit, the angular force linearized
// about the current angle. An optional extra source g(r) supports
// manufactured-solution convergence tests.
void step_inplace(RadialState& s, double dt,
                  const std::function<double(double)>* source = nullptr);
RadialState step(RadialState s, double dt);

// 2*pi * int (v_r^2 + sin^2 v / r^2) r dr including the origin cell.
double state_energy(const RadialState& s);

// Least-squares fit of v(r) ~ w(r/lambda) over r < 10*lambda (iterated),
// seeded by the slope estimator -2/v_r(0+). Throws when the windowed rms
// residual exceeds the gate (no bubble present).
struct LambdaFit {
  double lambda = 0;            // least-squares scale
  double lambda_slope_est = 0;  // -2 / v_r(0+)
  double rms = 0;               // fit residual over the window
};
LambdaFit detect_lambda(const RadialState& s, double rms_gate = 0.15);

struct TraceRow {
  double t = 0;
  double lambda = 0;
  double lambda_slope_est = 0;
  double energy = 0;
  double dt = 0;
  int n_nodes = 0;
};

struct FlowConfig {
  double ell = 1.0;
  double bc = 0.0;
  double lambda_init = 0.1;       // default 0.1 * ell
  double dt_factor = 0.1;         // dt floor: dt_factor * lambda^2
  double dt_mod_frac = 0.002;     // dt cap: frac of time since the last scale
                                  // halving/doubling (0 = pure lambda^2 rule)
  double lambda_min_frac = 1e-6;  // stop once lambda < frac * ell
  double grid_ratio = 1.06;
  double rmin_per_lambda = 30.0;  // keep first node below lambda / this
  long long max_steps = 2000000000;
  int fit_stride = 64;            // full least-squares fit cadence
};

struct BlowupEvent {
  bool blew_up = false;
  double T_hat = std::numeric_limits<double>::quiet_NaN();
  double lambda_end = 0;
  std::vector<TraceRow> trace;          // (t, lambda, ...) samples
  std::vector<std::array<double, 2>> energy_trace;  // (t, E)
  RadialState final_state;
};

// Runs the adaptive loop until the detected scale falls below the floor
// (blow-up; T_hat extrapolated from the tail slope) or stalls/expands
// (reported as a non-blow-up run with blew_up = false).
BlowupEvent run_to_blowup(const RadialState& initial, const FlowConfig& cfg);

// Outer body map at the end of a blow-up run, re-gauged to the trivial
// branch at the origin by removing the residual bubble: v_end - w(r/lambda_end).
RadialProfile body_map(const BlowupEvent& ev);

// kappa_hat from least squares of lambda against (T_hat-t)/log^2(T_hat-t)
// over the window T_hat - t in [d_end, d_end * 10^window_decades]. The
// compensated quantity lambda*log^2(T_hat-t)/(T_hat-t) is flat for the
// logarithmically corrected law and drifts like log^2 for a linear rate.
struct RateFit {
  double kappa_hat = 0;
  double t_lo = 0, t_hi = 0;
  double residual = 0;  // rms of log lambda about the fitted law
  std::vector<std::array<double, 2>> typeII_ratio;  // (T_hat-t, lambda/(T_hat-t))
  double typeII_spread = 0;       // ratio of first to last over the window
  double compensated_spread = 0;  // max/min of the compensated quantity
  bool matches_log2_law = false;  // compensated_spread <= 3
};
RateFit fit_rate(const std::vector<std::array<double, 2>>& t_lambda,
                 double T_hat, double window_decades = 1.0);
RateFit fit_rate(const BlowupEvent& ev, double window_decades = 1.0);

// Continuation past the singular time: v(., T+eps) = v_star - w(r/lambda(eps))
// with lambda(eps) = kappa*eps/log^2(eps), run forward for `duration`. The
// trace carries tau = t - T; lambda is the scale of the attached reversed
// bubble, fitted against v_star - v.
struct ReverseResult {
  double eps = 0;
  double lambda_eps = 0;      // attachment scale at tau = eps
  double energy_before = 0;   // energy of the body map alone
  double energy_after = 0;    // energy at tau = eps
  double jump = 0;            // energy_after - energy_before
  std::vector<TraceRow> trace;
  RadialState final_state;
};
ReverseResult reverse_continue(const RadialProfile& v_star, double kappa,
                               double eps, double duration,
                               const FlowConfig& cfg);

}  // namespace hm
