#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "hm/defaults.h"
#include "hm/fitting.h"
#include "hm/grids.h"

// Inhomogeneous-heat estimates on a disk standing in for the generic smooth
// domain: a graded implicit radial solver with a heat-kernel quadrature
// oracle, the four source weights and their weighted norms, scaling-exponent
// ladders for the size estimates of the four canonical source classes, the
// convolution-tail integral bounds, and the three-constant initial-data
// adjustment that zeroes the solution at the concentration point at the
// final time.

namespace hm {

// ------------------------------------------------------------- weights

// Parameters of the weighted-norm framework around a concentration point q.
// lambda0(t) is the unit-rate concentration scale for horizon T and
// R(t) = lambda0(t)^{-beta} the matching radius.
struct WeightParams {
  double a = defaults::a_weight;
  double nu = defaults::nu_weight;
  double beta = defaults::beta;
  double sigma0 = defaults::sigma0;
  double sigma2 = defaults::sigma2;
  double T = 1e-2;
  std::array<double, 2> q{0, 0};
};

// Concentration scale and matching radius entering every weight.
double weight_lambda0(double t, const WeightParams& p);
double weight_R(double t, const WeightParams& p);

// The four source weights, i in {1,2,3,4} (r = |x-q|):
//   1: lambda0^{nu-2} R^{-a} on {r < 2 R lambda0}, 0 outside
//   2: T^{-sigma0} (1-eta(r/(R lambda0))) lambda0/(r^2+lambda0^2)
//   3: lambda0^{1/2+sigma2}/(r+lambda0)
//   4: 1
double weight_rho(int i, std::array<double, 2> x, double t,
                  const WeightParams& p);

// sup |f| / (1 + sum_i rho_i) over a log-spaced sample grid in (r, t),
// with the per-weight dominating ratios reported for diagnosis.
struct SourceNormReport {
  double value = 0;
  std::array<double, 4> per_weight_max{0, 0, 0, 0};
};
SourceNormReport norm_weighted_source(
    const std::function<double(std::array<double, 2>, double)>& f,
    const WeightParams& p, int n_r = 48, int n_t = 24);

// The six constituent sups of the solution norm (size, continuity at the
// final time, gradient size, gradient continuity, space and time Hoelder
// quotients of the gradient), each with its lambda0/R weight, plus their
// sum. gamma is the Hoelder exponent pair (2*gamma in space, gamma in time);
// the time pairs obey t2-t1 <= (T-t2)/10.
struct StarNormReport {
  double size = 0;
  double mod_cont = 0;
  double grad_size = 0;
  double grad_mod_cont = 0;
  double holder_space = 0;
  double holder_time = 0;
  double total = 0;
};
StarNormReport norm_star_psi(
    const std::function<double(std::array<double, 2>, double)>& psi,
    const WeightParams& p, double gamma = 0.25, int n_r = 32, int n_t = 16);

// --------------------------------------------------- radial heat solver

// Implicit theta-scheme for psi_t = psi_rr + psi_r/r + f on a geometrically
// graded grid over [0, domain_radius], zero initial data, zero boundary
// value at the outer radius, symmetry at r = 0. Time steps are graded
// toward the horizon: T - t shrinks geometrically down to end_gap * T.
struct RadialHeatOptions {
  double domain_radius = 1.0;
  double inner_scale = 1e-4;  // finest radial feature to resolve
  double grid_ratio = 1.05;
  int n_time = 800;
  double theta = 0.5;      // 0.5 trapezoidal, 1.0 fully implicit
  double end_gap = 1e-3;   // final time is T*(1 - end_gap)
  int startup_steps = 4;   // fully implicit start-up steps
};

struct RadialHeatResult {
  std::vector<double> r;        // grid nodes (first is 0)
  std::vector<double> t;        // step times
  std::vector<double> sup_abs;  // max_r |psi| per step
  std::vector<double> center;   // psi(0, t) per step
  RadialProfile final;          // psi(., t_end)
  double sup_space_time = 0;
  double min_space_time = 0;
  double sup_grad_final = 0;    // max |psi_r| on the final profile
};

RadialHeatResult radial_heat_duhamel(
    const std::function<double(double, double)>& f, double t_end,
    const RadialHeatOptions& opt = {});

// Same stepping with a nonzero initial radial profile (and optional source).
RadialHeatResult radial_heat_evolve(
    const std::function<double(double)>& initial,
    const std::function<double(double, double)>& f, double t_end,
    const RadialHeatOptions& opt = {});

// Free-plane Duhamel value by direct heat-kernel quadrature (the solver's
// oracle; valid while the solution has not felt the outer boundary):
//   psi(r,t) = int_0^t int_0^inf  G(r, s, t-u) f(s, u) ds du,
// G the angular average of the plane heat kernel times the ring measure.
double heat_kernel_duhamel(const std::function<double(double, double)>& f,
                           double r, double t, double tol = 1e-7,
                           double support_radius = 1.0);

// ------------------------------------------------------- lemma ladders

// The four canonical source classes: concentrated on the matching ball,
// inverse-distance with concentration rate, inverse-square with vanishing
// amplitude, and bounded.
enum class HeatLemma { concentrated, inverse_distance, inverse_square, bounded };

struct LadderResult {
  HeatLemma lemma = HeatLemma::bounded;
  std::string measure_name;
  std::vector<double> T_values;
  std::vector<double> predictor;  // regression abscissa per T
  std::vector<double> measured;
  double fitted_exponent = 0;
  double ci_halfwidth = 0;
  double predicted_exponent = 0;
  double fit_rms = 0;
};

// For each T in the ladder, builds the class's source, solves, measures the
// size of the solution, and regresses log(measure) against the class's
// predictor (the initial concentration scale for the first two classes, T
// itself for the others). Log factors are folded into the intercept; only
// the power-law exponent is compared to the prediction.
std::vector<LadderResult> verify_heat_lemma(
    HeatLemma which, const WeightParams& p, const std::vector<double>& T_ladder,
    const RadialHeatOptions& opt = {});

// --------------------------------------------------- integral tail bounds

// Ratio checks of the two convolution-tail estimates
//   (a) int_{-T}^{t-lambda0^2} (t-s)^{-a} |log(T-s)|^{-b} ds
//         vs lambda0^{2(1-a)} |log(T-t)|^{-b}
//   (b) int_{-T}^{t-lambda0^2} (T-s)^mu (t-s)^{-2} |log(T-s)|^{-l} ds
//         vs (T-t)^mu lambda0^{-2} |log(T-t)|^{-l}
// over a sample of times t in [0, T). Bounded, stable ratios (spread =
// max/min <= 10) are the pass condition.
struct Integral1Row {
  double t = 0;
  double lhs = 0;
  double rhs = 0;
  double ratio = 0;
};
struct Integral1Report {
  std::vector<Integral1Row> part_a;
  std::vector<Integral1Row> part_b;
  double spread_a = 0;
  double spread_b = 0;
};
Integral1Report verify_integral1(double a, double b, double mu, double l,
                                 double T, int n_samples = 10);

// ------------------------------------------- final-value adjustment

// Three homogeneous heat solves from initial data e_j * bump (a radial
// cut-off equal to 1 near the concentration point) give the response matrix
// at (q, T); solving the 3x3 system picks the unique coefficients c that
// cancel the forced solution there. residual is |psi(q,T)| of the re-solved
// adjusted problem (a linearity check, not a by-construction zero).
struct AdjustmentResult {
  std::array<double, 3> c{0, 0, 0};
  std::array<double, 3> forced_qT{0, 0, 0};
  double response_qT = 0;
  double residual = 0;
};
AdjustmentResult heat_adjustment(
    const std::array<std::function<double(double, double)>, 3>& f, double T,
    const RadialHeatOptions& opt = {}, double bump_radius = 0.25);

}  // namespace hm
