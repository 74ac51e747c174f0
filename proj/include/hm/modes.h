#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "hm/grids.h"

// Fourier-mode reduction of the operator linearized at the bubble. A tangent
// field decomposed as
//   phi(y) = Re(phi_k(rho) e^{ik theta}) E1 + Im(phi_k(rho) e^{ik theta}) E2
// turns the linearization into the family of radial operators
//   L_k[phi] = phi'' + phi'/rho - (k^2 + 2k cos w + cos 2w) phi / rho^2.
// This module provides the potential, a finite-difference application of L_k
// on nonuniform grids, the four explicit decaying kernel elements
// (dilation/rotation k=0, translation k=1, and the k=-1, k=-2 companions),
// an elliptic solver by variation of parameters, a parabolic evolver on the
// expanding domain, the weighted projections that remove the slowly-decaying
// kernel content of a source, and the sup-type weighted norms used to measure
// decay.

namespace hm {

using Cplx = std::complex<double>;

struct ModeProfile {
  int k = 0;
  std::vector<double> grid;  // strictly increasing rho nodes
  std::vector<Cplx> values;

  Cplx at(double rho) const;  // linear interpolation, flat beyond the ends
};

struct ModeEvolution {
  int k = 0;
  std::vector<double> tau_nodes;
  std::vector<double> outer_radius;      // R(tau) per node
  std::vector<ModeProfile> snapshots;    // grids cover [0, 4*R(tau)]
};

struct WeightSpec {
  double a = 1.5;   // spatial decay exponent
  double nu = 0.9;  // temporal decay exponent
};

// k^2 + 2k cos w(rho) + cos 2w(rho); rho = 0 is a singular point.
double mode_potential(int k, double rho);

// Conservative second-order stencil for phi'' + phi'/rho minus the potential
// term, evaluated at interior nodes; the two endpoint values are set to NaN.
ModeProfile apply_Lk(const ModeProfile& phi);

// Closed-form decaying kernel elements, L_k[Z_k] = 0, for k in {-2,-1,0,1}.
double kernel_element_value(int k, double rho);
ModeProfile kernel_element(int k, const std::vector<double>& grid);

// phi(rho) = Z_k(rho) * integral_rho^{4R} dr/(r Z_k(r)^2) integral_0^r g Z_k s ds,
// so that L_k[phi] + g = 0 and phi(4R) = 0.
ModeProfile green_solve_mode(int k, const std::function<Cplx(double)>& g, double R,
                             int nodes_per_decade = 48);

// Backward-Euler evolution of d(phi)/d(tau) = L_k[phi] + h on [0, 4R(tau)]
// with zero initial data and zero Dirichlet data at the moving outer boundary.
// The domain grows by remeshing a fixed reference grid scaled to 4R(tau); the
// previous snapshot is carried over by interpolation. Step size adapts on a
// Richardson comparison (one full step vs two half steps).
struct EvolveOptions {
  int n_space = 240;          // nodes of the reference grid
  double dtau_init = 1e-3;
  double rel_tol = 1e-8;      // Richardson acceptance threshold
  int max_rejects = 40;
  double dtau_max_frac = 0.05;  // cap dtau at this fraction of elapsed tau
};
ModeEvolution evolve_mode(int k, const std::function<Cplx(double, double)>& h,
                          const std::function<double(double)>& R_of_tau, double tau0,
                          double tau1, const EvolveOptions& opt = {});

// Projections of a mode-k source onto the kernel directions over B_{2R},
// weighted by chi(y) = 1/(1+|y|). For k in {0,1} returns the two raw moments
// integral h . Z_{kj} dy and the corrected source h - sum_j c_j chi Z_{kj}
// whose moments vanish.
struct ModeProjection {
  double raw1 = 0, raw2 = 0;       // integral h . Z_{k1} dy, integral h . Z_{k2} dy
  ModeProfile corrected;
};
ModeProjection project_mode(const ModeProfile& h, double R);

// sup over samples of tau^nu (1 + |y|^a) |h|
double weighted_norm(const ModeEvolution& h, const WeightSpec& spec);
double weighted_norm_snapshot(const ModeProfile& h, double tau, const WeightSpec& spec);

}  // namespace hm
