#pragma once

// Central numeric defaults shared across modules. Every exponent or knob that
// the analysis leaves as "small" or "close to" a limit gets one concrete value
// here so that tests, the CLI and the acceptance suite agree.

namespace hm::defaults {

// graded radial grids: r_i = r_min * q^i
inline constexpr double grid_ratio = 1.02;
inline constexpr double grid_rmin_frac = 1e-8;  // r_min = frac * outer radius

// adaptive quadrature target (relative)
inline constexpr double quad_tol = 1e-10;

// inner-region cut-off radius R(t) = lambda0(t)^{-beta}, beta = 1/4 + sigma_R
inline constexpr double beta = 0.26;

// weighted-norm exponents: ||h||_{a,nu} with spatial decay a, temporal nu
inline constexpr double a_weight = 1.96;
inline constexpr double nu_weight = 0.9;

// mode-1 far-field decay exponent used by the property tests
inline constexpr double sigma = 0.25;
// spare exponent in the inner-solution gradient bound
inline constexpr double sigma1 = 0.5;
// small exponents in the outer heat weights rho_2, rho_3
inline constexpr double sigma0 = 0.05;
inline constexpr double sigma2 = 0.05;
// assumed decay rate of the translation-parameter speed, |xi_dot| <= C (T-t)^sigma3
inline constexpr double sigma3 = 0.5;
// Hoelder exponent for modulus-of-continuity diagnostics
inline constexpr double holder_mu = 0.5;

// logarithmic Volterra splitting: S_delta / R_delta near-field exponents.
// delta0 drives the first corrective stage (must be small); delta the second.
// delta must satisfy delta < 1/2 and 2*beta - 1 + delta > 0, which with
// beta = 0.26 pins delta into (0.48, 0.5); 0.49 also makes the combined
// residual exponent delta + delta0 exceed 1/2.
inline constexpr double delta0 = 0.05;
inline constexpr double delta = 0.49;

}  // namespace hm::defaults
