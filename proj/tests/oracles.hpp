#pragma once

// Test-only oracles, independent of the library implementation paths they check.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "glasscav/geometry.hpp"

namespace oracles {

/// Orthonormal Hermite-function values psi_0..psi_n at point x.
std::vector<double> hermite_functions(int n_max, double x);

/// Truncated Hermite-Gaussian mode sum  sum_{l+m <= n_max} Xi_lm(r) Xi_lm(r') e^{-(l+m) phi}
/// with Xi_lm(r) = psi_l(sqrt2 x) psi_m(sqrt2 y). Complex phi supported.
std::complex<double> mode_sum_kernel(const glasscav::Vec2& r, const glasscav::Vec2& r_prime,
                                     std::complex<double> phi, int n_max);

/// Same sum restricted to the eta family (selector l+m = eta mod N).
std::complex<double> mode_sum_family(const glasscav::Vec2& r, const glasscav::Vec2& r_prime,
                                     double phi, int eta, int N, int n_max);

/// All single-flip-stable sign patterns of the Ising energy E = -s.Js, canonicalized
/// to s[0] = +1, found by exhaustive enumeration over all 2^n states.
std::vector<std::vector<int>> ising_local_minima(const Eigen::MatrixXd& J);

/// Brute-force double integral of rho_i rho_j G47nonlocal on a uniform midpoint grid
/// (independent refined-quadrature route for J entries). Positions/sigmas in um.
double uniform_grid_J_nonlocal(const glasscav::Vec2& ri, double sx_i, double sy_i,
                               const glasscav::Vec2& rj, double sx_j, double sy_j, double w0_um,
                               int eta, int nodes_per_dim, double halfwidth_sigma);

}  // namespace oracles
