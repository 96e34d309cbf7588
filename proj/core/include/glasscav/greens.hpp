#pragma once

#include <complex>

#include <Eigen/Dense>

#include "glasscav/geometry.hpp"

namespace glasscav {

using Complex = std::complex<double>;

/// Mehler kernel G(r, r', phi) = sum_mu Xi_mu(r) Xi_mu(r') e^{-n_mu phi} in closed form.
/// Coordinates are in waist units (Xi00 ~ e^{-r^2}); phi may be complex with Re(phi) >= 0.
/// Throws on the singular points sinh(phi) = 0.
Complex mehler_kernel(const Vec2& r, const Vec2& r_prime, Complex phi);

/// eta-family Green's function (1/N) sum_s e^{-i eta 2 pi s / N} G(r, r', phi - 2 pi i s / N).
/// Requires geom.phi > 0; the phi = 0 limit of the 4/7 family is greens_47_nonlocal plus
/// the explicit local term handled by the coupling module.
Complex family_greens(const Vec2& r, const Vec2& r_prime, const CavityGeometry& geom);

/// Nonlocal part of the ideal (phi = 0) 4/7 Green's function at the cavity midplane,
/// sum_{nu=1..3} (1/pi s_nu) sin[(1+eta) 2 nu pi/7 + (c_nu (r^2 + r'^2) - 2 r.r')/(s_nu w0^2)].
/// Positions in physical um. The delta-function local term is carried separately with
/// weight w0^2/2 relative to this normalization (see coupling::assemble_J).
double greens_47_nonlocal(const Vec2& r_i, const Vec2& r_j, const CavityGeometry& geom);

/// Midplane 2x2 quadrature interaction matrix for even-M cavities:
/// diag(G, 0) for odd Q0, diag(0, G) for even Q0, G = Re family_greens. Cross terms vanish.
Eigen::Matrix2d midplane_interaction_matrix(const Vec2& r, const Vec2& r_prime,
                                            const CavityGeometry& geom);

}  // namespace glasscav
