#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "glasscav/coupling.hpp"
#include "glasscav/dynamics.hpp"
#include "glasscav/field_image.hpp"

namespace glasscav {

struct ImageGridSpec {
    int n_px = 384;
    double pixel_pitch_um = 2.5;
};

struct SynthesisOptions {
    ImageGridSpec grid;
    std::optional<double> noise_snr_db;  ///< additive complex Gaussian pixel noise
    std::uint64_t noise_seed = 0;
    double scale = 1.0;                  ///< overall field amplitude (g0 Omega / Delta_A Delta_C folded)
};

/// Steady-state midplane emission for a spin configuration: for each site the local
/// source (w0^2/2) rho_i plus the three defocused nonlocal components, all weighted by
/// s_i. Throws when a site lies outside the imaged region.
ComplexFieldImage synthesize_field(const SpinConfiguration& config,
                                   const std::vector<SpinSite>& sites,
                                   const CavityGeometry& geom,
                                   const SynthesisOptions& opts = {});

struct FitSite {
    double amplitude = 0.0;           ///< signed A_i
    Vec2 position_um{0.0, 0.0};
    double a00 = 1.0;
    double a01 = 0.0;
    double a10 = 0.0;
};

struct FitResult {
    std::vector<FitSite> sites;
    double sigma_x_um = 0.0;
    double sigma_y_um = 0.0;
    double residual = 0.0;            ///< |I - model|^2 / |I|^2
    Eigen::VectorXd recovered_s;      ///< unit-norm spins from the a00 amplitudes
    int iterations = 0;
    bool converged = false;
    bool rank_warning = false;        ///< two sites overlapped within a density width
};

struct FitOptions {
    int max_iterations = 200;
    double cost_rel_tol = 1e-10;
    double position_step_um = 0.05;   ///< finite-difference step for position Jacobian
    double sigma_step_um = 0.01;      ///< finite-difference step for the global widths
};

/// Separable nonlinear least squares against the emission model: amplitudes solved
/// linearly per outer step, positions and global sigmas refined by damped (Levenberg)
/// iterations with finite-difference Jacobians. Fits the real part of the image.
FitResult fit_spins(const ComplexFieldImage& image, const std::vector<SpinSite>& initial_sites,
                    const CavityGeometry& geom, const FitOptions& opts = {});

/// Image minus the fitted nonlocal field: what remains is the local source layer,
/// concentrated at the site positions with the fitted signs.
ComplexFieldImage local_spin_map(const ComplexFieldImage& image, const FitResult& fit,
                                 const CavityGeometry& geom);

}  // namespace glasscav
