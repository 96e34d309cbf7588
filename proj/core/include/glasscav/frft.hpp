#pragma once

#include "glasscav/field_image.hpp"
#include "glasscav/geometry.hpp"

namespace glasscav {

struct FrftOptions {
    int oversample = 2;          ///< internal upsampling factor (power of two)
    bool warn_on_aliasing = true;
};

/// True when the chirp factors of angle alpha are adequately sampled on this grid.
bool frft_nyquist_ok(const ComplexFieldImage& img, double alpha, int oversample);

/// Discrete fractional Fourier transform of angle alpha on the image's waist-referenced
/// grid, by chirp multiply / chirp convolution / chirp multiply. Hermite-Gaussian modes
/// Xi_lm are eigenfunctions with eigenvalue e^{-i (1 + l + m) alpha}; alpha = 0 is the
/// identity and the map is norm-preserving for fields contained in the grid window.
ComplexFieldImage frft_apply(const ComplexFieldImage& img, double alpha,
                             const FrftOptions& opts = {});

/// Cavity symmetry average: (1/N) sum_l e^{i l (1+eta) M pi / N} frft(img, l M pi / N).
/// Projects onto the eta family; steady-state cavity fields are left invariant.
ComplexFieldImage symmetry_average(const ComplexFieldImage& img, const CavityGeometry& geom,
                                   const FrftOptions& opts = {});

struct CalibrationResult {
    double w0_px = 0.0;
    double center_x_px = 0.0;
    double center_y_px = 0.0;
    double cost = 0.0;
    int evaluations = 0;
    bool converged = false;
};

struct CalibrateOptions {
    double param_rel_tol = 1e-4;
    double cost_tol = 1e-8;
    int max_evaluations = 400;
    int restarts = 1;
    FrftOptions frft;
};

/// Fit (w0_px, x_c, y_c) by minimizing C = 1/2 sum |F~[I] - I|^2 with a Nelder-Mead
/// simplex seeded at the image's current calibration. Throws on all-zero images and
/// when the simplex fails to converge within the evaluation budget.
CalibrationResult calibrate_center_waist(const ComplexFieldImage& img, const CavityGeometry& geom,
                                         const CalibrateOptions& opts = {});

}  // namespace glasscav
