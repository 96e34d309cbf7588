#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "glasscav/geometry.hpp"

namespace glasscav {

/// Transverse atomic density: Gaussian times optional HG01/HG10 admixture, all three
/// components sharing one L2 norm so that a_lm^2 are power fractions. a00^2+a01^2+a10^2 = 1.
struct DensityProfile {
    double sigma_x_um = 5.2;
    double sigma_y_um = 5.4;
    double a00 = 1.0;
    double a01 = 0.0;  ///< y-excited component
    double a10 = 0.0;  ///< x-excited component

    void validate() const;
    bool pure_gaussian() const { return a01 == 0.0 && a10 == 0.0; }
};

struct SpinSite {
    Vec2 position_um{0.0, 0.0};
    DensityProfile density;
};

/// Table of rectilinear-array sampling parameters (all lengths um).
struct PositionGroupParams {
    int n_x = 4;
    int n_y = 4;
    double d_x = 62.0;
    double d_y = 62.0;
    double w_cx = 14.0;
    double w_cy = 14.0;
    double w_x = 6.0;
    double w_y = 6.0;

    int n() const { return n_x * n_y; }
};

/// Preset sampling groups A (n=16), B (n=12), C/D (n=8).
PositionGroupParams position_group(char group);

struct PositionConstraints {
    double min_separation_um = 40.0;
    double max_radius_um = 150.0;
    int max_attempts = 1000;
};

/// Rectilinear random array: x_i = x_c + (i - (n_x-1)/2) d_x + delta_i, rows analogous.
/// Rejection-samples until the separation/radius constraints hold; deterministic per seed.
std::vector<SpinSite> sample_positions(const PositionGroupParams& params, std::uint64_t seed,
                                       const DensityProfile& density = {},
                                       const PositionConstraints& constraints = {});

/// The reference 16-site disorder realization J1 (4x4 grid).
std::vector<SpinSite> j1_fixture(const DensityProfile& density = {});

struct QuadratureConfig {
    int gauss_hermite_nodes = 24;   ///< per dimension per site (Gaussian densities)
    int uniform_nodes = 96;         ///< fallback grid for HG01/HG10 components
    double uniform_halfwidth_sigma = 6.0;
    bool check_convergence = false; ///< compare against a 2x-refined pass, flag entries
    double convergence_tol = 1e-4;
};

/// Symmetric n x n coupling matrix with provenance and eigen-data (sorted descending).
struct CouplingMatrix {
    Eigen::MatrixXd J;
    std::vector<SpinSite> sites;
    CavityGeometry geom;
    bool include_local = true;
    QuadratureConfig quadrature;
    Eigen::VectorXd eigvals;
    Eigen::MatrixXd eigvecs;

    int n() const { return static_cast<int>(J.rows()); }
    double lambda_max() const { return eigvals(0); }
    void recompute_eigen();
};

/// Local (delta-term) coupling: (w0^2/2) integral rho_i rho_j, closed form for the
/// shared-norm component basis. The w0^2/2 weight makes the split kernel the exact
/// eta-family projector alongside greens_47_nonlocal, hence J semipositive-definite.
double local_overlap_coupling(const SpinSite& a, const SpinSite& b, const CavityGeometry& geom);

/// Full dimensionless J: local overlap term plus Gauss-Hermite tensor quadrature of the
/// nonlocal 4/7 kernel against both densities.
CouplingMatrix assemble_J(const std::vector<SpinSite>& sites, const CavityGeometry& geom,
                          const QuadratureConfig& quad = {}, bool include_local = true);

/// Point-source couplings J_ij = G_non(r_i, r_j) with zero diagonal (no self-interaction).
CouplingMatrix point_source_J(const std::vector<SpinSite>& sites, const CavityGeometry& geom);

/// Drive and dissipation parameters. Angular frequencies in rad/s, detunings negative
/// (red). E_r is stored as the recoil angular frequency E_r/hbar.
struct PhysicalParams {
    double atoms_per_ensemble = 6e4;                  ///< N_A
    double g0_rad_s = 2.0 * 3.14159265358979323846 * 1.35e6;
    double kappa_rad_s = 2.0 * 3.14159265358979323846 * 1.40e5;
    double delta_a_rad_s = -2.0 * 3.14159265358979323846 * 97.2e9;
    double delta_c_rad_s = -2.0 * 3.14159265358979323846 * 20.0e6;
    double recoil_rad_s = 2.0 * 3.14159265358979323846 * 3773.0;  ///< E_r / hbar
    double omega_z_rad_s = 2.0 * 3.14159265358979323846 * 7546.0; ///< 2 E_r / hbar
    double pump_wavelength_um = 0.780;

    double spin_S() const { return atoms_per_ensemble / 2.0; }
    void validate() const;
};

/// Superradiant threshold Omega_c^2 = 2 E_r Delta_A^2 (Delta_C^2 + kappa^2) /
/// (N_A lambda_max g0^2 |Delta_C|). Throws when lambda_max <= 0.
double critical_pump_sq(const CouplingMatrix& Jm, const PhysicalParams& phys);

struct CollapseRates {
    std::vector<double> coefficients;   ///< sqrt(lambda_i kappa) g0 Omega / (2 |Delta_C| |Delta_A|)
    Eigen::MatrixXd eigvecs;            ///< matching eigenvectors, one per column
    double per_spin_rate_rad_s = 0.0;   ///< N_A kappa omega_z / |Delta_C| at threshold
};

/// Per-eigenmode collapse coefficients. Eigenvalues within -tol..0 are clipped to zero,
/// tol = 1e-8 max|lambda|; more negative values throw.
CollapseRates collapse_rates(const CouplingMatrix& Jm, const PhysicalParams& phys, double omega);

}  // namespace glasscav
