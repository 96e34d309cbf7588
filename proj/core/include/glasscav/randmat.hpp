#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "glasscav/coupling.hpp"
#include "glasscav/glass.hpp"

namespace glasscav {

/// Eigenvalues of a (zero-diagonal) coupling matrix divided by their standard
/// deviation, sorted ascending. No mean shift is applied.
Eigen::VectorXd eigen_spectrum_normalized(const CouplingMatrix& Jm);

struct HellingerBinning {
    int bins = 61;
    double lo = -3.05;
    double hi = 3.05;
};

/// Hellinger distance in [0, 1] between the pooled normalized spectrum and the
/// semicircle law p_sc ~ sqrt(1 - lambda^2/4) on matched bins.
double hellinger_to_semicircle(const std::vector<double>& pooled_eigenvalues,
                               const HellingerBinning& binning = {});

struct FrustrationStats {
    double p_negative = 0.0;          ///< P(J_ij < 0), off-diagonal
    double p_frustrated_triple = 0.0; ///< P(J_ij J_jk J_ki < 0)
    double pearson = 0.0;             ///< Corr(J_ij, J_jk) over shared-vertex pairs
    std::size_t n_triples = 0;
};

/// Sign/frustration statistics pooled over a set of coupling matrices. Triples are
/// enumerated exhaustively for n <= 20 and Monte Carlo sampled above.
FrustrationStats frustration_stats(const std::vector<Eigen::MatrixXd>& j_matrices,
                                   std::uint64_t mc_seed = 0, int mc_triples = 100000);

struct SweepCell {
    int n = 0;
    double w_over_w0 = 0.0;
    double hellinger = 0.0;
    double hellinger_stderr = 0.0;
    double p_negative = 0.0;
    double p_negative_stderr = 0.0;
    double p_frustrated = 0.0;
    double p_frustrated_stderr = 0.0;
    double pearson = 0.0;
    double pearson_stderr = 0.0;
    int draws = 0;
};

struct SweepResult {
    std::vector<SweepCell> cells;
    std::uint64_t seed = 0;
};

/// FM -> glass crossover sweep: positions drawn from an isotropic 2D Gaussian of
/// standard deviation w about the cavity center, point-source J per draw, statistics
/// aggregated per (n, w/w0) cell. Deterministic per seed, parallel over draws.
SweepResult sweep_w(const std::vector<int>& n_values, const std::vector<double>& w_over_w0,
                    int draws_per_cell, std::uint64_t seed, const CavityGeometry& geom,
                    int threads = 0);

}  // namespace glasscav
