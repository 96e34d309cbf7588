#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "glasscav/dynamics.hpp"

namespace glasscav {

/// Replica overlap matrix Q_ab = s^a . s^b (unit diagonal for unit-norm replicas).
struct OverlapMatrix {
    Eigen::MatrixXd Q;
    int n_reps() const { return static_cast<int>(Q.rows()); }
};

OverlapMatrix overlap_matrix(const ReplicaEnsemble& ensemble);
OverlapMatrix overlap_matrix(const Eigen::MatrixXd& replica_rows);

struct Histogram {
    std::vector<double> bin_centers;
    std::vector<double> probabilities;
    std::vector<double> stderr_;

    std::size_t size() const { return bin_centers.size(); }
};

/// Histogram of off-diagonal overlaps on [-1, 1]; symmetrized over q -> -q by default.
Histogram overlap_distribution(const OverlapMatrix& q, int bins = 50, bool symmetrize = true);

/// Disorder average: unweighted mean of per-realization histograms on a common binning,
/// with bootstrap standard errors over realizations.
Histogram parisi_distribution(const std::vector<Histogram>& realizations, int n_boot = 1000,
                              std::uint64_t seed = 0);

struct ParisiFit {
    double q_ea = 1.0;
    double a = 0.0, b = 0.0, c = 0.0;  ///< quadratic coefficients below the breakpoint
    double x_star = 1.0;
    double fit_residual = 0.0;
    bool fitted = false;               ///< false when the distribution is a single atom
};

struct ParisiFunction {
    std::vector<double> x;  ///< cumulative probability grid
    std::vector<double> q;  ///< right-continuous generalized inverse q(x)
    ParisiFit fit;

    double fitted_q(double xv) const {
        const double quad = fit.a * xv * xv + fit.b * xv + fit.c;
        return std::min(quad, fit.q_ea);
    }
};

/// q(x): inverse of x(q) = P(|q'| <= q), sampled on the bin lattice, plus a
/// least-squares piecewise quadratic-constant fit with continuity at x*.
ParisiFunction parisi_function(const Histogram& parisi_hist);

struct KCorrelator {
    Histogram histogram;
    double mean_k = 0.0;
    double fwhm = 0.0;       ///< from a Gaussian-KDE of the K samples
    std::size_t n_triples = 0;
};

/// Ultrametricity statistic over replica triples: K = (d(1) - d(2)) / sigma_d with
/// d = 1 - |q| sorted descending within the triple and sigma_d the standard deviation
/// of all pairwise distances. All K = 0 when sigma_d vanishes.
KCorrelator k_correlator(const OverlapMatrix& q, int bins = 60);

struct DendrogramNode {
    int left = -1;           ///< node index (< n_leaves: leaf id)
    int right = -1;
    double height = 0.0;
    int count = 0;
};

enum class Linkage { average, single, complete };

struct Dendrogram {
    std::vector<DendrogramNode> merges;  ///< n_leaves-1 merges, indices offset by n_leaves
    std::vector<int> leaf_order;
    int n_leaves = 0;
};

/// Agglomerative clustering on d = 1 - |q| (UPGMA by default) with the leaf order for
/// block-diagonal display of Q.
Dendrogram cluster_replicas(const OverlapMatrix& q, Linkage linkage = Linkage::average);

struct EntropyEstimate {
    double plug_in_bits = 0.0;
    double jackknife_bits = 0.0;
    int distinct_patterns = 0;
};

/// Base-2 Shannon entropy of the Z2-symmetrized sign-pattern distribution; the
/// jackknife form n H - (n-1) <H_loo> removes the leading small-sample bias.
EntropyEstimate shannon_entropy_jackknife(const ReplicaEnsemble& ensemble);

struct MagnetizationStats {
    Histogram histogram;
    double mean_abs_m = 0.0;
    double mean_m = 0.0;
    double stderr_mean_m = 0.0;
};

/// Per-replica sign magnetization m_a = (1/n) sum_i sgn(s^a_i).
MagnetizationStats magnetization_stats(const ReplicaEnsemble& ensemble, int bins = 0);

/// Bootstrap standard errors of any vector statistic of the ensemble: resample
/// replicas with replacement n_boot times, report per-component standard deviation.
std::vector<double> bootstrap_errors(
    const std::function<std::vector<double>(const Eigen::MatrixXd&)>& statistic,
    const Eigen::MatrixXd& replica_rows, int n_boot = 1000, std::uint64_t seed = 0);

}  // namespace glasscav
