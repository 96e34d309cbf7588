#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "glasscav/coupling.hpp"

namespace glasscav {

/// Pump power schedule: exponential ramp 0 -> ramp_target * Omega_c^2 over t_ramp,
/// then a step quench to quench_target * Omega_c^2 held for t_quench.
struct RampSchedule {
    double t_ramp_s = 5e-3;
    double t_quench_s = 300e-6;
    double ramp_target = 4.0;
    double quench_target = 5.0;
    double tau_fraction = 1.0 / 3.0;  ///< ramp time constant as a fraction of t_ramp

    void validate() const;
    double total_s() const { return t_ramp_s + t_quench_s; }
    /// Omega^2(t) given the critical value Omega_c^2.
    double omega_sq(double t_s, double omega_c_sq) const;
};

struct SpinConfiguration {
    Eigen::VectorXd s;                ///< unit-norm <S_i^x> pattern
    Eigen::VectorXd raw_amplitudes;   ///< pre-normalization amplitudes
    std::uint64_t seed = 0;
    double t_ramp_s = 0.0;

    int n() const { return static_cast<int>(s.size()); }
};

struct ReplicaEnsemble {
    std::vector<SpinConfiguration> configs;
    std::string j_ref;   ///< provenance id (digest of the coupling matrix)
    int n_spins = 0;

    int n_reps() const { return static_cast<int>(configs.size()); }
    /// Rows = replicas, columns = spins.
    Eigen::MatrixXd as_matrix() const;
};

enum class Engine { semiclassical, descent };

struct EngineOptions {
    double noise_epsilon = 1e-3;        ///< initial transverse symmetry-breaking noise
    double damping_scale = 1.0;         ///< multiplies kappa |Dc| / (Dc^2 + kappa^2)
    double rel_tol = 1e-8;              ///< adaptive integrator tolerance
    double norm_drift_tol = 1e-9;       ///< per-step unit-norm drift rejection threshold
    int descent_max_iters = 200000;
    double descent_stationarity_tol = 1e-8;
};

/// One replica: mean-field Bloch evolution through ramp + quench (semiclassical) or
/// projected gradient ascent of s.J s on [-1,1]^n (descent), from a seeded noisy start.
SpinConfiguration evolve_replica(const CouplingMatrix& Jm, const PhysicalParams& phys,
                                 const RampSchedule& schedule, Engine engine, std::uint64_t seed,
                                 const EngineOptions& opts = {});

/// Replica count defaults by system size: 200 (n >= 16), 150 (n >= 12), 100 below.
int default_replica_count(int n_spins);

/// n_reps independent replicas with per-replica seed streams (base_seed, k); replicas
/// are embarrassingly parallel and the result is identical for any worker count.
ReplicaEnsemble generate_ensemble(const CouplingMatrix& Jm, const PhysicalParams& phys,
                                  const RampSchedule& schedule, int n_reps, std::uint64_t base_seed,
                                  Engine engine = Engine::semiclassical,
                                  const EngineOptions& opts = {}, int threads = 0);

/// Sign projection s_i -> sgn(s_i)/sqrt(n), with sgn(0) = +1. Idempotent.
SpinConfiguration binarize(const SpinConfiguration& config);
ReplicaEnsemble binarize(const ReplicaEnsemble& ensemble);

}  // namespace glasscav
