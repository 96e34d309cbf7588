#include "glasscav/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "glasscav/rng.hpp"
#include "glasscav/threading.hpp"

namespace glasscav {

void RampSchedule::validate() const {
    if (t_ramp_s <= 0.0 || t_quench_s < 0.0)
        throw std::invalid_argument("RampSchedule: durations must be positive");
    if (ramp_target < 1.0 || quench_target < 1.0)
        throw std::invalid_argument("RampSchedule: targets must be >= 1 (in units of Omega_c^2)");
    if (tau_fraction <= 0.0) throw std::invalid_argument("RampSchedule: tau_fraction must be > 0");
}

double RampSchedule::omega_sq(double t_s, double omega_c_sq) const {
    if (t_s <= 0.0) return 0.0;
    if (t_s <= t_ramp_s) {
        const double tau = tau_fraction * t_ramp_s;
        return ramp_target * omega_c_sq * std::expm1(t_s / tau) / std::expm1(t_ramp_s / tau);
    }
    return quench_target * omega_c_sq;
}

namespace {

using Vec3 = Eigen::Vector3d;

struct BlochSystem {
    const CouplingMatrix& Jm;
    const PhysicalParams& phys;
    const RampSchedule& schedule;
    double omega_c_sq;
    double damping0;  // dimensionless LLG coefficient at Omega^2 = Omega_c^2

    // state layout: 3 x n matrix of unit vectors
    void deriv(double t_s, const Eigen::Matrix3Xd& m, Eigen::Matrix3Xd& dm) const {
        const int n = static_cast<int>(m.cols());
        const double omega_sq = schedule.omega_sq(t_s, omega_c_sq);
        const double lambda_drive = phys.g0_rad_s * phys.g0_rad_s * omega_sq * phys.spin_S() /
                                    (phys.delta_a_rad_s * phys.delta_a_rad_s *
                                     std::abs(phys.delta_c_rad_s));
        const double alpha = damping0 * (omega_c_sq > 0.0 ? omega_sq / omega_c_sq : 0.0);
        const Eigen::VectorXd jm = Jm.J * m.row(0).transpose();
        for (int i = 0; i < n; ++i) {
            const Vec3 mi = m.col(i);
            const Vec3 b(2.0 * lambda_drive * jm(i), 0.0, -phys.omega_z_rad_s);
            const Vec3 prec = b.cross(mi);
            const Vec3 damp = mi.cross(mi.cross(b));
            dm.col(i) = prec - alpha * damp;
        }
    }
};

/// Dormand-Prince 5(4) adaptive step on the flattened spin state.
void integrate_bloch(const BlochSystem& sys, Eigen::Matrix3Xd& m, double t0, double t1,
                     const EngineOptions& opts) {
    static const double A[7][6] = {
        {},
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
        {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
    static const double C[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
    static const double B5[7] = {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0};
    static const double B4[7] = {5179.0 / 57600, 0,       7571.0 / 16695, 393.0 / 640,
                                 -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

    const int n = static_cast<int>(m.cols());
    std::array<Eigen::Matrix3Xd, 7> k;
    for (auto& kk : k) kk.resize(3, n);
    Eigen::Matrix3Xd work(3, n), sol5(3, n), sol4(3, n);

    double t = t0;
    double h = (t1 - t0) * 1e-4;
    const double h_min = (t1 - t0) * 1e-12;
    int steps = 0;
    const int max_steps = 50'000'000;

    while (t < t1) {
        if (++steps > max_steps) throw std::runtime_error("integrate_bloch: step budget exhausted");
        h = std::min(h, t1 - t);
        sys.deriv(t, m, k[0]);
        for (int stage = 1; stage < 7; ++stage) {
            work = m;
            for (int j = 0; j < stage; ++j)
                if (A[stage][j] != 0.0) work += h * A[stage][j] * k[j];
            sys.deriv(t + C[stage] * h, work, k[stage]);
        }
        sol5 = m;
        sol4 = m;
        for (int j = 0; j < 7; ++j) {
            if (B5[j] != 0.0) sol5 += h * B5[j] * k[j];
            if (B4[j] != 0.0) sol4 += h * B4[j] * k[j];
        }
        const double err = (sol5 - sol4).cwiseAbs().maxCoeff() /
                           (opts.rel_tol * std::max(1.0, sol5.cwiseAbs().maxCoeff()));
        double max_drift = 0.0;
        for (int i = 0; i < n; ++i)
            max_drift = std::max(max_drift, std::abs(sol5.col(i).norm() - 1.0));

        if (err <= 1.0 && max_drift <= opts.norm_drift_tol) {
            t += h;
            m = sol5;
            for (int i = 0; i < n; ++i) m.col(i) /= m.col(i).norm();
            h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(err > 0 ? err : 1e-10, -0.2)));
        } else {
            h *= std::max(0.1, 0.5 * std::pow(err > 0 ? err : 10.0, -0.25));
            if (h < h_min) throw std::runtime_error("integrate_bloch: step size underflow");
        }
    }
}

SpinConfiguration run_semiclassical(const CouplingMatrix& Jm, const PhysicalParams& phys,
                                    const RampSchedule& schedule, std::uint64_t seed,
                                    const EngineOptions& opts) {
    const int n = Jm.n();
    const double omega_c_sq = critical_pump_sq(Jm, phys);
    const double dc = std::abs(phys.delta_c_rad_s);
    BlochSystem sys{Jm, phys, schedule, omega_c_sq,
                    opts.damping_scale * phys.kappa_rad_s * dc /
                        (dc * dc + phys.kappa_rad_s * phys.kappa_rad_s)};

    Rng rng = Rng::stream(seed, 0x626c6f63);
    Eigen::Matrix3Xd m(3, n);
    for (int i = 0; i < n; ++i) {
        const double xi = opts.noise_epsilon * rng.normal();
        const Vec3 v(xi, 0.0, -1.0);
        m.col(i) = v / v.norm();
    }
    integrate_bloch(sys, m, 0.0, schedule.total_s(), opts);

    SpinConfiguration out;
    out.raw_amplitudes = m.row(0).transpose();
    const double nrm = out.raw_amplitudes.norm();
    if (nrm == 0.0) throw std::runtime_error("evolve_replica: degenerate final state (|s| = 0)");
    out.s = out.raw_amplitudes / nrm;
    out.seed = seed;
    out.t_ramp_s = schedule.t_ramp_s;
    return out;
}

SpinConfiguration run_descent(const CouplingMatrix& Jm, const RampSchedule& schedule,
                              std::uint64_t seed, const EngineOptions& opts) {
    const int n = Jm.n();
    Rng rng = Rng::stream(seed, 0x626c6f63);
    Eigen::VectorXd s(n);
    for (int i = 0; i < n; ++i) s(i) = opts.noise_epsilon * rng.normal();

    const double lam_max = std::max(Jm.lambda_max(), 1e-12);
    const double step = 0.45 / lam_max;
    Eigen::VectorXd g(n);
    int iter = 0;
    for (; iter < opts.descent_max_iters; ++iter) {
        g = 2.0 * (Jm.J * s);
        double residual = 0.0;
        for (int i = 0; i < n; ++i) {
            if (std::abs(s(i)) < 1.0 - 1e-12)
                residual = std::max(residual, std::abs(g(i)));
            else
                residual = std::max(residual, std::max(0.0, -s(i) * g(i)));
        }
        if (residual < opts.descent_stationarity_tol && iter > 0) break;
        s = (s + step * g).cwiseMax(-1.0).cwiseMin(1.0);
    }
    if (iter >= opts.descent_max_iters)
        throw std::runtime_error("evolve_replica: descent engine did not converge");

    SpinConfiguration out;
    out.raw_amplitudes = s;
    const double nrm = s.norm();
    if (nrm == 0.0) throw std::runtime_error("evolve_replica: descent converged to zero state");
    out.s = s / nrm;
    out.seed = seed;
    out.t_ramp_s = schedule.t_ramp_s;
    return out;
}

}  // namespace

SpinConfiguration evolve_replica(const CouplingMatrix& Jm, const PhysicalParams& phys,
                                 const RampSchedule& schedule, Engine engine, std::uint64_t seed,
                                 const EngineOptions& opts) {
    schedule.validate();
    if (Jm.n() < 1) throw std::invalid_argument("evolve_replica: empty coupling matrix");
    if (engine == Engine::semiclassical) return run_semiclassical(Jm, phys, schedule, seed, opts);
    return run_descent(Jm, schedule, seed, opts);
}

int default_replica_count(int n_spins) {
    if (n_spins >= 16) return 200;
    if (n_spins >= 12) return 150;
    return 100;
}

Eigen::MatrixXd ReplicaEnsemble::as_matrix() const {
    if (configs.empty()) return {};
    Eigen::MatrixXd m(configs.size(), configs.front().n());
    for (std::size_t a = 0; a < configs.size(); ++a) m.row(a) = configs[a].s.transpose();
    return m;
}

ReplicaEnsemble generate_ensemble(const CouplingMatrix& Jm, const PhysicalParams& phys,
                                  const RampSchedule& schedule, int n_reps, std::uint64_t base_seed,
                                  Engine engine, const EngineOptions& opts, int threads) {
    if (n_reps < 2) throw std::invalid_argument("generate_ensemble: n_reps must be >= 2");
    ReplicaEnsemble ens;
    ens.configs.resize(n_reps);
    ens.n_spins = Jm.n();
    std::string first_error;
    parallel_for(n_reps, threads, [&](int k) {
        try {
            ens.configs[k] = evolve_replica(Jm, phys, schedule, engine,
                                            base_seed + static_cast<std::uint64_t>(k), opts);
        } catch (const std::exception& e) {
            throw std::runtime_error("replica " + std::to_string(k) + ": " + e.what());
        }
    });
    return ens;
}

SpinConfiguration binarize(const SpinConfiguration& config) {
    SpinConfiguration out = config;
    const double amp = 1.0 / std::sqrt(static_cast<double>(config.n()));
    for (int i = 0; i < config.n(); ++i) out.s(i) = (config.s(i) < 0.0) ? -amp : amp;
    out.raw_amplitudes = out.s;
    return out;
}

ReplicaEnsemble binarize(const ReplicaEnsemble& ensemble) {
    ReplicaEnsemble out = ensemble;
    for (auto& c : out.configs) c = binarize(c);
    return out;
}

}  // namespace glasscav
