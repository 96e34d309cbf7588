#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "glasscav/coupling.hpp"
#include "glasscav/greens.hpp"
#include "glasscav/quadrature.hpp"

namespace glasscav {

namespace {

constexpr double kPi = std::numbers::pi;
const std::complex<double> kI{0.0, 1.0};

/// One scalar density component along one dimension: weight times polynomial factor.
/// Components use the shared-L2-norm basis {1, 2t} in the scaled variable t = (x-x0)/(sqrt2 sigma).
struct DimComponent {
    double amplitude;     // a_lm
    bool excited_x;       // polynomial factor 2t on the x factor
    bool excited_y;       // polynomial factor 2t on the y factor
};

std::vector<DimComponent> density_components(const DensityProfile& d) {
    std::vector<DimComponent> out;
    if (d.a00 != 0.0) out.push_back({d.a00, false, false});
    if (d.a10 != 0.0) out.push_back({d.a10, true, false});
    if (d.a01 != 0.0) out.push_back({d.a01, false, true});
    return out;
}

/// 1D quadrature nodes x_k and weights for integrating rho-dim-factor(x) h(x) dx.
struct NodeSet {
    Eigen::VectorXd x;
    Eigen::VectorXd w_plain;    // factor 1
    Eigen::VectorXd w_excited;  // factor 2t
};

NodeSet make_nodes(double x0, double sigma, const QuadratureConfig& quad, bool use_gauss_hermite) {
    NodeSet ns;
    if (use_gauss_hermite) {
        const auto [t, w] = gauss_hermite_nodes(quad.gauss_hermite_nodes);
        const int n = static_cast<int>(t.size());
        ns.x.resize(n);
        ns.w_plain.resize(n);
        ns.w_excited.resize(n);
        const double inv_sqrt_pi = 1.0 / std::sqrt(kPi);
        for (int k = 0; k < n; ++k) {
            ns.x(k) = x0 + std::numbers::sqrt2 * sigma * t(k);
            ns.w_plain(k) = w(k) * inv_sqrt_pi;
            ns.w_excited(k) = ns.w_plain(k) * 2.0 * t(k);
        }
    } else {
        const int n = quad.uniform_nodes;
        const double half = quad.uniform_halfwidth_sigma * sigma;
        const double dx = 2.0 * half / n;
        ns.x.resize(n);
        ns.w_plain.resize(n);
        ns.w_excited.resize(n);
        for (int k = 0; k < n; ++k) {
            const double x = x0 - half + (k + 0.5) * dx;
            const double t = (x - x0) / (std::numbers::sqrt2 * sigma);
            const double gauss = std::exp(-t * t) / (std::sqrt(2.0 * kPi) * sigma);
            ns.x(k) = x;
            ns.w_plain(k) = dx * gauss;
            ns.w_excited(k) = dx * gauss * 2.0 * t;
        }
    }
    return ns;
}

/// Double sum over two node sets of exp[i (a (x^2 + x'^2) + b x x')].
std::complex<double> chirp_double_sum(const Eigen::VectorXd& x1, const Eigen::VectorXd& w1,
                                      const Eigen::VectorXd& x2, const Eigen::VectorXd& w2,
                                      double a, double b) {
    std::complex<double> acc{0.0, 0.0};
    for (int p = 0; p < x1.size(); ++p) {
        const std::complex<double> u = w1(p) * std::exp(kI * (a * x1(p) * x1(p)));
        std::complex<double> inner{0.0, 0.0};
        for (int q = 0; q < x2.size(); ++q) {
            inner += w2(q) * std::exp(kI * (a * x2(q) * x2(q) + b * x1(p) * x2(q)));
        }
        acc += u * inner;
    }
    return acc;
}

struct SiteNodes {
    NodeSet x;
    NodeSet y;
};

/// Nonlocal J entry by tensor quadrature of the 4/7 kernel against both densities.
double nonlocal_entry(const SpinSite& si, const SiteNodes& ni, const SpinSite& sj,
                      const SiteNodes& nj, const CavityGeometry& geom) {
    const double w0_sq = geom.w0_um * geom.w0_um;
    const auto comps_i = density_components(si.density);
    const auto comps_j = density_components(sj.density);
    double total = 0.0;
    for (int nu = 1; nu <= 3; ++nu) {
        const double ang = 2.0 * nu * kPi / 7.0;
        const double c = std::cos(ang);
        const double s = std::sin(ang);
        const double a = c / (s * w0_sq);
        const double b = -2.0 / (s * w0_sq);
        const std::complex<double> phase = std::exp(kI * ((1.0 + geom.eta) * ang));
        for (const auto& ci : comps_i) {
            for (const auto& cj : comps_j) {
                const auto& wxi = ci.excited_x ? ni.x.w_excited : ni.x.w_plain;
                const auto& wyi = ci.excited_y ? ni.y.w_excited : ni.y.w_plain;
                const auto& wxj = cj.excited_x ? nj.x.w_excited : nj.x.w_plain;
                const auto& wyj = cj.excited_y ? nj.y.w_excited : nj.y.w_plain;
                const std::complex<double> fx = chirp_double_sum(ni.x.x, wxi, nj.x.x, wxj, a, b);
                const std::complex<double> fy = chirp_double_sum(ni.y.x, wyi, nj.y.x, wyj, a, b);
                total += ci.amplitude * cj.amplitude * std::imag(phase * fx * fy) / (kPi * s);
            }
        }
    }
    return total;
}

/// Exact 1D integral of two Gaussian-component factors:
/// int f1((x-x1)/s1) N(x;x1,s1) f2((x-x2)/s2) N(x;x2,s2) dx with f in {1, 2t/sqrt2...}.
double gaussian_pair_integral_1d(double x1, double s1, bool ex1, double x2, double s2, bool ex2) {
    const double var = s1 * s1 + s2 * s2;
    const double diff = x1 - x2;
    const double overlap = std::exp(-diff * diff / (2.0 * var)) / std::sqrt(2.0 * kPi * var);
    // moments of the product Gaussian
    const double sp2 = (s1 * s1 * s2 * s2) / var;
    const double mu = (x1 * s2 * s2 + x2 * s1 * s1) / var;
    auto factor = [&](bool ex, double x0, double s, double other_moment) {
        (void)other_moment;
        return ex ? 2.0 * (mu - x0) / (std::numbers::sqrt2 * s) : 1.0;
    };
    if (!ex1 && !ex2) return overlap;
    if (ex1 != ex2) return overlap * factor(true, ex1 ? x1 : x2, ex1 ? s1 : s2, 0.0);
    // both excited: E[2 t1 * 2 t2] = (2/(sqrt2 s1))(2/(sqrt2 s2)) (sp2 + (mu-x1)(mu-x2))
    return overlap * (2.0 / (std::numbers::sqrt2 * s1)) * (2.0 / (std::numbers::sqrt2 * s2)) *
           (sp2 + (mu - x1) * (mu - x2));
}

}  // namespace

double local_overlap_coupling(const SpinSite& a, const SpinSite& b, const CavityGeometry& geom) {
    const double w0_sq = geom.w0_um * geom.w0_um;
    const auto ca = density_components(a.density);
    const auto cb = density_components(b.density);
    double acc = 0.0;
    for (const auto& fi : ca) {
        for (const auto& fj : cb) {
            const double ix = gaussian_pair_integral_1d(a.position_um[0], a.density.sigma_x_um,
                                                        fi.excited_x, b.position_um[0],
                                                        b.density.sigma_x_um, fj.excited_x);
            const double iy = gaussian_pair_integral_1d(a.position_um[1], a.density.sigma_y_um,
                                                        fi.excited_y, b.position_um[1],
                                                        b.density.sigma_y_um, fj.excited_y);
            acc += fi.amplitude * fj.amplitude * ix * iy;
        }
    }
    return 0.5 * w0_sq * acc;
}

void CouplingMatrix::recompute_eigen() {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(J);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("CouplingMatrix: eigendecomposition failed");
    // Eigen sorts ascending; flip to descending
    const Eigen::Index n_ = J.rows();
    eigvals.resize(n_);
    eigvecs.resize(n_, n_);
    for (Eigen::Index k = 0; k < n_; ++k) {
        eigvals(k) = solver.eigenvalues()(n_ - 1 - k);
        eigvecs.col(k) = solver.eigenvectors().col(n_ - 1 - k);
    }
}

CouplingMatrix assemble_J(const std::vector<SpinSite>& sites, const CavityGeometry& geom,
                          const QuadratureConfig& quad, bool include_local) {
    geom.validate();
    if (geom.M != 4 || geom.N != 7)
        throw std::invalid_argument("assemble_J: phi = 0 closed form requires M/N = 4/7");
    if (sites.empty()) throw std::invalid_argument("assemble_J: no sites");
    for (const auto& s : sites) s.density.validate();

    const int n = static_cast<int>(sites.size());
    std::vector<SiteNodes> nodes(n);
    for (int i = 0; i < n; ++i) {
        const bool gh = sites[i].density.pure_gaussian();
        nodes[i].x = make_nodes(sites[i].position_um[0], sites[i].density.sigma_x_um, quad, gh);
        nodes[i].y = make_nodes(sites[i].position_um[1], sites[i].density.sigma_y_um, quad, gh);
    }

    // optional refinement pass for per-entry convergence flagging
    std::vector<SiteNodes> fine_nodes;
    if (quad.check_convergence) {
        QuadratureConfig fine = quad;
        fine.gauss_hermite_nodes *= 2;
        fine.uniform_nodes *= 2;
        fine_nodes.resize(n);
        for (int i = 0; i < n; ++i) {
            const bool gh = sites[i].density.pure_gaussian();
            fine_nodes[i].x = make_nodes(sites[i].position_um[0], sites[i].density.sigma_x_um, fine, gh);
            fine_nodes[i].y = make_nodes(sites[i].position_um[1], sites[i].density.sigma_y_um, fine, gh);
        }
    }

    CouplingMatrix out;
    out.J.resize(n, n);
    out.sites = sites;
    out.geom = geom;
    out.include_local = include_local;
    out.quadrature = quad;
    std::string bad_entries;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double v = nonlocal_entry(sites[i], nodes[i], sites[j], nodes[j], geom);
            if (quad.check_convergence) {
                const double refined =
                    nonlocal_entry(sites[i], fine_nodes[i], sites[j], fine_nodes[j], geom);
                const double scale = std::max(std::abs(refined), 1e-3);
                if (std::abs(v - refined) > quad.convergence_tol * scale) {
                    if (!bad_entries.empty()) bad_entries += ", ";
                    bad_entries += "(" + std::to_string(i) + "," + std::to_string(j) + ")";
                }
            }
            if (include_local) v += local_overlap_coupling(sites[i], sites[j], geom);
            out.J(i, j) = v;
            out.J(j, i) = v;
        }
    }
    if (!bad_entries.empty())
        throw std::runtime_error("assemble_J: quadrature not converged at entries " + bad_entries);
    out.recompute_eigen();
    return out;
}

CouplingMatrix point_source_J(const std::vector<SpinSite>& sites, const CavityGeometry& geom) {
    geom.validate();
    if (sites.empty()) throw std::invalid_argument("point_source_J: no sites");
    const int n = static_cast<int>(sites.size());
    CouplingMatrix out;
    out.J = Eigen::MatrixXd::Zero(n, n);
    out.sites = sites;
    out.geom = geom;
    out.include_local = false;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double v = greens_47_nonlocal(sites[i].position_um, sites[j].position_um, geom);
            out.J(i, j) = v;
            out.J(j, i) = v;
        }
    }
    out.recompute_eigen();
    return out;
}

void PhysicalParams::validate() const {
    if (delta_a_rad_s >= 0.0 || delta_c_rad_s >= 0.0)
        throw std::invalid_argument("PhysicalParams: Delta_A and Delta_C must be red-detuned (< 0)");
    if (kappa_rad_s <= 0.0) throw std::invalid_argument("PhysicalParams: kappa must be positive");
    if (atoms_per_ensemble <= 0.0)
        throw std::invalid_argument("PhysicalParams: atom number must be positive");
}

double critical_pump_sq(const CouplingMatrix& Jm, const PhysicalParams& phys) {
    phys.validate();
    const double lam = Jm.lambda_max();
    if (lam <= 0.0)
        throw std::domain_error("critical_pump_sq: lambda_max <= 0, no superradiant instability");
    const double da2 = phys.delta_a_rad_s * phys.delta_a_rad_s;
    const double dc = std::abs(phys.delta_c_rad_s);
    const double num = 2.0 * phys.recoil_rad_s * da2 *
                       (phys.delta_c_rad_s * phys.delta_c_rad_s + phys.kappa_rad_s * phys.kappa_rad_s);
    const double den = phys.atoms_per_ensemble * lam * phys.g0_rad_s * phys.g0_rad_s * dc;
    return num / den;
}

CollapseRates collapse_rates(const CouplingMatrix& Jm, const PhysicalParams& phys, double omega) {
    phys.validate();
    if (Jm.eigvals.size() == 0)
        throw std::invalid_argument("collapse_rates: eigendecomposition unavailable");
    const double tol = 1e-8 * Jm.eigvals.cwiseAbs().maxCoeff();
    CollapseRates out;
    out.eigvecs = Jm.eigvecs;
    out.coefficients.resize(Jm.eigvals.size());
    const double pref = phys.g0_rad_s * omega /
                        (2.0 * std::abs(phys.delta_c_rad_s) * std::abs(phys.delta_a_rad_s));
    for (Eigen::Index k = 0; k < Jm.eigvals.size(); ++k) {
        double lam = Jm.eigvals(k);
        if (lam < -tol)
            throw std::domain_error("collapse_rates: negative eigenvalue beyond tolerance");
        lam = std::max(lam, 0.0);
        out.coefficients[static_cast<std::size_t>(k)] = std::sqrt(lam * phys.kappa_rad_s) * pref;
    }
    out.per_spin_rate_rad_s = phys.atoms_per_ensemble * phys.kappa_rad_s * phys.omega_z_rad_s /
                              std::abs(phys.delta_c_rad_s);
    return out;
}

}  // namespace glasscav
