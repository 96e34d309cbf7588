#include "glasscav/imaging.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "glasscav/rng.hpp"

namespace glasscav {

namespace {

constexpr double kPi = std::numbers::pi;
const std::complex<double> kI{0.0, 1.0};

/// Per-dimension ingredients of the emission basis for one site component.
/// Plain smear S0(x) = int N(x'; x0, s) e^{i(a x'^2 + b x x')} dx'
///            = exp[i a x0^2 + i b x x0 - s^2 (2 a x0 + b x)^2 / (2 A)] / sqrt(A),
/// excited smear S1(x) = sqrt(2) s i (2 a x0 + b x) / A * S0(x), with A = 1 - 2 i a s^2.
struct DimSmear {
    Eigen::VectorXcd plain;
    Eigen::VectorXcd excited;
};

DimSmear dim_smear(const Eigen::VectorXd& x, double x0, double sigma, double a, double b) {
    const std::complex<double> A = 1.0 - 2.0 * kI * a * sigma * sigma;
    DimSmear out;
    out.plain.resize(x.size());
    out.excited.resize(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double beta = 2.0 * a * x0 + b * x(k);
        const std::complex<double> s0 =
            std::exp(kI * (a * x0 * x0 + b * x(k) * x0) - sigma * sigma * beta * beta / (2.0 * A)) /
            std::sqrt(A);
        out.plain(k) = s0;
        out.excited(k) = std::numbers::sqrt2 * sigma * kI * beta / A * s0;
    }
    return out;
}

/// Real per-dimension local density factors (shared-L2-norm basis).
struct DimLocal {
    Eigen::VectorXd plain;    // N(x; x0, sigma)
    Eigen::VectorXd excited;  // sqrt(2) (x - x0)/sigma * N
};

DimLocal dim_local(const Eigen::VectorXd& x, double x0, double sigma) {
    DimLocal out;
    out.plain.resize(x.size());
    out.excited.resize(x.size());
    const double norm = 1.0 / (std::sqrt(2.0 * kPi) * sigma);
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double t = (x(k) - x0) / sigma;
        out.plain(k) = norm * std::exp(-0.5 * t * t);
        out.excited(k) = std::numbers::sqrt2 * t * out.plain(k);
    }
    return out;
}

struct BasisGrid {
    Eigen::VectorXd x;  // physical x of each pixel row (um)
    Eigen::VectorXd y;
    double w0_um = 35.0;
    int eta = 0;
};

BasisGrid basis_grid(const ComplexFieldImage& img, const CavityGeometry& geom) {
    BasisGrid g;
    const int n = img.size();
    g.x.resize(n);
    g.y.resize(n);
    for (int k = 0; k < n; ++k) {
        g.x(k) = img.x_um(k);
        g.y(k) = img.y_um(k);
    }
    g.w0_um = img.w0_px * img.pixel_pitch_um;
    g.eta = geom.eta;
    return g;
}

/// Emission basis field of one site component on the grid (local + nonlocal), real.
/// component: 0 = a00, 1 = a10 (x-excited), 2 = a01 (y-excited).
Eigen::MatrixXd component_field(const BasisGrid& g, const Vec2& pos, double sigma_x, double sigma_y,
                                int component) {
    const int n = static_cast<int>(g.x.size());
    const double w0_sq = g.w0_um * g.w0_um;
    Eigen::MatrixXd field(n, n);

    const DimLocal lx = dim_local(g.x, pos[0], sigma_x);
    const DimLocal ly = dim_local(g.y, pos[1], sigma_y);
    const Eigen::VectorXd& fx = (component == 1) ? lx.excited : lx.plain;
    const Eigen::VectorXd& fy = (component == 2) ? ly.excited : ly.plain;
    field.noalias() = (0.5 * w0_sq) * fx * fy.transpose();

    for (int nu = 1; nu <= 3; ++nu) {
        const double ang = 2.0 * nu * kPi / 7.0;
        const double c = std::cos(ang);
        const double s = std::sin(ang);
        const double a = c / (s * w0_sq);
        const double b = -2.0 / (s * w0_sq);
        const std::complex<double> phase = std::exp(kI * ((1.0 + g.eta) * ang));

        DimSmear sx = dim_smear(g.x, pos[0], sigma_x, a, b);
        DimSmear sy = dim_smear(g.y, pos[1], sigma_y, a, b);
        Eigen::VectorXcd vx = (component == 1) ? sx.excited : sx.plain;
        Eigen::VectorXcd vy = (component == 2) ? sy.excited : sy.plain;
        // fold the e^{i a r^2} chirp and the family phase into the dim factors
        for (int k = 0; k < n; ++k) {
            vx(k) *= std::exp(kI * (a * g.x(k) * g.x(k)));
            vy(k) *= std::exp(kI * (a * g.y(k) * g.y(k)));
        }
        vx *= phase / (kPi * s);
        field.noalias() += vx.real() * vy.imag().transpose();
        field.noalias() += vx.imag() * vy.real().transpose();
    }
    return field;
}

Eigen::MatrixXd nonlocal_component_field(const BasisGrid& g, const Vec2& pos, double sigma_x,
                                         double sigma_y, int component) {
    const int n = static_cast<int>(g.x.size());
    const double w0_sq = g.w0_um * g.w0_um;
    Eigen::MatrixXd field = Eigen::MatrixXd::Zero(n, n);
    for (int nu = 1; nu <= 3; ++nu) {
        const double ang = 2.0 * nu * kPi / 7.0;
        const double c = std::cos(ang);
        const double s = std::sin(ang);
        const double a = c / (s * w0_sq);
        const double b = -2.0 / (s * w0_sq);
        const std::complex<double> phase = std::exp(kI * ((1.0 + g.eta) * ang));
        DimSmear sx = dim_smear(g.x, pos[0], sigma_x, a, b);
        DimSmear sy = dim_smear(g.y, pos[1], sigma_y, a, b);
        Eigen::VectorXcd vx = (component == 1) ? sx.excited : sx.plain;
        Eigen::VectorXcd vy = (component == 2) ? sy.excited : sy.plain;
        for (int k = 0; k < n; ++k) {
            vx(k) *= std::exp(kI * (a * g.x(k) * g.x(k)));
            vy(k) *= std::exp(kI * (a * g.y(k) * g.y(k)));
        }
        vx *= phase / (kPi * s);
        field.noalias() += vx.real() * vy.imag().transpose();
        field.noalias() += vx.imag() * vy.real().transpose();
    }
    return field;
}

}  // namespace

ComplexFieldImage synthesize_field(const SpinConfiguration& config,
                                   const std::vector<SpinSite>& sites, const CavityGeometry& geom,
                                   const SynthesisOptions& opts) {
    geom.validate();
    if (static_cast<int>(sites.size()) != config.n())
        throw std::invalid_argument("synthesize_field: sites and configuration dimensions differ");

    ComplexFieldImage img = make_image_grid(opts.grid.n_px, opts.grid.pixel_pitch_um, geom.w0_um);
    const double half_span = 0.5 * opts.grid.n_px * opts.grid.pixel_pitch_um;
    for (const auto& site : sites) {
        site.density.validate();
        const double margin = 4.0 * std::max(site.density.sigma_x_um, site.density.sigma_y_um);
        if (std::abs(site.position_um[0]) > half_span - margin ||
            std::abs(site.position_um[1]) > half_span - margin)
            throw std::invalid_argument("synthesize_field: site outside imaged region");
    }

    const BasisGrid g = basis_grid(img, geom);
    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(img.size(), img.size());
    for (std::size_t i = 0; i < sites.size(); ++i) {
        const auto& d = sites[i].density;
        const double si = config.s(static_cast<Eigen::Index>(i));
        if (si == 0.0) continue;
        if (d.a00 != 0.0)
            total += (opts.scale * si * d.a00) *
                     component_field(g, sites[i].position_um, d.sigma_x_um, d.sigma_y_um, 0);
        if (d.a10 != 0.0)
            total += (opts.scale * si * d.a10) *
                     component_field(g, sites[i].position_um, d.sigma_x_um, d.sigma_y_um, 1);
        if (d.a01 != 0.0)
            total += (opts.scale * si * d.a01) *
                     component_field(g, sites[i].position_um, d.sigma_x_um, d.sigma_y_um, 2);
    }
    img.grid = total.cast<std::complex<double>>();

    if (opts.noise_snr_db) {
        const double signal_power = img.grid.squaredNorm();
        const double noise_power = signal_power * std::pow(10.0, -*opts.noise_snr_db / 10.0);
        const double sigma = std::sqrt(noise_power / (2.0 * img.grid.size()));
        Rng rng = Rng::stream(opts.noise_seed, 0x696d67);
        for (int iy = 0; iy < img.size(); ++iy)
            for (int ix = 0; ix < img.size(); ++ix)
                img.grid(ix, iy) += std::complex<double>(sigma * rng.normal(), sigma * rng.normal());
    }
    return img;
}

namespace {

struct FitState {
    std::vector<Vec2> pos;
    double sigma_x = 0.0;
    double sigma_y = 0.0;
};

Eigen::MatrixXd build_basis(const BasisGrid& g, const FitState& st) {
    const int n_sites = static_cast<int>(st.pos.size());
    const int n_px = static_cast<int>(g.x.size());
    Eigen::MatrixXd A(static_cast<Eigen::Index>(n_px) * n_px, 3 * n_sites);
    for (int i = 0; i < n_sites; ++i)
        for (int c = 0; c < 3; ++c) {
            const Eigen::MatrixXd f = component_field(g, st.pos[i], st.sigma_x, st.sigma_y, c);
            A.col(3 * i + c) = Eigen::Map<const Eigen::VectorXd>(f.data(), f.size());
        }
    return A;
}

double solve_amplitudes(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, Eigen::VectorXd& B) {
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(A.cols(), A.cols());
    gram.selfadjointView<Eigen::Lower>().rankUpdate(A.transpose());
    const Eigen::VectorXd rhs = A.transpose() * y;
    B = gram.selfadjointView<Eigen::Lower>().ldlt().solve(rhs);
    return (y - A * B).squaredNorm();
}

}  // namespace

FitResult fit_spins(const ComplexFieldImage& image, const std::vector<SpinSite>& initial_sites,
                    const CavityGeometry& geom, const FitOptions& opts) {
    geom.validate();
    image.validate();
    if (initial_sites.empty()) throw std::invalid_argument("fit_spins: no sites");
    const int n_px = image.size();
    const Eigen::MatrixXd re = image.grid.real();
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(re.data(), re.size());
    const double y_norm2 = y.squaredNorm();
    if (y_norm2 == 0.0) throw std::invalid_argument("fit_spins: degenerate (all-zero) image");

    const BasisGrid g = basis_grid(image, geom);
    FitState st;
    st.sigma_x = initial_sites.front().density.sigma_x_um;
    st.sigma_y = initial_sites.front().density.sigma_y_um;
    for (const auto& s : initial_sites) st.pos.push_back(s.position_um);
    const int n_sites = static_cast<int>(st.pos.size());
    const int n_par = 2 * n_sites + 2;

    FitResult res;
    // overlapping sites make the amplitude block rank-deficient
    for (int i = 0; i < n_sites && !res.rank_warning; ++i)
        for (int j = i + 1; j < n_sites; ++j) {
            const double dx = st.pos[i][0] - st.pos[j][0];
            const double dy = st.pos[i][1] - st.pos[j][1];
            if (std::sqrt(dx * dx + dy * dy) < std::max(st.sigma_x, st.sigma_y)) {
                res.rank_warning = true;
                break;
            }
        }

    Eigen::MatrixXd A = build_basis(g, st);
    Eigen::VectorXd B;
    double cost = solve_amplitudes(A, y, B);

    double lambda = 1e-3;
    int iter = 0;
    for (; iter < opts.max_iterations; ++iter) {
        // Kaufman-style Jacobian: perturb basis columns, amplitudes held fixed
        Eigen::VectorXd r = y - A * B;
        Eigen::MatrixXd J(y.size(), n_par);
        for (int i = 0; i < n_sites; ++i) {
            for (int axis = 0; axis < 2; ++axis) {
                FitState pert = st;
                pert.pos[i][axis] += opts.position_step_um;
                Eigen::VectorXd dcol = Eigen::VectorXd::Zero(y.size());
                for (int c = 0; c < 3; ++c) {
                    const Eigen::MatrixXd f =
                        component_field(g, pert.pos[i], pert.sigma_x, pert.sigma_y, c);
                    const auto fv = Eigen::Map<const Eigen::VectorXd>(f.data(), f.size());
                    dcol += (fv - A.col(3 * i + c)) * B(3 * i + c);
                }
                J.col(2 * i + axis) = dcol / opts.position_step_um;
            }
        }
        for (int sdim = 0; sdim < 2; ++sdim) {
            FitState pert = st;
            (sdim == 0 ? pert.sigma_x : pert.sigma_y) += opts.sigma_step_um;
            Eigen::MatrixXd Ap = build_basis(g, pert);
            J.col(2 * n_sites + sdim) = (Ap * B - A * B) / opts.sigma_step_um;
        }

        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd Jtr = J.transpose() * r;
        bool accepted = false;
        for (int tries = 0; tries < 12 && !accepted; ++tries) {
            Eigen::MatrixXd M = JtJ;
            M.diagonal() += lambda * JtJ.diagonal().cwiseMax(1e-12);
            const Eigen::VectorXd step = M.ldlt().solve(Jtr);
            FitState trial = st;
            for (int i = 0; i < n_sites; ++i) {
                trial.pos[i][0] += step(2 * i);
                trial.pos[i][1] += step(2 * i + 1);
            }
            trial.sigma_x = std::max(0.5, trial.sigma_x + step(2 * n_sites));
            trial.sigma_y = std::max(0.5, trial.sigma_y + step(2 * n_sites + 1));
            Eigen::MatrixXd At = build_basis(g, trial);
            Eigen::VectorXd Bt;
            const double trial_cost = solve_amplitudes(At, y, Bt);
            if (trial_cost < cost) {
                const double rel_drop = (cost - trial_cost) / std::max(cost, 1e-300);
                st = trial;
                A.swap(At);
                B.swap(Bt);
                cost = trial_cost;
                lambda = std::max(lambda * 0.3, 1e-12);
                accepted = true;
                if (rel_drop < opts.cost_rel_tol) {
                    res.converged = true;
                }
            } else {
                lambda *= 8.0;
            }
        }
        if (res.converged) break;
        if (!accepted) {
            res.converged = true;  // stationary within damping ladder
            break;
        }
    }
    // reaching the iteration cap is a normal stop; converged stays false
    res.iterations = std::min(iter + 1, opts.max_iterations);
    res.sigma_x_um = st.sigma_x;
    res.sigma_y_um = st.sigma_y;
    res.residual = cost / y_norm2;
    res.sites.resize(n_sites);
    Eigen::VectorXd s_raw(n_sites);
    for (int i = 0; i < n_sites; ++i) {
        const double b00 = B(3 * i);
        const double b10 = B(3 * i + 1);
        const double b01 = B(3 * i + 2);
        const double mag = std::sqrt(b00 * b00 + b01 * b01 + b10 * b10);
        FitSite& fs = res.sites[i];
        fs.position_um = st.pos[i];
        if (mag == 0.0) {
            fs.amplitude = 0.0;
            fs.a00 = 1.0;
            fs.a01 = fs.a10 = 0.0;
        } else {
            fs.amplitude = (b00 < 0.0) ? -mag : mag;
            fs.a00 = b00 / fs.amplitude;
            fs.a10 = b10 / fs.amplitude;
            fs.a01 = b01 / fs.amplitude;
        }
        s_raw(i) = b00;
    }
    const double nrm = s_raw.norm();
    res.recovered_s = (nrm > 0.0) ? Eigen::VectorXd(s_raw / nrm) : s_raw;
    return res;
}

ComplexFieldImage local_spin_map(const ComplexFieldImage& image, const FitResult& fit,
                                 const CavityGeometry& geom) {
    geom.validate();
    image.validate();
    const BasisGrid g = basis_grid(image, geom);
    Eigen::MatrixXd nonlocal = Eigen::MatrixXd::Zero(image.size(), image.size());
    for (const auto& site : fit.sites) {
        const double weights[3] = {site.a00, site.a10, site.a01};
        for (int c = 0; c < 3; ++c) {
            if (weights[c] == 0.0) continue;
            nonlocal += (site.amplitude * weights[c]) *
                        nonlocal_component_field(g, site.position_um, fit.sigma_x_um,
                                                 fit.sigma_y_um, c);
        }
    }
    ComplexFieldImage out = image;
    out.grid -= nonlocal.cast<std::complex<double>>();
    return out;
}

}  // namespace glasscav
