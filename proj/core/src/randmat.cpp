#include "glasscav/randmat.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "glasscav/greens.hpp"
#include "glasscav/rng.hpp"
#include "glasscav/threading.hpp"

namespace glasscav {

namespace {
int rng_below(Rng& rng, int n) { return static_cast<int>(rng.below(static_cast<std::uint64_t>(n))); }
}  // namespace

Eigen::VectorXd eigen_spectrum_normalized(const CouplingMatrix& Jm) {
    if (Jm.n() < 2) throw std::invalid_argument("eigen_spectrum_normalized: need n >= 2");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(Jm.J);
    Eigen::VectorXd ev = solver.eigenvalues();
    const double mean = ev.mean();
    const double var = ev.squaredNorm() / ev.size() - mean * mean;
    if (var <= 0.0) throw std::domain_error("eigen_spectrum_normalized: zero-spread spectrum");
    return ev / std::sqrt(var);
}

double hellinger_to_semicircle(const std::vector<double>& pooled, const HellingerBinning& b) {
    if (pooled.empty()) throw std::invalid_argument("hellinger_to_semicircle: empty spectrum");
    std::vector<double> p(b.bins, 0.0), p_sc(b.bins, 0.0);
    const double width = (b.hi - b.lo) / b.bins;
    double inside = 0.0;
    for (double v : pooled) {
        if (v < b.lo || v >= b.hi) continue;  // tail mass outside contributes via missing p
        p[static_cast<int>((v - b.lo) / width)] += 1.0;
        inside += 1.0;
    }
    for (auto& v : p) v /= static_cast<double>(pooled.size());
    // exact per-bin mass of the semicircle law (CDF differences), radius 2
    auto semicircle_cdf = [](double x) {
        x = std::clamp(x, -2.0, 2.0);
        return 0.5 + (x * std::sqrt(4.0 - x * x) / 2.0 + 2.0 * std::asin(x / 2.0)) /
                         (2.0 * std::numbers::pi);
    };
    for (int k = 0; k < b.bins; ++k)
        p_sc[k] = semicircle_cdf(b.lo + (k + 1) * width) - semicircle_cdf(b.lo + k * width);
    double h2 = 0.0;
    for (int k = 0; k < b.bins; ++k) {
        const double d = std::sqrt(p[k]) - std::sqrt(p_sc[k]);
        h2 += 0.5 * d * d;
    }
    // eigenvalues outside the binning window count fully against the distance
    h2 += 0.5 * (1.0 - inside / static_cast<double>(pooled.size()));
    return std::sqrt(std::min(1.0, h2));
}

FrustrationStats frustration_stats(const std::vector<Eigen::MatrixXd>& j_matrices,
                                   std::uint64_t mc_seed, int mc_triples) {
    if (j_matrices.empty()) throw std::invalid_argument("frustration_stats: no matrices");
    FrustrationStats out;
    double neg = 0.0, tot = 0.0;
    double frus = 0.0, frus_tot = 0.0;
    double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0, np = 0.0;

    for (const auto& J : j_matrices) {
        const int n = static_cast<int>(J.rows());
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                neg += (J(i, j) < 0.0) ? 1.0 : 0.0;
                tot += 1.0;
            }
        // Pearson over ordered shared-vertex pairs (J_ij, J_jk), i != k
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                if (i == j) continue;
                for (int k = 0; k < n; ++k) {
                    if (k == j || k == i) continue;
                    const double x = J(i, j), y = J(j, k);
                    sx += x; sy += y; sxx += x * x; syy += y * y; sxy += x * y; np += 1.0;
                }
            }
        if (n <= 20) {
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    for (int k = j + 1; k < n; ++k) {
                        frus += (J(i, j) * J(j, k) * J(k, i) < 0.0) ? 1.0 : 0.0;
                        frus_tot += 1.0;
                    }
        } else {
            Rng rng = Rng::stream(mc_seed, 0x74726970);
            int done = 0;
            while (done < mc_triples) {
                const int i = static_cast<int>(rng.below(n));
                const int j = static_cast<int>(rng.below(n));
                const int k = static_cast<int>(rng.below(n));
                if (i == j || j == k || i == k) continue;
                frus += (J(i, j) * J(j, k) * J(k, i) < 0.0) ? 1.0 : 0.0;
                frus_tot += 1.0;
                ++done;
            }
        }
    }
    out.p_negative = neg / tot;
    out.p_frustrated_triple = (frus_tot > 0.0) ? frus / frus_tot : 0.0;
    out.n_triples = static_cast<std::size_t>(frus_tot);
    const double mx = sx / np, my = sy / np;
    const double cov = sxy / np - mx * my;
    const double vx = sxx / np - mx * mx;
    const double vy = syy / np - my * my;
    out.pearson = (vx > 0.0 && vy > 0.0) ? cov / std::sqrt(vx * vy) : 0.0;
    return out;
}

SweepResult sweep_w(const std::vector<int>& n_values, const std::vector<double>& w_over_w0,
                    int draws_per_cell, std::uint64_t seed, const CavityGeometry& geom,
                    int threads) {
    if (draws_per_cell < 2) throw std::invalid_argument("sweep_w: draws must be >= 2");
    geom.validate();
    SweepResult result;
    result.seed = seed;

    int cell_index = 0;
    for (int n : n_values) {
        for (double wr : w_over_w0) {
            const double w_um = wr * geom.w0_um;
            std::vector<Eigen::MatrixXd> js(draws_per_cell);
            std::vector<std::vector<double>> spectra(draws_per_cell);
            const std::uint64_t cell_seed = seed + 7919ULL * static_cast<std::uint64_t>(cell_index);
            parallel_for(draws_per_cell, threads, [&](int d) {
                Rng rng = Rng::stream(cell_seed, static_cast<std::uint64_t>(d));
                std::vector<SpinSite> sites(n);
                for (int i = 0; i < n; ++i)
                    sites[i].position_um = {w_um * rng.normal(), w_um * rng.normal()};
                const CouplingMatrix Jm = point_source_J(sites, geom);
                js[d] = Jm.J;
                if (n >= 2) {
                    const Eigen::VectorXd ev = eigen_spectrum_normalized(Jm);
                    spectra[d].assign(ev.data(), ev.data() + ev.size());
                }
            });

            SweepCell cell;
            cell.n = n;
            cell.w_over_w0 = wr;
            cell.draws = draws_per_cell;

            std::vector<double> pooled;
            pooled.reserve(static_cast<std::size_t>(n) * draws_per_cell);
            for (const auto& s : spectra) pooled.insert(pooled.end(), s.begin(), s.end());
            cell.hellinger = hellinger_to_semicircle(pooled);

            // per-draw statistics for spread estimates
            std::vector<double> pn(draws_per_cell), pf(draws_per_cell), pr(draws_per_cell);
            for (int d = 0; d < draws_per_cell; ++d) {
                const FrustrationStats fs = frustration_stats({js[d]});
                pn[d] = fs.p_negative;
                pf[d] = fs.p_frustrated_triple;
                pr[d] = fs.pearson;
            }
            const FrustrationStats pooled_fs = frustration_stats(js);
            cell.p_negative = pooled_fs.p_negative;
            cell.p_frustrated = pooled_fs.p_frustrated_triple;
            cell.pearson = pooled_fs.pearson;

            auto stderr_of = [&](const std::vector<double>& v) {
                const double mu = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
                double var = 0.0;
                for (double x : v) var += (x - mu) * (x - mu);
                var /= (v.size() - 1);
                return std::sqrt(var / v.size());
            };
            cell.p_negative_stderr = stderr_of(pn);
            cell.p_frustrated_stderr = stderr_of(pf);
            cell.pearson_stderr = stderr_of(pr);

            // bootstrap the pooled Hellinger distance over draws
            {
                Rng brng = Rng::stream(cell_seed, 0xb007);
                const int n_boot = 64;
                double acc = 0.0, acc2 = 0.0;
                std::vector<double> sample;
                for (int t = 0; t < n_boot; ++t) {
                    sample.clear();
                    for (int d = 0; d < draws_per_cell; ++d) {
                        const auto& s = spectra[rng_below(brng, draws_per_cell)];
                        sample.insert(sample.end(), s.begin(), s.end());
                    }
                    const double h = hellinger_to_semicircle(sample);
                    acc += h;
                    acc2 += h * h;
                }
                const double mu = acc / n_boot;
                cell.hellinger_stderr = std::sqrt(std::max(0.0, acc2 / n_boot - mu * mu));
            }

            result.cells.push_back(cell);
            ++cell_index;
        }
    }
    return result;
}

}  // namespace glasscav
