#include "glasscav/glass.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "glasscav/rng.hpp"

namespace glasscav {

OverlapMatrix overlap_matrix(const Eigen::MatrixXd& replica_rows) {
    if (replica_rows.rows() < 1) throw std::invalid_argument("overlap_matrix: empty ensemble");
    OverlapMatrix out;
    out.Q = replica_rows * replica_rows.transpose();
    return out;
}

OverlapMatrix overlap_matrix(const ReplicaEnsemble& ensemble) {
    if (ensemble.configs.empty()) throw std::invalid_argument("overlap_matrix: empty ensemble");
    const int n = ensemble.configs.front().n();
    for (const auto& c : ensemble.configs)
        if (c.n() != n) throw std::invalid_argument("overlap_matrix: replica dimension mismatch");
    return overlap_matrix(ensemble.as_matrix());
}

namespace {

int bin_of(double v, double lo, double hi, int bins) {
    int k = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
    return std::clamp(k, 0, bins - 1);
}

}  // namespace

Histogram overlap_distribution(const OverlapMatrix& q, int bins, bool symmetrize) {
    const int n = q.n_reps();
    if (n < 2) throw std::invalid_argument("overlap_distribution: need >= 2 replicas");
    if (bins < 2) throw std::invalid_argument("overlap_distribution: bins must be >= 2");
    Histogram h;
    h.bin_centers.resize(bins);
    h.probabilities.assign(bins, 0.0);
    h.stderr_.assign(bins, 0.0);
    const double width = 2.0 / bins;
    for (int k = 0; k < bins; ++k) h.bin_centers[k] = -1.0 + (k + 0.5) * width;
    double count = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            h.probabilities[bin_of(q.Q(a, b), -1.0, 1.0, bins)] += 1.0;
            count += 1.0;
        }
    for (auto& p : h.probabilities) p /= count;
    if (symmetrize) {
        for (int k = 0; k < bins / 2; ++k) {
            const double avg = 0.5 * (h.probabilities[k] + h.probabilities[bins - 1 - k]);
            h.probabilities[k] = avg;
            h.probabilities[bins - 1 - k] = avg;
        }
    }
    return h;
}

Histogram parisi_distribution(const std::vector<Histogram>& realizations, int n_boot,
                              std::uint64_t seed) {
    if (realizations.size() < 2)
        throw std::invalid_argument("parisi_distribution: need >= 2 disorder realizations");
    const auto& first = realizations.front();
    for (const auto& h : realizations) {
        if (h.size() != first.size())
            throw std::invalid_argument("parisi_distribution: binning mismatch");
        for (std::size_t k = 0; k < h.size(); ++k)
            if (std::abs(h.bin_centers[k] - first.bin_centers[k]) > 1e-12)
                throw std::invalid_argument("parisi_distribution: binning mismatch");
    }
    const std::size_t bins = first.size();
    const std::size_t m = realizations.size();
    Histogram out;
    out.bin_centers = first.bin_centers;
    out.probabilities.assign(bins, 0.0);
    out.stderr_.assign(bins, 0.0);
    for (const auto& h : realizations)
        for (std::size_t k = 0; k < bins; ++k) out.probabilities[k] += h.probabilities[k] / m;

    Rng rng = Rng::stream(seed, 0x626f6f74);
    std::vector<double> acc(bins), acc2(bins);
    for (int t = 0; t < n_boot; ++t) {
        std::vector<double> mean(bins, 0.0);
        for (std::size_t r = 0; r < m; ++r) {
            const auto& h = realizations[rng.below(m)];
            for (std::size_t k = 0; k < bins; ++k) mean[k] += h.probabilities[k] / m;
        }
        for (std::size_t k = 0; k < bins; ++k) {
            acc[k] += mean[k];
            acc2[k] += mean[k] * mean[k];
        }
    }
    for (std::size_t k = 0; k < bins; ++k) {
        const double mu = acc[k] / n_boot;
        out.stderr_[k] = std::sqrt(std::max(0.0, acc2[k] / n_boot - mu * mu));
    }
    return out;
}

ParisiFunction parisi_function(const Histogram& parisi_hist) {
    // fold the symmetric histogram onto |q|
    std::map<double, double> abs_mass;
    for (std::size_t k = 0; k < parisi_hist.size(); ++k) {
        const double q = std::abs(parisi_hist.bin_centers[k]);
        abs_mass[q] += parisi_hist.probabilities[k];
    }
    double total = 0.0;
    for (auto& [q, p] : abs_mass) total += p;
    if (total <= 0.0) throw std::invalid_argument("parisi_function: empty distribution");

    // CDF breakpoints
    std::vector<std::pair<double, double>> cdf;  // (q, x(q))
    double run = 0.0;
    for (auto& [q, p] : abs_mass) {
        run += p / total;
        if (p > 0.0) cdf.emplace_back(q, run);
    }

    ParisiFunction out;
    const int grid = 1000;
    out.x.resize(grid);
    out.q.resize(grid);
    for (int i = 0; i < grid; ++i) {
        const double x = (i + 0.5) / grid;
        out.x[i] = x;
        auto it = std::lower_bound(cdf.begin(), cdf.end(), x,
                                   [](const auto& pr, double v) { return pr.second < v; });
        out.q[i] = (it == cdf.end()) ? cdf.back().first : it->first;
    }

    if (cdf.size() == 1) {
        out.fit.fitted = false;
        out.fit.q_ea = cdf.front().first;
        out.fit.a = out.fit.b = 0.0;
        out.fit.c = out.fit.q_ea;
        out.fit.x_star = 0.0;
        return out;
    }

    // grid search over the breakpoint: the plateau value comes from the tail mean,
    // the quadratic is fit on [0, x*] under the continuity constraint
    // a x*^2 + b x* + c = q_EA with a monotonicity-feasible derivative.
    double best_sse = std::numeric_limits<double>::infinity();
    for (int cand = 2; cand <= 100; ++cand) {
        const double xs = cand / 100.0;
        double q_ea = 0.0;
        int tail = 0;
        for (int i = 0; i < grid; ++i)
            if (out.x[i] > xs) {
                q_ea += out.q[i];
                ++tail;
            }
        if (tail > 0)
            q_ea /= tail;
        else
            q_ea = out.q.back();

        // eliminate c via the continuity constraint; 2-parameter LSQ in (a, b) on
        // the basis (x^2 - x*^2, x - x*) against q - q_EA
        double a11 = 0.0, a12 = 0.0, a22 = 0.0, r1 = 0.0, r2 = 0.0;
        for (int i = 0; i < grid; ++i) {
            if (out.x[i] > xs) continue;
            const double u = out.x[i] * out.x[i] - xs * xs;
            const double v = out.x[i] - xs;
            const double t = out.q[i] - q_ea;
            a11 += u * u;
            a12 += u * v;
            a22 += v * v;
            r1 += u * t;
            r2 += v * t;
        }
        auto solve2 = [&](bool fix_b_zero, bool fix_edge_zero, double& a, double& b) {
            if (fix_b_zero) {           // b = 0: derivative >= 0 needs a >= 0
                a = (a11 > 0.0) ? r1 / a11 : 0.0;
                a = std::max(a, 0.0);
                b = 0.0;
            } else if (fix_edge_zero) {  // 2 a x* + b = 0
                // substitute b = -2 a x*: one unknown
                const double den = a11 - 4.0 * xs * a12 + 4.0 * xs * xs * a22;
                a = (den > 0.0) ? (r1 - 2.0 * xs * r2) / den : 0.0;
                a = std::min(a, 0.0);   // derivative 2a(x - x*) >= 0 on [0, x*] needs a <= 0
                b = -2.0 * a * xs;
            } else {
                const double det = a11 * a22 - a12 * a12;
                if (std::abs(det) < 1e-30) {
                    a = 0.0;
                    b = (a22 > 0.0) ? r2 / a22 : 0.0;
                } else {
                    a = (r1 * a22 - r2 * a12) / det;
                    b = (a11 * r2 - a12 * r1) / det;
                }
            }
        };
        double a = 0.0, b = 0.0;
        solve2(false, false, a, b);
        if (b < 0.0 || 2.0 * a * xs + b < 0.0) {
            // activate whichever constraint is violated; keep the feasible better one
            double a1, b1, a2, b2;
            solve2(true, false, a1, b1);
            solve2(false, true, a2, b2);
            auto sse_of = [&](double aa, double bb) {
                return a11 * aa * aa + 2.0 * a12 * aa * bb + a22 * bb * bb - 2.0 * r1 * aa -
                       2.0 * r2 * bb;
            };
            const bool ok1 = (2.0 * a1 * xs + b1 >= -1e-12);
            const bool ok2 = (b2 >= -1e-12);
            if (ok1 && (!ok2 || sse_of(a1, b1) <= sse_of(a2, b2))) {
                a = a1;
                b = b1;
            } else {
                a = a2;
                b = b2;
            }
        }
        const double c = q_ea - a * xs * xs - b * xs;

        double sse = 0.0;
        for (int i = 0; i < grid; ++i) {
            const double xe = std::min(out.x[i], xs);
            const double model = a * xe * xe + b * xe + c;
            sse += (model - out.q[i]) * (model - out.q[i]);
        }
        if (sse < best_sse) {
            best_sse = sse;
            out.fit.a = a;
            out.fit.b = b;
            out.fit.c = c;
            out.fit.x_star = xs;
            out.fit.q_ea = q_ea;
            out.fit.fit_residual = sse / grid;
            out.fit.fitted = true;
        }
    }
    if (!out.fit.fitted) throw std::runtime_error("parisi_function: no monotone fit candidate");
    return out;
}

KCorrelator k_correlator(const OverlapMatrix& q, int bins) {
    const int n = q.n_reps();
    if (n < 3) throw std::invalid_argument("k_correlator: need >= 3 replicas");

    Eigen::MatrixXd d(n, n);
    double mean = 0.0, mean2 = 0.0;
    const double n_pairs = n * (n - 1) / 2.0;
    for (int a = 0; a < n; ++a) {
        d(a, a) = 0.0;
        for (int b = a + 1; b < n; ++b) {
            const double v = 1.0 - std::abs(q.Q(a, b));
            d(a, b) = v;
            d(b, a) = v;
            mean += v / n_pairs;
            mean2 += v * v / n_pairs;
        }
    }
    const double sigma_d = std::sqrt(std::max(0.0, mean2 - mean * mean));

    KCorrelator out;
    std::vector<double> ks;
    ks.reserve(static_cast<std::size_t>(n) * (n - 1) * (n - 2) / 6);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int c = b + 1; c < n; ++c) {
                double d1 = d(a, b), d2 = d(a, c), d3 = d(b, c);
                if (d1 < d2) std::swap(d1, d2);
                if (d2 < d3) std::swap(d2, d3);
                if (d1 < d2) std::swap(d1, d2);
                ks.push_back(sigma_d > 0.0 ? (d1 - d2) / sigma_d : 0.0);
            }
    out.n_triples = ks.size();
    out.mean_k = std::accumulate(ks.begin(), ks.end(), 0.0) / ks.size();

    const double kmax = *std::max_element(ks.begin(), ks.end());
    const double hi = std::max(kmax, 1e-12);
    out.histogram.bin_centers.resize(bins);
    out.histogram.probabilities.assign(bins, 0.0);
    out.histogram.stderr_.assign(bins, 0.0);
    for (int k = 0; k < bins; ++k) out.histogram.bin_centers[k] = (k + 0.5) * hi / bins;
    for (double v : ks) out.histogram.probabilities[bin_of(v, 0.0, hi, bins)] += 1.0 / ks.size();

    // FWHM on a Gaussian KDE (Silverman bandwidth), robust to bin width
    double ksum = 0.0, ksum2 = 0.0;
    for (double v : ks) {
        ksum += v;
        ksum2 += v * v;
    }
    const double kmean = ksum / ks.size();
    const double kstd = std::sqrt(std::max(0.0, ksum2 / ks.size() - kmean * kmean));
    if (kstd <= 0.0) {
        out.fwhm = 0.0;
        return out;
    }
    std::vector<double> sorted = ks;
    std::sort(sorted.begin(), sorted.end());
    const double iqr = sorted[static_cast<std::size_t>(0.75 * sorted.size())] -
                       sorted[static_cast<std::size_t>(0.25 * sorted.size())];
    const double sigma_est = (iqr > 0.0) ? std::min(kstd, iqr / 1.34) : kstd;
    const double bw = 0.9 * sigma_est * std::pow(static_cast<double>(ks.size()), -0.2);

    const int grid_n = 512;
    const double lo = std::max(0.0, sorted.front() - 3.0 * bw);
    const double hi_k = sorted.back() + 3.0 * bw;
    // pre-bin the samples so the KDE cost is bins x grid, not samples x grid
    const int fine = 2048;
    std::vector<double> fine_counts(fine, 0.0);
    for (double v : ks) fine_counts[bin_of(v, lo, hi_k, fine)] += 1.0;
    std::vector<double> dens(grid_n, 0.0);
    for (int b = 0; b < fine; ++b) {
        if (fine_counts[b] == 0.0) continue;
        const double c = lo + (hi_k - lo) * (b + 0.5) / fine;
        for (int g = 0; g < grid_n; ++g) {
            const double x = lo + (hi_k - lo) * g / (grid_n - 1);
            const double t = (x - c) / bw;
            dens[g] += fine_counts[b] * std::exp(-0.5 * t * t);
        }
    }
    const double peak = *std::max_element(dens.begin(), dens.end());
    const double half = peak / 2.0;
    int first = -1, last = -1;
    for (int g = 0; g < grid_n; ++g)
        if (dens[g] >= half) {
            if (first < 0) first = g;
            last = g;
        }
    out.fwhm = (hi_k - lo) * (last - first) / (grid_n - 1);
    return out;
}

namespace {

void collect_leaves(const Dendrogram& dg, int node, std::vector<int>& order) {
    if (node < dg.n_leaves) {
        order.push_back(node);
        return;
    }
    const auto& m = dg.merges[node - dg.n_leaves];
    collect_leaves(dg, m.left, order);
    collect_leaves(dg, m.right, order);
}

}  // namespace

Dendrogram cluster_replicas(const OverlapMatrix& q, Linkage linkage) {
    const int n = q.n_reps();
    if (n < 2) throw std::invalid_argument("cluster_replicas: need >= 2 replicas");
    Dendrogram dg;
    dg.n_leaves = n;

    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) d[a][b] = (a == b) ? 0.0 : 1.0 - std::abs(q.Q(a, b));

    struct Cluster {
        int node;
        int count;
        bool alive;
    };
    std::vector<Cluster> clusters(n);
    for (int i = 0; i < n; ++i) clusters[i] = {i, 1, true};

    for (int merge = 0; merge < n - 1; ++merge) {
        int bi = -1, bj = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            if (!clusters[i].alive) continue;
            for (int j = i + 1; j < n; ++j) {
                if (!clusters[j].alive) continue;
                if (d[i][j] < best) {
                    best = d[i][j];
                    bi = i;
                    bj = j;
                }
            }
        }
        DendrogramNode node;
        node.left = clusters[bi].node;
        node.right = clusters[bj].node;
        node.height = best;
        node.count = clusters[bi].count + clusters[bj].count;
        dg.merges.push_back(node);

        for (int k = 0; k < n; ++k) {
            if (!clusters[k].alive || k == bi || k == bj) continue;
            double v = 0.0;
            switch (linkage) {
                case Linkage::average:
                    v = (clusters[bi].count * d[bi][k] + clusters[bj].count * d[bj][k]) /
                        (clusters[bi].count + clusters[bj].count);
                    break;
                case Linkage::single: v = std::min(d[bi][k], d[bj][k]); break;
                case Linkage::complete: v = std::max(d[bi][k], d[bj][k]); break;
            }
            d[bi][k] = v;
            d[k][bi] = v;
        }
        clusters[bi].node = n + merge;
        clusters[bi].count = node.count;
        clusters[bj].alive = false;
    }
    collect_leaves(dg, n + (n - 2), dg.leaf_order);
    return dg;
}

namespace {

std::vector<int> canonical_pattern(const Eigen::VectorXd& s) {
    std::vector<int> pat(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) pat[i] = (s(i) < 0.0) ? -1 : 1;
    if (pat[0] < 0)
        for (auto& v : pat) v = -v;
    return pat;
}

double entropy_bits_from_counts(const std::vector<int>& counts, int total) {
    double h = 0.0;
    for (int c : counts) {
        if (c <= 0) continue;
        const double p = static_cast<double>(c) / total;
        h -= p * std::log2(p);
    }
    return h;
}

}  // namespace

EntropyEstimate shannon_entropy_jackknife(const ReplicaEnsemble& ensemble) {
    const int n_reps = ensemble.n_reps();
    if (n_reps < 2) throw std::invalid_argument("shannon_entropy_jackknife: need >= 2 replicas");

    std::map<std::vector<int>, int> orbit_counts;
    for (const auto& cfg : ensemble.configs) ++orbit_counts[canonical_pattern(cfg.s)];
    std::vector<int> counts;
    counts.reserve(orbit_counts.size());
    for (const auto& [pat, c] : orbit_counts) counts.push_back(c);

    EntropyEstimate out;
    out.distinct_patterns = static_cast<int>(counts.size());
    // Z2-symmetrized distribution: each orbit splits its mass over +/- partners,
    // adding exactly one bit to the orbit entropy
    const double h_plug = entropy_bits_from_counts(counts, n_reps) + 1.0;
    out.plug_in_bits = h_plug;

    double h_loo_mean = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        std::vector<int> loo = counts;
        loo[k] -= 1;
        const double h_loo = entropy_bits_from_counts(loo, n_reps - 1) + 1.0;
        h_loo_mean += h_loo * counts[k] / n_reps;
    }
    out.jackknife_bits = n_reps * h_plug - (n_reps - 1) * h_loo_mean;
    return out;
}

MagnetizationStats magnetization_stats(const ReplicaEnsemble& ensemble, int bins) {
    if (ensemble.configs.empty()) throw std::invalid_argument("magnetization_stats: empty ensemble");
    const int n = ensemble.configs.front().n();
    const int n_reps = ensemble.n_reps();
    std::vector<double> ms(n_reps);
    for (int a = 0; a < n_reps; ++a) {
        double m = 0.0;
        for (int i = 0; i < n; ++i) m += (ensemble.configs[a].s(i) < 0.0) ? -1.0 : 1.0;
        ms[a] = m / n;
    }
    MagnetizationStats out;
    if (bins <= 0) bins = n + 1;  // sign magnetization lattice
    out.histogram.bin_centers.resize(bins);
    out.histogram.probabilities.assign(bins, 0.0);
    out.histogram.stderr_.assign(bins, 0.0);
    const double width = 2.0 / bins;
    for (int k = 0; k < bins; ++k) out.histogram.bin_centers[k] = -1.0 + (k + 0.5) * width;
    double sum = 0.0, sum2 = 0.0, sum_abs = 0.0;
    for (double m : ms) {
        out.histogram.probabilities[bin_of(m, -1.0, 1.0, bins)] += 1.0 / n_reps;
        sum += m;
        sum2 += m * m;
        sum_abs += std::abs(m);
    }
    out.mean_m = sum / n_reps;
    out.mean_abs_m = sum_abs / n_reps;
    const double var = std::max(0.0, sum2 / n_reps - out.mean_m * out.mean_m);
    out.stderr_mean_m = std::sqrt(var / n_reps);
    return out;
}

std::vector<double> bootstrap_errors(
    const std::function<std::vector<double>(const Eigen::MatrixXd&)>& statistic,
    const Eigen::MatrixXd& replica_rows, int n_boot, std::uint64_t seed) {
    if (replica_rows.rows() < 1) throw std::invalid_argument("bootstrap_errors: empty ensemble");
    const int n_reps = static_cast<int>(replica_rows.rows());
    Rng rng = Rng::stream(seed, 0x62737472);
    std::vector<double> acc, acc2;
    Eigen::MatrixXd resampled(replica_rows.rows(), replica_rows.cols());
    for (int t = 0; t < n_boot; ++t) {
        for (int a = 0; a < n_reps; ++a)
            resampled.row(a) = replica_rows.row(static_cast<Eigen::Index>(rng.below(n_reps)));
        const std::vector<double> stat = statistic(resampled);
        if (acc.empty()) {
            acc.assign(stat.size(), 0.0);
            acc2.assign(stat.size(), 0.0);
        }
        if (stat.size() != acc.size())
            throw std::runtime_error("bootstrap_errors: statistic dimension changed across resamples");
        for (std::size_t k = 0; k < stat.size(); ++k) {
            acc[k] += stat[k];
            acc2[k] += stat[k] * stat[k];
        }
    }
    std::vector<double> out(acc.size());
    for (std::size_t k = 0; k < acc.size(); ++k) {
        const double mu = acc[k] / n_boot;
        out[k] = std::sqrt(std::max(0.0, acc2[k] / n_boot - mu * mu));
    }
    return out;
}

}  // namespace glasscav
