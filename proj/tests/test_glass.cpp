#include <cmath>
#include <numeric>
#include <set>

#include <doctest.h>

#include "glasscav/glass.hpp"
#include "glasscav/rng.hpp"

using namespace glasscav;

namespace {

ReplicaEnsemble ensemble_from_rows(const Eigen::MatrixXd& rows) {
    ReplicaEnsemble e;
    e.n_spins = static_cast<int>(rows.cols());
    for (int a = 0; a < rows.rows(); ++a) {
        SpinConfiguration c;
        c.s = rows.row(a).transpose();
        c.raw_amplitudes = c.s;
        c.seed = a;
        e.configs.push_back(c);
    }
    return e;
}

Eigen::MatrixXd random_sign_rows(int n_reps, int n, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd rows(n_reps, n);
    for (int a = 0; a < n_reps; ++a)
        for (int i = 0; i < n; ++i) rows(a, i) = (rng.normal() > 0 ? 1.0 : -1.0) / std::sqrt(n);
    return rows;
}

/// exactly ultrametric ensemble: four leaf patterns with disjoint private one-spin
/// blocks and a disjoint two-spin child block, so within-child distance is 4/n and
/// cross-child distance 8/n for every pair (all triples isosceles)
Eigen::MatrixXd hierarchical_rows(int n, std::uint64_t seed) {
    Rng rng(seed);
    const int n_reps = 64;
    Eigen::MatrixXd rows(n_reps, n);
    Eigen::VectorXd root(n);
    for (int i = 0; i < n; ++i) root(i) = rng.normal() > 0 ? 1.0 : -1.0;
    for (int a = 0; a < n_reps; ++a) {
        Eigen::VectorXd s = root;
        const int leaf = a % 4;
        const int child = leaf / 2;
        s(leaf) *= -1.0;                       // private block, spins 0..3
        if (child) { s(8) *= -1.0; s(9) *= -1.0; }  // child block
        rows.row(a) = s.transpose() / std::sqrt(n);
    }
    return rows;
}

}  // namespace

TEST_CASE("overlap matrix basics") {
    Eigen::MatrixXd rows(3, 4);
    rows.row(0) << 0.5, 0.5, 0.5, 0.5;
    rows.row(1) << -0.5, -0.5, -0.5, -0.5;
    rows.row(2) << 0.5, -0.5, 0.5, -0.5;
    const OverlapMatrix q = overlap_matrix(rows);
    CHECK(q.Q(0, 0) == doctest::Approx(1.0));
    CHECK(q.Q(0, 1) == doctest::Approx(-1.0));
    CHECK(q.Q(0, 2) == doctest::Approx(0.0));
}

TEST_CASE("overlap distribution symmetrization and goalposts") {
    // two identical replicas: all mass at q = 1, symmetrized to +-1
    Eigen::MatrixXd rows(2, 4);
    rows.row(0) << 0.5, 0.5, 0.5, 0.5;
    rows.row(1) << 0.5, 0.5, 0.5, 0.5;
    const Histogram h = overlap_distribution(overlap_matrix(rows));
    CHECK(h.size() == 50);
    double total = std::accumulate(h.probabilities.begin(), h.probabilities.end(), 0.0);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(h.probabilities.front() == doctest::Approx(0.5));
    CHECK(h.probabilities.back() == doctest::Approx(0.5));

    // a +0.5 overlap pair symmetrizes to equal mass at +-0.5
    Eigen::MatrixXd rows2(2, 4);
    rows2.row(0) << 1.0, 0.0, 0.0, 0.0;
    rows2.row(1) << 0.5, std::sqrt(0.75), 0.0, 0.0;
    const Histogram h2 = overlap_distribution(overlap_matrix(rows2));
    const int up = static_cast<int>((0.5 + 1.0) / 2.0 * 50);
    const int dn = static_cast<int>((-0.5 + 1.0) / 2.0 * 50);
    CHECK(h2.probabilities[up] == doctest::Approx(0.5));
    CHECK(h2.probabilities[dn] == doctest::Approx(0.5));
}

TEST_CASE("Z2 invariance of histograms, K, entropy and |m|") {
    const Eigen::MatrixXd rows = random_sign_rows(40, 8, 3);
    Eigen::MatrixXd flipped = rows;
    Rng rng(9);
    for (int a = 0; a < rows.rows(); ++a)
        if (rng.uniform() < 0.5) flipped.row(a) *= -1.0;

    const Histogram h1 = overlap_distribution(overlap_matrix(rows));
    const Histogram h2 = overlap_distribution(overlap_matrix(flipped));
    for (std::size_t k = 0; k < h1.size(); ++k)
        CHECK(h1.probabilities[k] == doctest::Approx(h2.probabilities[k]).epsilon(1e-12));

    const KCorrelator k1 = k_correlator(overlap_matrix(rows));
    const KCorrelator k2 = k_correlator(overlap_matrix(flipped));
    CHECK(k1.mean_k == doctest::Approx(k2.mean_k).epsilon(1e-12));

    const EntropyEstimate e1 = shannon_entropy_jackknife(ensemble_from_rows(rows));
    const EntropyEstimate e2 = shannon_entropy_jackknife(ensemble_from_rows(flipped));
    CHECK(e1.plug_in_bits == doctest::Approx(e2.plug_in_bits).epsilon(1e-12));
    CHECK(e1.jackknife_bits == doctest::Approx(e2.jackknife_bits).epsilon(1e-12));

    const MagnetizationStats m1 = magnetization_stats(ensemble_from_rows(rows));
    const MagnetizationStats m2 = magnetization_stats(ensemble_from_rows(flipped));
    CHECK(m1.mean_abs_m == doctest::Approx(m2.mean_abs_m).epsilon(1e-12));
}

TEST_CASE("parisi distribution averages realizations with zero stderr on identical input") {
    const Eigen::MatrixXd rows = random_sign_rows(30, 8, 5);
    const Histogram h = overlap_distribution(overlap_matrix(rows));
    const Histogram avg = parisi_distribution({h, h, h});
    for (std::size_t k = 0; k < h.size(); ++k) {
        CHECK(avg.probabilities[k] == doctest::Approx(h.probabilities[k]).epsilon(1e-12));
        CHECK(avg.stderr_[k] == doctest::Approx(0.0));
    }
    CHECK_THROWS_AS(parisi_distribution({h}), std::invalid_argument);
}

TEST_CASE("parisi function of an all-goalpost distribution is constant 1") {
    Histogram h;
    h.bin_centers = {-0.98, 0.98};
    h.probabilities = {0.5, 0.5};
    h.stderr_ = {0.0, 0.0};
    const ParisiFunction pf = parisi_function(h);
    CHECK_FALSE(pf.fit.fitted);
    CHECK(pf.fit.q_ea == doctest::Approx(0.98));
    for (double q : pf.q) CHECK(q == doctest::Approx(0.98));
}

TEST_CASE("parisi function of uniform |q| recovers slope one") {
    Histogram h;
    const int bins = 50;
    for (int k = 0; k < bins; ++k) {
        h.bin_centers.push_back(-1.0 + (k + 0.5) * 2.0 / bins);
        h.probabilities.push_back(1.0 / bins);
        h.stderr_.push_back(0.0);
    }
    const ParisiFunction pf = parisi_function(h);
    REQUIRE(pf.fit.fitted);
    // q(x) = x: quadratic term vanishes, slope one
    const double slope = pf.fitted_q(0.7) - pf.fitted_q(0.2);
    CHECK(slope == doctest::Approx(0.5).epsilon(0.04));
    CHECK(pf.fit.b == doctest::Approx(1.0).epsilon(0.02).scale(1.0));
    // sampled q(x) is non-decreasing
    for (std::size_t i = 1; i < pf.q.size(); ++i) CHECK(pf.q[i] >= pf.q[i - 1]);
}

TEST_CASE("parisi function of a two-cluster ensemble recovers the plateau") {
    // within-cluster q = 0.98, cross-cluster q = 0.30
    Histogram h;
    const int bins = 50;
    h.bin_centers.resize(bins);
    h.probabilities.assign(bins, 0.0);
    h.stderr_.assign(bins, 0.0);
    for (int k = 0; k < bins; ++k) h.bin_centers[k] = -1.0 + (k + 0.5) * 2.0 / bins;
    auto put = [&](double q, double mass) {
        const int k = static_cast<int>((q + 1.0) / 2.0 * bins);
        h.probabilities[k] += mass / 2.0;
        h.probabilities[bins - 1 - k] += mass / 2.0;
    };
    put(0.98, 0.495);
    put(0.30, 0.505);
    const ParisiFunction pf = parisi_function(h);
    REQUIRE(pf.fit.fitted);
    CHECK(pf.fit.q_ea == doctest::Approx(0.98).epsilon(0.021));
    for (std::size_t i = 1; i < pf.q.size(); ++i) CHECK(pf.q[i] >= pf.q[i - 1]);
    // fitted curve is non-decreasing on [0, 1]
    for (double x = 0.05; x < 1.0; x += 0.05)
        CHECK(pf.fitted_q(x) + 1e-9 >= pf.fitted_q(x - 0.05));
}

TEST_CASE("K correlator on a perfectly ultrametric hierarchy is near zero") {
    const OverlapMatrix q = overlap_matrix(hierarchical_rows(16, 2));
    const KCorrelator k = k_correlator(q);
    CHECK(k.mean_k < 0.05);
}

TEST_CASE("K correlator paramagnet baseline matches the reference value") {
    const OverlapMatrix q = overlap_matrix(random_sign_rows(200, 16, 11));
    const KCorrelator k = k_correlator(q);
    CHECK(k.mean_k == doctest::Approx(0.66).epsilon(0.23));  // 0.66 +- 0.15 band
    CHECK(k.fwhm > 0.3);
    CHECK(k.n_triples == 200u * 199u * 198u / 6u);
}

TEST_CASE("K of an equilateral triple is zero") {
    // three replicas with identical pairwise overlap
    Eigen::MatrixXd rows(3, 3);
    const double c = 1.0 / std::sqrt(3.0);
    rows.row(0) << c, c, c;
    rows.row(1) << c, -c, -c;
    rows.row(2) << -c, c, -c;
    const KCorrelator k = k_correlator(overlap_matrix(rows));
    CHECK(k.mean_k == doctest::Approx(0.0));
}

TEST_CASE("clustering splits well-separated clusters at the root") {
    Rng rng(13);
    const int n = 16;
    Eigen::MatrixXd rows(20, n);
    Eigen::VectorXd a(n), b(n);
    for (int i = 0; i < n; ++i) {
        a(i) = rng.normal() > 0 ? 1 : -1;
        b(i) = (i % 2) ? a(i) : -a(i);  // distant pattern
    }
    for (int r = 0; r < 20; ++r) {
        Eigen::VectorXd s = (r < 10) ? a : b;
        const int flip = static_cast<int>(rng.below(n));
        s(flip) *= -1.0;  // small within-cluster scatter
        rows.row(r) = s.transpose() / s.norm();
    }
    const Dendrogram dg = cluster_replicas(overlap_matrix(rows));
    REQUIRE(dg.merges.size() == 19);
    // the root split separates {0..9} from {10..19}
    std::vector<int> left_leaves;
    const auto& root = dg.merges.back();
    std::set<int> left;
    std::vector<int> stack{root.left};
    while (!stack.empty()) {
        const int node = stack.back();
        stack.pop_back();
        if (node < dg.n_leaves) {
            left.insert(node);
        } else {
            stack.push_back(dg.merges[node - dg.n_leaves].left);
            stack.push_back(dg.merges[node - dg.n_leaves].right);
        }
    }
    const bool all_first = std::all_of(left.begin(), left.end(), [](int v) { return v < 10; });
    const bool all_second = std::all_of(left.begin(), left.end(), [](int v) { return v >= 10; });
    CHECK((all_first || all_second));
    CHECK(left.size() == 10);

    // merge heights non-decreasing
    for (std::size_t k = 1; k < dg.merges.size(); ++k)
        CHECK(dg.merges[k].height + 1e-12 >= dg.merges[k - 1].height);
}

TEST_CASE("identical replicas merge at height zero") {
    Eigen::MatrixXd rows(4, 3);
    for (int r = 0; r < 4; ++r) rows.row(r) << 1.0, 0.0, 0.0;
    const Dendrogram dg = cluster_replicas(overlap_matrix(rows));
    for (const auto& m : dg.merges) CHECK(m.height == doctest::Approx(0.0));
    CHECK(dg.leaf_order.size() == 4);
}

TEST_CASE("nested three-level hierarchy is recovered") {
    const Eigen::MatrixXd rows = hierarchical_rows(16, 4);
    const Dendrogram dg = cluster_replicas(overlap_matrix(rows));
    // distinct merge heights: 0 (identical copies), then two positive levels
    std::set<long> heights;
    for (const auto& m : dg.merges) heights.insert(std::lround(m.height * 1e9));
    CHECK(heights.size() == 3);
}

TEST_CASE("entropy of a single repeated pattern is exactly one bit") {
    Eigen::MatrixXd rows(50, 8);
    Rng rng(15);
    Eigen::VectorXd s(8);
    for (int i = 0; i < 8; ++i) s(i) = rng.normal() > 0 ? 1 : -1;
    for (int r = 0; r < 50; ++r) rows.row(r) = ((r % 2) ? s : -s).transpose() / s.norm();
    const EntropyEstimate e = shannon_entropy_jackknife(ensemble_from_rows(rows));
    CHECK(e.plug_in_bits == doctest::Approx(1.0));
    CHECK(e.jackknife_bits == doctest::Approx(1.0));
    CHECK(e.distinct_patterns == 1);
}

TEST_CASE("entropy approaches n for uniform patterns") {
    // 2^6 = 64 distinct patterns over n = 6, each twice (Z2 pairs collapse)
    const int n = 6;
    Eigen::MatrixXd rows(64, n);
    for (int r = 0; r < 64; ++r)
        for (int i = 0; i < n; ++i)
            rows(r, i) = ((r >> i) & 1 ? 1.0 : -1.0) / std::sqrt(n);
    const EntropyEstimate e = shannon_entropy_jackknife(ensemble_from_rows(rows));
    // 32 orbits equally likely: orbit entropy 5 bits + 1 Z2 bit = 6 = n
    CHECK(e.plug_in_bits == doctest::Approx(6.0));
}

TEST_CASE("jackknife reduces the plug-in entropy bias") {
    // three Z2 orbit classes with probabilities 1/2, 1/4, 1/4: H = 1.5 + 1 bits
    const double analytic = 2.5;
    Rng rng(77);
    const int trials = 300, draws = 200;
    Eigen::MatrixXd pats(3, 6);
    pats.row(0) << 1, 1, 1, 1, 1, 1;
    pats.row(1) << 1, -1, 1, -1, 1, -1;
    pats.row(2) << 1, 1, 1, -1, -1, -1;
    double plug_mean = 0.0, jack_mean = 0.0;
    for (int t = 0; t < trials; ++t) {
        Eigen::MatrixXd rows(draws, 6);
        for (int d = 0; d < draws; ++d) {
            const double u = rng.uniform();
            const int k = (u < 0.5) ? 0 : (u < 0.75 ? 1 : 2);
            const double sign = (rng.uniform() < 0.5) ? 1.0 : -1.0;
            rows.row(d) = sign * pats.row(k) / std::sqrt(6.0);
        }
        const EntropyEstimate e = shannon_entropy_jackknife(ensemble_from_rows(rows));
        plug_mean += e.plug_in_bits / trials;
        jack_mean += e.jackknife_bits / trials;
    }
    CHECK(std::abs(jack_mean - analytic) < std::abs(plug_mean - analytic));
}

TEST_CASE("entropy bounds hold for random ensembles") {
    Rng rng(91);
    for (int t = 0; t < 10; ++t) {
        const int n = 3 + static_cast<int>(rng.below(6));
        const int reps = 5 + static_cast<int>(rng.below(60));
        const Eigen::MatrixXd rows = random_sign_rows(reps, n, 1000 + t);
        const EntropyEstimate e = shannon_entropy_jackknife(ensemble_from_rows(rows));
        CHECK(e.plug_in_bits >= 1.0 - 1e-12);
        CHECK(e.plug_in_bits <= n + 1e-12);
    }
}

TEST_CASE("magnetization statistics") {
    SUBCASE("all-up replica has m = 1") {
        Eigen::MatrixXd rows(2, 5);
        rows.setConstant(1.0 / std::sqrt(5.0));
        const MagnetizationStats m = magnetization_stats(ensemble_from_rows(rows));
        CHECK(m.mean_m == doctest::Approx(1.0));
        CHECK(m.mean_abs_m == doctest::Approx(1.0));
    }
    SUBCASE("random signs at n = 25 have std(m) ~ 1/5") {
        const Eigen::MatrixXd rows = random_sign_rows(2000, 25, 21);
        const MagnetizationStats m = magnetization_stats(ensemble_from_rows(rows));
        const double std_m = m.stderr_mean_m * std::sqrt(2000.0);
        CHECK(std_m == doctest::Approx(0.2).epsilon(0.1));
    }
    SUBCASE("Z2-paired ensemble has exactly zero mean m") {
        Eigen::MatrixXd rows = random_sign_rows(10, 5, 23);
        Eigen::MatrixXd paired(20, 5);
        paired.topRows(10) = rows;
        paired.bottomRows(10) = -rows;
        const MagnetizationStats m = magnetization_stats(ensemble_from_rows(paired));
        CHECK(std::abs(m.mean_m) < 1e-15);
    }
}

TEST_CASE("bootstrap errors") {
    auto mean_stat = [](const Eigen::MatrixXd& rows) {
        return std::vector<double>{rows.col(0).mean()};
    };
    SUBCASE("constant statistic has zero stderr") {
        Eigen::MatrixXd rows = Eigen::MatrixXd::Ones(50, 2);
        const auto err = bootstrap_errors(mean_stat, rows, 500, 3);
        CHECK(err[0] == doctest::Approx(0.0));
    }
    SUBCASE("mean of 100 standard normals has stderr near 0.1") {
        Rng rng(31);
        Eigen::MatrixXd rows(100, 1);
        for (int i = 0; i < 100; ++i) rows(i, 0) = rng.normal();
        const auto err = bootstrap_errors(mean_stat, rows, 1000, 4);
        CHECK(err[0] == doctest::Approx(0.1).epsilon(0.2));
        // doubling n_boot moves the estimate by < 5 percent
        const auto err2 = bootstrap_errors(mean_stat, rows, 2000, 4);
        CHECK(std::abs(err2[0] - err[0]) / err[0] < 0.05);
    }
}
