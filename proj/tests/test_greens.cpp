#include <cmath>
#include <numbers>

#include <doctest.h>

#include "glasscav/greens.hpp"
#include "glasscav/rng.hpp"
#include "oracles.hpp"

using namespace glasscav;

namespace {
constexpr double kPi = std::numbers::pi;

CavityGeometry geom47(double phi = 0.0, int eta = 0) {
    CavityGeometry g;
    g.phi = phi;
    g.eta = eta;
    return g;
}
}  // namespace

TEST_CASE("mehler kernel at the origin") {
    const Complex v = mehler_kernel({0.0, 0.0}, {0.0, 0.0}, 1.0);
    CHECK(v.real() == doctest::Approx(std::exp(1.0) / (2.0 * kPi * std::sinh(1.0))).epsilon(1e-14));
    CHECK(v.imag() == doctest::Approx(0.0));
}

TEST_CASE("mehler kernel equals the Hermite mode sum") {
    // truncation remainder scales like e^{-n_max phi}: n_max is chosen per phi so the
    // comparison is meaningful at 1e-6
    const Vec2 r{0.3, 0.0}, rp{0.7, 0.2};
    for (double phi : {0.02, 0.05, 0.1}) {
        const int n_max = static_cast<int>(std::ceil(26.0 / phi));
        const Complex closed = mehler_kernel(r, rp, phi);
        const std::complex<double> sum = oracles::mode_sum_kernel(r, rp, phi, n_max);
        CHECK(std::abs(closed - sum) / std::abs(closed) < 1e-6);
    }
    // at a fixed truncation n_max = 200 the remainder dominates below ~1e-4
    const Complex closed = mehler_kernel(r, rp, 0.05);
    const std::complex<double> sum200 = oracles::mode_sum_kernel(r, rp, 0.05, 200);
    CHECK(std::abs(closed - sum200) / std::abs(closed) < 2e-3);
}

TEST_CASE("mehler kernel random-point mode-sum agreement") {
    Rng rng(42);
    const double phi = 0.1;
    const int n_max = 400;
    for (int t = 0; t < 20; ++t) {
        // moderate separations keep the kernel value well above the truncation floor
        const Vec2 r{rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8)};
        const Vec2 rp{r[0] + rng.uniform(-0.4, 0.4), r[1] + rng.uniform(-0.4, 0.4)};
        const Complex closed = mehler_kernel(r, rp, phi);
        const std::complex<double> sum = oracles::mode_sum_kernel(r, rp, phi, n_max);
        CHECK(std::abs(closed - sum) / std::abs(closed) < 1e-6);
    }
}

TEST_CASE("mehler kernel is symmetric in its arguments") {
    Rng rng(7);
    for (int t = 0; t < 10; ++t) {
        const Vec2 a{rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const Vec2 b{rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const Complex phi{rng.uniform(0.01, 0.5), rng.uniform(-1.0, 1.0)};
        CHECK(mehler_kernel(a, b, phi) == mehler_kernel(b, a, phi));
    }
}

TEST_CASE("mehler kernel rejects singular arguments") {
    CHECK_THROWS_AS(mehler_kernel({0, 0}, {0, 0}, Complex{0.0, 0.0}), std::domain_error);
    CHECK_THROWS_AS(mehler_kernel({0, 0}, {0, 0}, Complex{-0.1, 0.0}), std::invalid_argument);
}

TEST_CASE("family greens matches the selector-filtered mode sum") {
    const CavityGeometry g = geom47(0.05);
    const Vec2 zero{0.0, 0.0};
    const Complex got = family_greens(zero, zero, g);
    // selector tail at the origin is sign-definite; deepen the sum until converged
    const std::complex<double> want = oracles::mode_sum_family(zero, zero, 0.05, 0, 7, 700);
    CHECK(std::abs(got - want) / std::abs(want) < 1e-6);

    const Vec2 r{0.4, -0.1}, rp{0.2, 0.3};
    const Complex got2 = family_greens(r, rp, g);
    const std::complex<double> want2 = oracles::mode_sum_family(r, rp, 0.05, 0, 7, 700);
    CHECK(std::abs(got2 - want2) / std::abs(want2) < 1e-6);
}

TEST_CASE("family greens against a fixed n<=210 truncation at the origin") {
    const CavityGeometry g = geom47(0.05);
    const Vec2 zero{0.0, 0.0};
    const Complex got = family_greens(zero, zero, g);
    const std::complex<double> want210 = oracles::mode_sum_family(zero, zero, 0.05, 0, 7, 210);
    // e^{-210*0.05} ~ 2.8e-5 of positive tail remains outside the truncated sum
    CHECK(std::abs(got - want210) / std::abs(got) < 1e-3);
}

TEST_CASE("family greens projects onto the eta family") {
    // overlap of G^eta(., r') against an out-of-family mode vanishes: equivalently the
    // selector-filtered sum over a wrong family is not reproduced
    const CavityGeometry g = geom47(0.08, 0);
    const Vec2 r{0.5, 0.2};
    Rng rng(3);
    for (int eta_bad = 1; eta_bad < 7; ++eta_bad) {
        const std::complex<double> wrong = oracles::mode_sum_family(r, r, 0.08, eta_bad, 7, 400);
        const Complex got = family_greens(r, r, g);
        CHECK(std::abs(got - wrong) > 1e-6);  // distinct families differ
    }
    (void)rng;
}

TEST_CASE("family greens reduces to the Mehler kernel for N = 1") {
    CavityGeometry g;
    g.M = 1;
    g.N = 1;
    g.eta = 0;
    g.phi = 0.3;
    const Vec2 a{0.2, 0.1}, b{-0.4, 0.5};
    CHECK(std::abs(family_greens(a, b, g) - mehler_kernel(a, b, 0.3)) < 1e-15);
}

TEST_CASE("family greens requires positive phi") {
    CHECK_THROWS_AS(family_greens({0, 0}, {0, 0}, geom47(0.0)), std::domain_error);
}

TEST_CASE("4/7 nonlocal kernel at the origin is 3/pi") {
    const double v = greens_47_nonlocal({0, 0}, {0, 0}, geom47());
    CHECK(v == doctest::Approx(3.0 / kPi).epsilon(1e-13));
}

TEST_CASE("4/7 nonlocal kernel is 7x the phi->0 family greens away from the diagonal") {
    CavityGeometry g = geom47(1e-4);
    const double w0 = g.w0_um;
    const Vec2 ri{w0, 0.0}, rj{0.0, 0.0};
    const Vec2 ri_w{1.0, 0.0}, rj_w{0.0, 0.0};  // waist units for family_greens
    const double closed = greens_47_nonlocal(ri, rj, geom47());
    const Complex cont = family_greens(ri_w, rj_w, g);
    // the family sum carries the 1/N selector weight; the closed form absorbs it
    CHECK(7.0 * cont.real() == doctest::Approx(closed).epsilon(1e-3));
}

TEST_CASE("4/7 nonlocal kernel symmetry and rotation invariance") {
    Rng rng(11);
    const CavityGeometry g = geom47();
    for (int t = 0; t < 25; ++t) {
        const Vec2 a{rng.uniform(-100, 100), rng.uniform(-100, 100)};
        const Vec2 b{rng.uniform(-100, 100), rng.uniform(-100, 100)};
        CHECK(greens_47_nonlocal(a, b, g) == greens_47_nonlocal(b, a, g));
        const double th = rng.uniform(0, 2 * kPi);
        const double ct = std::cos(th), st = std::sin(th);
        const Vec2 ar{ct * a[0] - st * a[1], st * a[0] + ct * a[1]};
        const Vec2 br{ct * b[0] - st * b[1], st * b[0] + ct * b[1]};
        CHECK(greens_47_nonlocal(ar, br, g) ==
              doctest::Approx(greens_47_nonlocal(a, b, g)).epsilon(1e-12));
    }
}

TEST_CASE("midplane interaction matrix suppresses one quadrature") {
    CavityGeometry g = geom47(0.05);
    const Vec2 r{0.3, 0.1}, rp{-0.2, 0.4};
    const Eigen::Matrix2d odd = midplane_interaction_matrix(r, rp, g);
    CHECK(odd(0, 1) == 0.0);
    CHECK(odd(1, 0) == 0.0);
    CHECK(odd(1, 1) == 0.0);
    CHECK(odd(0, 0) == doctest::Approx(family_greens(r, rp, g).real()));

    g.q0_parity = Parity::even;
    const Eigen::Matrix2d even = midplane_interaction_matrix(r, rp, g);
    CHECK(even(0, 0) == 0.0);
    CHECK(even(1, 1) == odd(0, 0));  // transpose through quadrature swap

    CavityGeometry odd_M = g;
    odd_M.M = 1;
    odd_M.N = 2;
    CHECK_THROWS_AS(midplane_interaction_matrix(r, rp, odd_M), std::invalid_argument);
}

TEST_CASE("family frequencies are spaced by FSR/N") {
    const double L = 1.22;
    const double fsr = free_spectral_range_hz(L);
    CHECK(fsr == doctest::Approx(12.29e9).epsilon(0.01));  // ~12.3 GHz for L = 1.22 cm

    // within one FSR the seven families sit on a c/(2NL) lattice
    std::vector<double> fracs;
    for (int eta = 0; eta < 7; ++eta) {
        const double f = family_frequency_hz(0, eta, L, 4, 7);
        fracs.push_back(std::fmod(f / fsr, 1.0));
    }
    std::sort(fracs.begin(), fracs.end());
    for (std::size_t k = 1; k < fracs.size(); ++k)
        CHECK(fracs[k] - fracs[k - 1] == doctest::Approx(1.0 / 7.0).epsilon(1e-12));

    // eta -> eta + 1 advances the frequency by exactly M FSR / N
    const double df = family_frequency_hz(0, 1, L, 4, 7) - family_frequency_hz(0, 0, L, 4, 7);
    CHECK(df == doctest::Approx(4.0 * fsr / 7.0).epsilon(1e-12));
}
