#include <cmath>
#include <numbers>

#include <doctest.h>

#include "glasscav/frft.hpp"
#include "glasscav/greens.hpp"
#include "glasscav/rng.hpp"
#include "oracles.hpp"

using namespace glasscav;

namespace {
constexpr double kPi = std::numbers::pi;

ComplexFieldImage gaussian_mode_image(int n_px = 192, double pitch = 3.0, double w0 = 35.0) {
    ComplexFieldImage img = make_image_grid(n_px, pitch, w0);
    for (int iy = 0; iy < n_px; ++iy)
        for (int ix = 0; ix < n_px; ++ix) {
            const double ux = (ix - img.center_x_px) / img.w0_px;
            const double uy = (iy - img.center_y_px) / img.w0_px;
            img.grid(ix, iy) = std::exp(-(ux * ux + uy * uy));
        }
    return img;
}

/// random superposition of HG modes with l+m <= n_max (well contained in the window)
ComplexFieldImage random_mode_image(std::uint64_t seed, int n_max = 12, int n_px = 192,
                                    double pitch = 3.0, double w0 = 35.0) {
    ComplexFieldImage img = make_image_grid(n_px, pitch, w0);
    Rng rng(seed);
    std::vector<std::vector<Complex>> coef(n_max + 1, std::vector<Complex>(n_max + 1));
    for (int l = 0; l <= n_max; ++l)
        for (int m = 0; m + l <= n_max; ++m) coef[l][m] = Complex(rng.normal(), rng.normal());
    for (int iy = 0; iy < n_px; ++iy) {
        const double uy = (iy - img.center_y_px) / img.w0_px;
        const auto py = oracles::hermite_functions(n_max, std::numbers::sqrt2 * uy);
        for (int ix = 0; ix < n_px; ++ix) {
            const double ux = (ix - img.center_x_px) / img.w0_px;
            const auto px = oracles::hermite_functions(n_max, std::numbers::sqrt2 * ux);
            Complex v{0.0, 0.0};
            for (int l = 0; l <= n_max; ++l)
                for (int m = 0; m + l <= n_max; ++m) v += coef[l][m] * px[l] * py[m];
            img.grid(ix, iy) = v;
        }
    }
    return img;
}

double rel_l2(const ComplexFieldImage& a, const ComplexFieldImage& b) {
    return (a.grid - b.grid).norm() / b.grid.norm();
}
}  // namespace

TEST_CASE("frft at alpha = 0 is the identity") {
    const ComplexFieldImage img = random_mode_image(1);
    const ComplexFieldImage out = frft_apply(img, 0.0);
    CHECK(rel_l2(out, img) == 0.0);
}

TEST_CASE("Gaussian mode is an frft eigenfunction with eigenvalue e^{-i alpha}") {
    const ComplexFieldImage img = gaussian_mode_image();
    for (double alpha : {0.7, 4.0 * kPi / 7.0, 2.0}) {
        const ComplexFieldImage out = frft_apply(img, alpha);
        ComplexFieldImage expect = img;
        expect.grid *= std::exp(Complex(0.0, -alpha));
        CHECK(rel_l2(out, expect) < 1e-9);
    }
}

TEST_CASE("HG modes carry eigenvalue e^{-i(1+l+m) alpha}") {
    // a pure HG(2,1) image
    const int n_px = 192;
    ComplexFieldImage img = make_image_grid(n_px, 3.0, 35.0);
    for (int iy = 0; iy < n_px; ++iy) {
        const double uy = (iy - img.center_y_px) / img.w0_px;
        const auto py = oracles::hermite_functions(2, std::numbers::sqrt2 * uy);
        for (int ix = 0; ix < n_px; ++ix) {
            const double ux = (ix - img.center_x_px) / img.w0_px;
            const auto px = oracles::hermite_functions(2, std::numbers::sqrt2 * ux);
            img.grid(ix, iy) = px[2] * py[1];
        }
    }
    const double alpha = 0.9;
    const ComplexFieldImage out = frft_apply(img, alpha);
    ComplexFieldImage expect = img;
    expect.grid *= std::exp(Complex(0.0, -4.0 * alpha));  // 1 + l + m = 4
    CHECK(rel_l2(out, expect) < 1e-9);
}

TEST_CASE("frft preserves power for window-contained fields") {
    for (std::uint64_t seed : {2ull, 3ull}) {
        const ComplexFieldImage img = random_mode_image(seed);
        const ComplexFieldImage out = frft_apply(img, 4.0 * kPi / 7.0);
        CHECK(out.power() / img.power() == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("frft semigroup composition") {
    const ComplexFieldImage img = random_mode_image(4);
    const ComplexFieldImage ab = frft_apply(frft_apply(img, 0.9), 0.7);
    const ComplexFieldImage sum = frft_apply(img, 1.6);
    CHECK(rel_l2(ab, sum) < 1e-8);
}

TEST_CASE("2N half trips at alpha = M pi / N return the field") {
    const ComplexFieldImage img = random_mode_image(5);
    ComplexFieldImage cur = img;
    const double alpha = 4.0 * kPi / 7.0;
    for (int k = 0; k < 14; ++k) cur = frft_apply(cur, alpha);
    // total angle 2 pi M: every mode phase e^{-i(1+n) 2 pi M} = 1
    CHECK(rel_l2(cur, img) < 1e-8);
}

TEST_CASE("symmetry average projects onto the eta = 0 family") {
    CavityGeometry g;
    // in-family mode (l + m = 7) passes; out-of-family (l + m = 3) is annihilated
    const int n_px = 192;
    ComplexFieldImage in_family = make_image_grid(n_px, 3.0, 35.0);
    ComplexFieldImage out_family = make_image_grid(n_px, 3.0, 35.0);
    for (int iy = 0; iy < n_px; ++iy) {
        const double uy = (iy - in_family.center_y_px) / in_family.w0_px;
        const auto py = oracles::hermite_functions(7, std::numbers::sqrt2 * uy);
        for (int ix = 0; ix < n_px; ++ix) {
            const double ux = (ix - in_family.center_x_px) / in_family.w0_px;
            const auto px = oracles::hermite_functions(7, std::numbers::sqrt2 * ux);
            in_family.grid(ix, iy) = px[3] * py[4];
            out_family.grid(ix, iy) = px[2] * py[1];
        }
    }
    const ComplexFieldImage kept = symmetry_average(in_family, g);
    CHECK(rel_l2(kept, in_family) < 1e-9);
    const ComplexFieldImage killed = symmetry_average(out_family, g);
    CHECK(killed.grid.norm() / out_family.grid.norm() < 1e-9);
}

TEST_CASE("symmetry average strips pixel noise and is non-expansive") {
    CavityGeometry g;
    ComplexFieldImage noise = make_image_grid(96, 3.0, 35.0);
    Rng rng(9);
    for (int iy = 0; iy < 96; ++iy)
        for (int ix = 0; ix < 96; ++ix) noise.grid(ix, iy) = Complex(rng.normal(), rng.normal());
    const ComplexFieldImage f1 = symmetry_average(noise, g);
    // a 1/N family projection keeps at most ~1/N of white-noise power
    CHECK(f1.power() < 0.3 * noise.power());
}

TEST_CASE("symmetry average is idempotent on band-limited fields") {
    // the discrete filter is a projector on the subspace the grid represents
    // faithfully; white pixel noise (out-of-window content) is outside it
    CavityGeometry g;
    const ComplexFieldImage img = random_mode_image(21, 14);
    const ComplexFieldImage f1 = symmetry_average(img, g);
    const ComplexFieldImage f2 = symmetry_average(f1, g);
    CHECK(rel_l2(f2, f1) < 1e-9);
}

TEST_CASE("nyquist check flags too-coarse grids") {
    auto fill = [](ComplexFieldImage& im) {
        for (int iy = 0; iy < im.size(); ++iy)
            for (int ix = 0; ix < im.size(); ++ix) im.grid(ix, iy) = 1.0;
    };
    ComplexFieldImage fine = make_image_grid(256, 2.5, 35.0);
    fill(fine);
    CHECK(frft_nyquist_ok(fine, 4.0 * kPi / 7.0, 2));
    ComplexFieldImage coarse = make_image_grid(256, 8.0, 35.0);
    fill(coarse);
    CHECK_FALSE(frft_nyquist_ok(coarse, 4.0 * kPi / 7.0, 1));
}

TEST_CASE("calibration recovers perturbed center and waist") {
    CavityGeometry g;
    // steady-state-like field: in-family random superposition (l+m multiples of 7)
    const int n_px = 128;
    ComplexFieldImage img = make_image_grid(n_px, 3.0, 35.0);
    Rng rng(17);
    std::vector<double> c0(3);
    for (auto& c : c0) c = rng.normal();
    for (int iy = 0; iy < n_px; ++iy) {
        const double uy = (iy - img.center_y_px) / img.w0_px;
        const auto py = oracles::hermite_functions(14, std::numbers::sqrt2 * uy);
        for (int ix = 0; ix < n_px; ++ix) {
            const double ux = (ix - img.center_x_px) / img.w0_px;
            const auto px = oracles::hermite_functions(14, std::numbers::sqrt2 * ux);
            img.grid(ix, iy) = c0[0] * px[0] * py[0] + c0[1] * px[7] * py[0] + c0[2] * px[3] * py[4];
        }
    }
    const double true_w0 = img.w0_px;
    const double true_cx = img.center_x_px;

    SUBCASE("exact calibration is a fixed point") {
        const CalibrationResult res = calibrate_center_waist(img, g);
        CHECK(res.w0_px == doctest::Approx(true_w0).epsilon(0.002));
        CHECK(res.center_x_px == doctest::Approx(true_cx).epsilon(0.002));
        CHECK(res.cost < 1e-6 * img.power());
    }
    SUBCASE("0.5 percent perturbation is recovered within 1 percent") {
        ComplexFieldImage off = img;
        off.w0_px *= 1.005;
        off.center_x_px += 0.7;
        off.center_y_px -= 0.5;
        const CalibrationResult res = calibrate_center_waist(off, g);
        CHECK(std::abs(res.w0_px - true_w0) / true_w0 < 0.01);
        CHECK(std::abs(res.center_x_px - true_cx) < 0.3);
        CHECK(std::abs(res.center_y_px - img.center_y_px) < 0.3);
    }
    SUBCASE("all-zero image is rejected") {
        ComplexFieldImage zero = make_image_grid(64, 3.0, 35.0);
        CHECK_THROWS_AS(calibrate_center_waist(zero, g), std::invalid_argument);
    }
}

TEST_CASE("shifting an image shifts the fitted center") {
    CavityGeometry g;
    const int n_px = 128;
    ComplexFieldImage img = make_image_grid(n_px, 3.0, 35.0);
    for (int iy = 0; iy < n_px; ++iy) {
        const double uy = (iy - img.center_y_px) / img.w0_px;
        const auto py = oracles::hermite_functions(7, std::numbers::sqrt2 * uy);
        for (int ix = 0; ix < n_px; ++ix) {
            const double ux = (ix - img.center_x_px) / img.w0_px;
            const auto px = oracles::hermite_functions(7, std::numbers::sqrt2 * ux);
            img.grid(ix, iy) = px[0] * py[0] + 0.3 * px[7] * py[0];
        }
    }
    // copy shifted by 3 pixels in x
    ComplexFieldImage shifted = img;
    shifted.grid.setZero();
    for (int iy = 0; iy < n_px; ++iy)
        for (int ix = 3; ix < n_px; ++ix) shifted.grid(ix, iy) = img.grid(ix - 3, iy);
    shifted.center_x_px = img.center_x_px;  // stale calibration
    const CalibrationResult res = calibrate_center_waist(shifted, g);
    CHECK(res.center_x_px == doctest::Approx(img.center_x_px + 3.0).epsilon(0.01));
}
