#include "glasscav/frft.hpp"

#include "glasscav/greens.hpp"
#include "glasscav/threading.hpp"

#include <cmath>
#include <complex>
#include <iostream>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace glasscav {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
const Complex kI{0.0, 1.0};

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

/// Minimal deterministic complex FFT wrapper (FFTW, estimate-mode plans cached per size).
class Fft {
  public:
    static void forward(std::vector<Complex>& v) { run(v, FFTW_FORWARD); }
    static void inverse(std::vector<Complex>& v) {
        run(v, FFTW_BACKWARD);
        const double s = 1.0 / static_cast<double>(v.size());
        for (auto& z : v) z *= s;
    }

  private:
    static void run(std::vector<Complex>& v, int sign) {
        const fftw_plan plan = cached_plan(static_cast<int>(v.size()), sign);
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(v.data()),
                         reinterpret_cast<fftw_complex*>(v.data()));
    }

    static fftw_plan cached_plan(int n, int sign) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        static std::map<std::pair<int, int>, fftw_plan> cache;
        const auto key = std::make_pair(n, sign);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        std::vector<Complex> dummy(n);
        // FFTW_UNALIGNED so the plan applies to any caller buffer
        const fftw_plan plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(dummy.data()),
                                                reinterpret_cast<fftw_complex*>(dummy.data()), sign,
                                                FFTW_ESTIMATE | FFTW_UNALIGNED);
        cache.emplace(key, plan);
        return plan;
    }
};

std::size_t next_pow2(std::size_t n) {
    std::size_t m = 1;
    while (m < n) m <<= 1;
    return m;
}

double wrap_angle(double alpha) {
    double a = std::fmod(alpha, kTwoPi);
    if (a < 0) a += kTwoPi;
    return a;
}

bool is_identity_angle(double a) { return a < 1e-12 || kTwoPi - a < 1e-12; }

/// 1D chirp-decomposed FRFT along a uniformly spaced coordinate axis u_k = (k - c0) h.
/// out_j = C h e^{i(ct-cs) u_j^2} sum_k f_k e^{i(ct-cs) u_k^2} e^{i cs (u_j - u_k)^2},
/// C = e^{-i a/2} sqrt((1 - i ct)/pi), ct = cot a, cs = csc a.
void frft_1d(const Complex* in, Complex* out, int n, double h, double c0, double a) {
    if (is_identity_angle(a)) {
        std::copy(in, in + n, out);
        return;
    }
    if (std::abs(a - kPi) < 1e-12) {
        // parity operator with eigenvalues e^{-i(1+n) pi}: out(u) = -in(-u)
        for (int j = 0; j < n; ++j) {
            const double uj = -(j - c0);
            const int k = static_cast<int>(std::lround(uj + c0));
            out[j] = (k >= 0 && k < n) ? -in[k] : Complex{0.0, 0.0};
        }
        return;
    }
    const double ct = std::cos(a) / std::sin(a);
    const double cs = 1.0 / std::sin(a);
    const Complex C = std::exp(-kI * (a / 2.0)) * std::sqrt(Complex(1.0, -ct) / kPi);

    const std::size_t m = next_pow2(static_cast<std::size_t>(2 * n));
    std::vector<Complex> g(m, Complex{}), ker(m, Complex{});
    for (int k = 0; k < n; ++k) {
        const double u = (k - c0) * h;
        g[k] = in[k] * std::exp(kI * ((ct - cs) * u * u));
    }
    // chirp kernel over lags -(n-1) .. n-1, wrapped so lag 0 sits at index 0
    for (int t = -(n - 1); t <= n - 1; ++t) {
        const double lag = t * h;
        const std::size_t idx = static_cast<std::size_t>((t + static_cast<int>(m)) % static_cast<int>(m));
        ker[idx] = std::exp(kI * (cs * lag * lag));
    }
    Fft::forward(g);
    Fft::forward(ker);
    for (std::size_t i = 0; i < m; ++i) g[i] *= ker[i];
    Fft::inverse(g);
    for (int j = 0; j < n; ++j) {
        const double u = (j - c0) * h;
        out[j] = C * h * std::exp(kI * ((ct - cs) * u * u)) * g[j];
    }
}

/// FFT zero-pad interpolation by 2x (assumes the signal decays at the window edge).
std::vector<Complex> upsample2(const Complex* in, int n) {
    std::vector<Complex> f(in, in + n);
    Fft::forward(f);
    std::vector<Complex> g(2 * n, Complex{});
    const int half = n / 2;
    for (int i = 0; i < half; ++i) g[i] = f[i];
    for (int i = 0; i < half; ++i) g[2 * n - half + i] = f[n - half + i];
    g[half] *= 0.5;
    g[2 * n - half] *= 0.5;
    Fft::inverse(g);
    for (auto& z : g) z *= 2.0;
    return g;
}

void frft_1d_oversampled(const Complex* in, Complex* out, int n, double h, double c0, double a,
                         int oversample) {
    if (is_identity_angle(wrap_angle(a))) {
        std::copy(in, in + n, out);
        return;
    }
    if (oversample <= 1) {
        frft_1d(in, out, n, h, c0, wrap_angle(a));
        return;
    }
    std::vector<Complex> fine(in, in + n);
    int os = 1;
    while (os < oversample) {
        fine = upsample2(fine.data(), static_cast<int>(fine.size()));
        os *= 2;
    }
    std::vector<Complex> res(fine.size());
    frft_1d(fine.data(), res.data(), static_cast<int>(fine.size()), h / os, c0 * os, wrap_angle(a));
    for (int j = 0; j < n; ++j) out[j] = res[static_cast<std::size_t>(j) * os];
}

}  // namespace

bool frft_nyquist_ok(const ComplexFieldImage& img, double alpha, int oversample) {
    const double a = wrap_angle(alpha);
    if (is_identity_angle(a) || std::abs(a - kPi) < 1e-12) return true;
    const double h = 1.0 / (img.w0_px * std::max(1, oversample));
    const double ct = std::cos(a) / std::sin(a);
    const double cs = 1.0 / std::sin(a);

    // the integrand's phase gradient matters only where the field lives; measure the
    // support radius instead of assuming full-window content
    const int n = img.size();
    const double peak = img.grid.cwiseAbs().maxCoeff();
    double u_support = 0.0;
    if (peak > 0.0) {
        for (int iy = 0; iy < n; ++iy)
            for (int ix = 0; ix < n; ++ix) {
                if (std::abs(img.grid(ix, iy)) < 1e-8 * peak) continue;
                const double ux = (ix - img.center_x_px) / img.w0_px;
                const double uy = (iy - img.center_y_px) / img.w0_px;
                u_support = std::max(u_support, std::max(std::abs(ux), std::abs(uy)));
            }
    } else {
        u_support = 0.5 * n / img.w0_px;
    }
    const double chirp_step = 2.0 * (std::abs(ct) + std::abs(cs)) * u_support * h;
    return chirp_step < kPi;
}

ComplexFieldImage frft_apply(const ComplexFieldImage& img, double alpha, const FrftOptions& opts) {
    img.validate();
    if (opts.warn_on_aliasing && !frft_nyquist_ok(img, alpha, opts.oversample)) {
        std::cerr << "[glasscav] warning: frft grid too coarse for alpha = " << alpha
                  << " (chirp sampling violates Nyquist)\n";
    }
    const int n = img.size();
    const double h = 1.0 / img.w0_px;  // waist units per pixel
    ComplexFieldImage out = img;

    // separable: transform along x (columns of constant iy), then along y;
    // lines are independent, so the parallel passes stay bitwise deterministic
    parallel_for(n, 0, [&](int iy) {
        std::vector<Complex> col(n), res(n);
        for (int ix = 0; ix < n; ++ix) col[ix] = img.grid(ix, iy);
        frft_1d_oversampled(col.data(), res.data(), n, h, img.center_x_px, alpha, opts.oversample);
        for (int ix = 0; ix < n; ++ix) out.grid(ix, iy) = res[ix];
    });
    parallel_for(n, 0, [&](int ix) {
        std::vector<Complex> col(n), res(n);
        for (int iy = 0; iy < n; ++iy) col[iy] = out.grid(ix, iy);
        frft_1d_oversampled(col.data(), res.data(), n, h, img.center_y_px, alpha, opts.oversample);
        for (int iy = 0; iy < n; ++iy) out.grid(ix, iy) = res[iy];
    });
    return out;
}

ComplexFieldImage symmetry_average(const ComplexFieldImage& img, const CavityGeometry& geom,
                                   const FrftOptions& opts) {
    geom.validate();
    img.validate();
    const double base = geom.M * kPi / geom.N;
    ComplexFieldImage acc = img;
    acc.grid.setZero();
    for (int l = 0; l < geom.N; ++l) {
        const Complex w = std::exp(kI * (l * (1.0 + geom.eta) * base));
        if (l == 0) {
            acc.grid += w * img.grid;
        } else {
            acc.grid += w * frft_apply(img, l * base, opts).grid;
        }
    }
    acc.grid /= static_cast<double>(geom.N);
    return acc;
}

}  // namespace glasscav
