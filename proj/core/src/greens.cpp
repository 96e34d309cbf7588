#include "glasscav/greens.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace glasscav {

namespace {
constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};
}  // namespace

Complex mehler_kernel(const Vec2& r, const Vec2& r_prime, Complex phi) {
    if (phi.real() < 0.0) throw std::invalid_argument("mehler_kernel: Re(phi) must be >= 0");
    const Complex sh = std::sinh(phi);
    if (std::abs(sh) < 1e-300) throw std::domain_error("mehler_kernel: singular argument, sinh(phi) = 0");

    const Vec2 d{r[0] - r_prime[0], r[1] - r_prime[1]};
    const Vec2 s{r[0] + r_prime[0], r[1] + r_prime[1]};
    const Complex th = std::tanh(phi / 2.0);
    const Complex expo = -norm2(d) / (2.0 * th) - norm2(s) * th / 2.0;
    return std::exp(phi + expo) / (2.0 * kPi * sh);
}

Complex family_greens(const Vec2& r, const Vec2& r_prime, const CavityGeometry& geom) {
    geom.validate();
    if (geom.phi <= 0.0)
        throw std::domain_error("family_greens: phi = 0 makes the s = 0 Mehler term a delta function; "
                                "use the closed-form split (greens_47_nonlocal + local term)");
    const int N = geom.N;
    Complex acc{0.0, 0.0};
    for (int s = 0; s < N; ++s) {
        const Complex shift = -2.0 * kPi * kI * static_cast<double>(s) / static_cast<double>(N);
        const Complex phase = std::exp(-kI * (2.0 * kPi * geom.eta * s / static_cast<double>(N)));
        acc += phase * mehler_kernel(r, r_prime, Complex(geom.phi, 0.0) + shift);
    }
    return acc / static_cast<double>(N);
}

double greens_47_nonlocal(const Vec2& r_i, const Vec2& r_j, const CavityGeometry& geom) {
    if (geom.M != 4 || geom.N != 7)
        throw std::invalid_argument("greens_47_nonlocal: closed form is specific to M/N = 4/7");
    if (geom.phi != 0.0)
        throw std::invalid_argument("greens_47_nonlocal: closed form assumes phi = 0");
    const double w0_sq = geom.w0_um * geom.w0_um;
    const double ri2 = norm2(r_i);
    const double rj2 = norm2(r_j);
    const double rij = dot(r_i, r_j);
    double acc = 0.0;
    for (int nu = 1; nu <= 3; ++nu) {
        const double ang = 2.0 * nu * kPi / 7.0;
        const double c = std::cos(ang);
        const double s = std::sin(ang);
        acc += std::sin((1.0 + geom.eta) * ang + (c * (ri2 + rj2) - 2.0 * rij) / (s * w0_sq)) / (kPi * s);
    }
    return acc;
}

Eigen::Matrix2d midplane_interaction_matrix(const Vec2& r, const Vec2& r_prime,
                                            const CavityGeometry& geom) {
    if (!geom.is_even_M())
        throw std::invalid_argument("midplane_interaction_matrix: odd-M (vector-spin) cavities unsupported");
    const double g = family_greens(r, r_prime, geom).real();
    Eigen::Matrix2d out = Eigen::Matrix2d::Zero();
    if (geom.q0_parity == Parity::odd)
        out(0, 0) = g;
    else
        out(1, 1) = g;
    return out;
}

}  // namespace glasscav
