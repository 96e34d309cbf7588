#pragma once

#include <array>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace glasscav {

using Vec2 = std::array<double, 2>;

inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm2(const Vec2& a) { return dot(a, a); }

enum class Parity { odd, even };

/// Degenerate M/N Fabry-Perot resonator. Lengths: w0 in um, L and R_mirror in cm.
/// phi is the dimensionless exponential mode cutoff (0 = perfect degeneracy).
struct CavityGeometry {
    int M = 4;
    int N = 7;
    Parity q0_parity = Parity::odd;
    int eta = 0;
    double w0_um = 35.0;
    double length_cm = 1.22;
    double mirror_radius_cm = 1.0;
    double phi = 0.0;

    void validate() const {
        if (N <= 0 || M <= 0) throw std::invalid_argument("CavityGeometry: M, N must be positive");
        if (std::gcd(M, N) != 1) throw std::invalid_argument("CavityGeometry: M/N must be irreducible");
        if (eta < 0 || eta >= N) throw std::invalid_argument("CavityGeometry: eta must lie in [0, N)");
        if (phi < 0.0) throw std::invalid_argument("CavityGeometry: phi must be nonnegative");
        if (w0_um <= 0.0) throw std::invalid_argument("CavityGeometry: w0 must be positive");
    }

    bool is_even_M() const { return M % 2 == 0; }
};

/// Transverse Hermite-Gaussian mode index.
struct ModeIndex {
    int l = 0;
    int m = 0;
    int n() const { return l + m; }
    /// Family selector S_mu^eta: true when l+m = eta (mod N).
    bool in_family(int eta, int N) const { return ((l + m) % N + N) % N == eta; }
};

/// Resonance frequency in Hz of a degenerate (Q0, eta) family: (c/2L) (Q0 + (M/N)(1+eta)).
double family_frequency_hz(int Q0, int eta, double length_cm, int M, int N);

/// Free spectral range c/2L in Hz.
double free_spectral_range_hz(double length_cm);

}  // namespace glasscav
