#include "glasscav/geometry.hpp"

namespace glasscav {

namespace {
constexpr double kSpeedOfLight_m_s = 299792458.0;
}

double free_spectral_range_hz(double length_cm) {
    if (length_cm <= 0.0) throw std::invalid_argument("cavity length must be positive");
    return kSpeedOfLight_m_s / (2.0 * length_cm * 1e-2);
}

double family_frequency_hz(int Q0, int eta, double length_cm, int M, int N) {
    const double fsr = free_spectral_range_hz(length_cm);
    return fsr * (static_cast<double>(Q0) +
                  static_cast<double>(M) / static_cast<double>(N) * (1.0 + eta));
}

}  // namespace glasscav
