#include "oracles.hpp"

#include <cmath>
#include <numbers>

namespace oracles {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::vector<double> hermite_functions(int n_max, double x) {
    std::vector<double> psi(n_max + 1);
    psi[0] = std::pow(kPi, -0.25) * std::exp(-x * x / 2.0);
    if (n_max >= 1) psi[1] = std::sqrt(2.0) * x * psi[0];
    for (int k = 2; k <= n_max; ++k)
        psi[k] = std::sqrt(2.0 / k) * x * psi[k - 1] - std::sqrt((k - 1.0) / k) * psi[k - 2];
    return psi;
}

std::complex<double> mode_sum_kernel(const glasscav::Vec2& r, const glasscav::Vec2& r_prime,
                                     std::complex<double> phi, int n_max) {
    const double s2 = std::numbers::sqrt2;
    const auto px = hermite_functions(n_max, s2 * r[0]);
    const auto py = hermite_functions(n_max, s2 * r[1]);
    const auto qx = hermite_functions(n_max, s2 * r_prime[0]);
    const auto qy = hermite_functions(n_max, s2 * r_prime[1]);
    std::complex<double> total{0.0, 0.0};
    for (int l = 0; l <= n_max; ++l) {
        std::complex<double> inner{0.0, 0.0};
        for (int m = 0; m + l <= n_max; ++m)
            inner += py[m] * qy[m] * std::exp(-static_cast<double>(l + m) * phi);
        total += px[l] * qx[l] * inner;
    }
    return total;
}

std::complex<double> mode_sum_family(const glasscav::Vec2& r, const glasscav::Vec2& r_prime,
                                     double phi, int eta, int N, int n_max) {
    const double s2 = std::numbers::sqrt2;
    const auto px = hermite_functions(n_max, s2 * r[0]);
    const auto py = hermite_functions(n_max, s2 * r[1]);
    const auto qx = hermite_functions(n_max, s2 * r_prime[0]);
    const auto qy = hermite_functions(n_max, s2 * r_prime[1]);
    std::complex<double> total{0.0, 0.0};
    for (int l = 0; l <= n_max; ++l)
        for (int m = 0; m + l <= n_max; ++m) {
            if ((l + m) % N != eta) continue;
            total += px[l] * qx[l] * py[m] * qy[m] * std::exp(-(l + m) * phi);
        }
    return total;
}

std::vector<std::vector<int>> ising_local_minima(const Eigen::MatrixXd& J) {
    const int n = static_cast<int>(J.rows());
    std::vector<std::vector<int>> minima;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<int> s(n);
        for (int i = 0; i < n; ++i) s[i] = (mask >> i & 1) ? 1 : -1;
        if (s[0] < 0) continue;  // Z2 canonical representative
        bool stable = true;
        for (int i = 0; i < n && stable; ++i) {
            double field = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != i) field += J(i, j) * s[j];
            if (s[i] * field < 0.0) stable = false;
        }
        if (stable) minima.push_back(s);
    }
    return minima;
}

double uniform_grid_J_nonlocal(const glasscav::Vec2& ri, double sx_i, double sy_i,
                               const glasscav::Vec2& rj, double sx_j, double sy_j, double w0_um,
                               int eta, int nodes, double halfwidth_sigma) {
    const double w0_sq = w0_um * w0_um;
    auto gauss = [](double x, double mu, double s) {
        const double t = (x - mu) / s;
        return std::exp(-0.5 * t * t) / (std::sqrt(2.0 * kPi) * s);
    };
    auto axis = [&](double mu, double s, std::vector<double>& xs, std::vector<double>& ws) {
        const double half = halfwidth_sigma * s;
        const double dx = 2.0 * half / nodes;
        xs.resize(nodes);
        ws.resize(nodes);
        for (int k = 0; k < nodes; ++k) {
            xs[k] = mu - half + (k + 0.5) * dx;
            ws[k] = gauss(xs[k], mu, s) * dx;
        }
    };
    std::vector<double> xi, wxi, yi, wyi, xj, wxj, yj, wyj;
    axis(ri[0], sx_i, xi, wxi);
    axis(ri[1], sy_i, yi, wyi);
    axis(rj[0], sx_j, xj, wxj);
    axis(rj[1], sy_j, yj, wyj);

    double total = 0.0;
    for (int nu = 1; nu <= 3; ++nu) {
        const double ang = 2.0 * nu * kPi / 7.0;
        const double c = std::cos(ang), s = std::sin(ang);
        const double a = c / (s * w0_sq), b = -2.0 / (s * w0_sq);
        // separable in dimensions: complex factors per axis pair
        std::complex<double> fx{0.0, 0.0}, fy{0.0, 0.0};
        const std::complex<double> I{0.0, 1.0};
        for (int p = 0; p < nodes; ++p)
            for (int q = 0; q < nodes; ++q) {
                fx += wxi[p] * wxj[q] *
                      std::exp(I * (a * (xi[p] * xi[p] + xj[q] * xj[q]) + b * xi[p] * xj[q]));
                fy += wyi[p] * wyj[q] *
                      std::exp(I * (a * (yi[p] * yi[p] + yj[q] * yj[q]) + b * yi[p] * yj[q]));
            }
        total += std::imag(std::exp(I * ((1.0 + eta) * ang)) * fx * fy) / (kPi * s);
    }
    return total;
}

}  // namespace oracles
