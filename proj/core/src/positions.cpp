#include <cmath>
#include <stdexcept>

#include "glasscav/coupling.hpp"
#include "glasscav/rng.hpp"

namespace glasscav {

void DensityProfile::validate() const {
    if (sigma_x_um <= 0.0 || sigma_y_um <= 0.0)
        throw std::invalid_argument("DensityProfile: sigmas must be positive");
    const double norm = a00 * a00 + a01 * a01 + a10 * a10;
    if (std::abs(norm - 1.0) > 1e-9)
        throw std::invalid_argument("DensityProfile: a00^2 + a01^2 + a10^2 must equal 1");
}

PositionGroupParams position_group(char group) {
    switch (group) {
        case 'A': return {4, 4, 62.0, 62.0, 14.0, 14.0, 6.0, 6.0};
        case 'B': return {3, 4, 85.0, 62.0, 18.0, 14.0, 18.0, 6.0};
        case 'C': return {2, 4, 130.0, 62.0, 26.0, 14.0, 50.0, 6.0};
        case 'D': return {4, 2, 62.0, 124.0, 14.0, 14.0, 6.0, 6.0};
        default: throw std::invalid_argument("position_group: group must be one of A, B, C, D");
    }
}

namespace {

bool constraints_ok(const std::vector<SpinSite>& sites, const PositionConstraints& c) {
    for (std::size_t i = 0; i < sites.size(); ++i) {
        const auto& p = sites[i].position_um;
        if (std::sqrt(norm2(p)) > c.max_radius_um) return false;
        for (std::size_t j = i + 1; j < sites.size(); ++j) {
            const auto& q = sites[j].position_um;
            const double dx = p[0] - q[0];
            const double dy = p[1] - q[1];
            if (std::sqrt(dx * dx + dy * dy) < c.min_separation_um) return false;
        }
    }
    return true;
}

}  // namespace

std::vector<SpinSite> sample_positions(const PositionGroupParams& params, std::uint64_t seed,
                                       const DensityProfile& density,
                                       const PositionConstraints& constraints) {
    density.validate();
    if (params.n_x < 1 || params.n_y < 1)
        throw std::invalid_argument("sample_positions: grid dimensions must be >= 1");
    Rng rng = Rng::stream(seed, 0x706f73);
    for (int attempt = 0; attempt < constraints.max_attempts; ++attempt) {
        const double x_c = rng.uniform(-params.w_cx / 2.0, params.w_cx / 2.0);
        const double y_c = rng.uniform(-params.w_cy / 2.0, params.w_cy / 2.0);
        std::vector<double> xs(params.n_x), ys(params.n_y);
        for (int i = 0; i < params.n_x; ++i)
            xs[i] = x_c + (i - (params.n_x - 1) / 2.0) * params.d_x +
                    rng.uniform(-params.w_x / 2.0, params.w_x / 2.0);
        for (int j = 0; j < params.n_y; ++j)
            ys[j] = y_c + (j - (params.n_y - 1) / 2.0) * params.d_y +
                    rng.uniform(-params.w_y / 2.0, params.w_y / 2.0);
        std::vector<SpinSite> sites;
        sites.reserve(params.n());
        for (int j = 0; j < params.n_y; ++j)
            for (int i = 0; i < params.n_x; ++i)
                sites.push_back(SpinSite{{xs[i], ys[j]}, density});
        if (constraints_ok(sites, constraints)) return sites;
    }
    throw std::runtime_error("sample_positions: constraints unsatisfiable within attempt budget");
}

std::vector<SpinSite> j1_fixture(const DensityProfile& density) {
    density.validate();
    const double xs[4] = {-97.15, -36.3, 25.2, 85.1};
    const double ys[4] = {-93.4, -28.9, 32.3, 97.3};
    std::vector<SpinSite> sites;
    sites.reserve(16);
    for (double y : ys)
        for (double x : xs) sites.push_back(SpinSite{{x, y}, density});
    return sites;
}

}  // namespace glasscav
