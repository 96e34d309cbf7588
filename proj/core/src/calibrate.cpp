#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "glasscav/frft.hpp"

namespace glasscav {

namespace {

struct Simplex3 {
    using P = std::array<double, 3>;
    std::array<P, 4> x;
    std::array<double, 4> f;
};

}  // namespace

CalibrationResult calibrate_center_waist(const ComplexFieldImage& img, const CavityGeometry& geom,
                                         const CalibrateOptions& opts) {
    img.validate();
    if (img.grid.squaredNorm() == 0.0)
        throw std::invalid_argument("calibrate_center_waist: degenerate (all-zero) image");

    int evals = 0;
    auto cost = [&](const std::array<double, 3>& p) {
        ++evals;
        if (p[0] <= 1.0) return 1e300;  // waist below one pixel: reject
        ComplexFieldImage trial = img;
        trial.w0_px = p[0];
        trial.center_x_px = p[1];
        trial.center_y_px = p[2];
        FrftOptions fopts = opts.frft;
        fopts.warn_on_aliasing = false;
        const ComplexFieldImage filtered = symmetry_average(trial, geom, fopts);
        return 0.5 * (filtered.grid - trial.grid).squaredNorm();
    };

    std::array<double, 3> best{img.w0_px, img.center_x_px, img.center_y_px};
    double best_f = cost(best);
    bool converged = false;

    for (int restart = 0; restart <= opts.restarts && !converged; ++restart) {
        // simplex seeded around the current best; steps shrink with each restart
        const double scale = 1.0 / (1 << restart);
        Simplex3 s;
        s.x[0] = best;
        s.x[1] = {best[0] * (1.0 + 0.03 * scale), best[1], best[2]};
        s.x[2] = {best[0], best[1] + 1.5 * scale, best[2]};
        s.x[3] = {best[0], best[1], best[2] + 1.5 * scale};
        for (int i = 0; i < 4; ++i) s.f[i] = (i == 0) ? best_f : cost(s.x[i]);

        while (evals < opts.max_evaluations) {
            std::array<int, 4> order{0, 1, 2, 3};
            std::sort(order.begin(), order.end(), [&](int a, int b) { return s.f[a] < s.f[b]; });
            Simplex3 t;
            for (int i = 0; i < 4; ++i) { t.x[i] = s.x[order[i]]; t.f[i] = s.f[order[i]]; }
            s = t;

            // convergence: relative parameter spread and cost spread
            double spread = 0.0;
            for (int i = 1; i < 4; ++i)
                for (int d = 0; d < 3; ++d)
                    spread = std::max(spread, std::abs(s.x[i][d] - s.x[0][d]) /
                                                  std::max(1.0, std::abs(s.x[0][d])));
            if (spread < opts.param_rel_tol && std::abs(s.f[3] - s.f[0]) < opts.cost_tol * (1.0 + s.f[0])) {
                converged = true;
                break;
            }

            std::array<double, 3> centroid{};
            for (int i = 0; i < 3; ++i)
                for (int d = 0; d < 3; ++d) centroid[d] += s.x[i][d] / 3.0;

            auto affine = [&](double t_) {
                std::array<double, 3> p;
                for (int d = 0; d < 3; ++d) p[d] = centroid[d] + t_ * (s.x[3][d] - centroid[d]);
                return p;
            };

            const auto xr = affine(-1.0);
            const double fr = cost(xr);
            if (fr < s.f[0]) {
                const auto xe = affine(-2.0);
                const double fe = cost(xe);
                if (fe < fr) { s.x[3] = xe; s.f[3] = fe; }
                else         { s.x[3] = xr; s.f[3] = fr; }
            } else if (fr < s.f[2]) {
                s.x[3] = xr; s.f[3] = fr;
            } else {
                const auto xc = affine(fr < s.f[3] ? -0.5 : 0.5);
                const double fc = cost(xc);
                if (fc < std::min(fr, s.f[3])) { s.x[3] = xc; s.f[3] = fc; }
                else {
                    for (int i = 1; i < 4; ++i) {
                        for (int d = 0; d < 3; ++d) s.x[i][d] = 0.5 * (s.x[i][d] + s.x[0][d]);
                        s.f[i] = cost(s.x[i]);
                    }
                }
            }
        }
        if (s.f[0] < best_f) { best = s.x[0]; best_f = s.f[0]; }
    }

    if (!converged)
        throw std::runtime_error("calibrate_center_waist: simplex did not converge within budget");

    CalibrationResult res;
    res.w0_px = best[0];
    res.center_x_px = best[1];
    res.center_y_px = best[2];
    res.cost = best_f;
    res.evaluations = evals;
    res.converged = converged;
    return res;
}

}  // namespace glasscav
