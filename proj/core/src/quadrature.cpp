#include "glasscav/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace glasscav {

std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_hermite_nodes(int order) {
    if (order < 1) throw std::invalid_argument("gauss_hermite_nodes: order must be >= 1");

    static std::mutex mutex;
    static std::map<int, std::pair<Eigen::VectorXd, Eigen::VectorXd>> cache;
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find(order);
        if (it != cache.end()) return it->second;
    }

    // Jacobi matrix for Hermite polynomials: diagonal 0, off-diagonal sqrt(k/2)
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(order, order);
    for (int k = 1; k < order; ++k) {
        const double b = std::sqrt(k / 2.0);
        jac(k, k - 1) = b;
        jac(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jac);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("gauss_hermite_nodes: eigensolver failed");

    Eigen::VectorXd nodes = solver.eigenvalues();
    Eigen::VectorXd weights(order);
    const double mu0 = std::sqrt(std::numbers::pi);  // int e^{-t^2} dt
    for (int k = 0; k < order; ++k) {
        const double v0 = solver.eigenvectors()(0, k);
        weights(k) = mu0 * v0 * v0;
    }

    std::lock_guard<std::mutex> lock(mutex);
    auto [it, inserted] = cache.emplace(order, std::make_pair(nodes, weights));
    return it->second;
}

}  // namespace glasscav
