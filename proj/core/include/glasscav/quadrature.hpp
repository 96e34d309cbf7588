#pragma once

#include <utility>

#include <Eigen/Dense>

namespace glasscav {

/// Gauss-Hermite nodes/weights for int e^{-t^2} f(t) dt, by Golub-Welsch on the
/// Hermite Jacobi matrix. Deterministic; cached per order.
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_hermite_nodes(int order);

}  // namespace glasscav
