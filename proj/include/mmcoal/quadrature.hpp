#pragma once

#include <vector>

#include <Eigen/Dense>

namespace mmcoal {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Laguerre rule for int_0^inf e^{-t} f(t) dt (Golub-Welsch). Cached per order.
const QuadratureRule& gauss_laguerre(int order);

/// exp(t * Q) for a small generator Q. Two-state generators use the closed form,
/// larger ones Pade scaling-and-squaring.
Eigen::MatrixXd generator_exp(const Eigen::MatrixXd& q, double t);

}  // namespace mmcoal
