#include "mmcoal/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include <unsupported/Eigen/MatrixFunctions>

#include "mmcoal/errors.hpp"

namespace mmcoal {

const QuadratureRule& gauss_laguerre(int order) {
    static std::map<int, QuadratureRule> cache;
    static std::mutex mu;
    if (order < 1 || order > 200) throw DomainError("gauss_laguerre: order must lie in [1, 200]");
    std::lock_guard lock(mu);
    if (auto it = cache.find(order); it != cache.end()) return it->second;

    // Jacobi matrix of the monic Laguerre recurrence: diag 2i+1, off-diagonal i.
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(order, order);
    for (int i = 0; i < order; ++i) {
        j(i, i) = 2.0 * i + 1.0;
        if (i + 1 < order) {
            j(i, i + 1) = i + 1.0;
            j(i + 1, i) = i + 1.0;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
    if (es.info() != Eigen::Success) throw NumericalError("gauss_laguerre: eigen decomposition failed");
    QuadratureRule rule;
    for (int i = 0; i < order; ++i) {
        rule.nodes.push_back(es.eigenvalues()(i));
        const double v0 = es.eigenvectors()(0, i);
        rule.weights.push_back(v0 * v0);
    }
    return cache.emplace(order, std::move(rule)).first->second;
}

Eigen::MatrixXd generator_exp(const Eigen::MatrixXd& q, double t) {
    if (q.rows() == 2) {
        const double a = q(0, 1) * t;
        const double b = q(1, 0) * t;
        const double r = a + b;
        Eigen::MatrixXd out(2, 2);
        if (r <= 0.0) {
            out.setIdentity();
            return out;
        }
        const double e = std::exp(-r);
        // 1 - e without cancellation for small r
        const double one_minus_e = -std::expm1(-r);
        out(0, 0) = (b + a * e) / r;
        out(0, 1) = a * one_minus_e / r;
        out(1, 0) = b * one_minus_e / r;
        out(1, 1) = (a + b * e) / r;
        return out;
    }
    Eigen::MatrixXd scaled = q * t;
    return scaled.exp();
}

}  // namespace mmcoal
