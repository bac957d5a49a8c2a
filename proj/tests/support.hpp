#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <Eigen/Dense>

#include "mmcoal/mutation.hpp"
#include "mmcoal/oracle.hpp"
#include "mmcoal/xi.hpp"

namespace testsupport {

using namespace mmcoal;

/// int_0^1 r^{k-2} (1-r)^{n-k} Beta(2-alpha, alpha)(dr) by tanh-sinh quadrature.
inline double beta_rate_quadrature(double alpha, int n, int k) {
    boost::math::quadrature::tanh_sinh<double> integrator;
    const double log_b = std::lgamma(2.0 - alpha) + std::lgamma(alpha);
    auto f = [&](double r) {
        if (r <= 0.0 || r >= 1.0) return 0.0;
        return std::exp((k - 1 - alpha) * std::log(r) + (n - k + alpha - 1) * std::log1p(-r) - log_b);
    };
    return integrator.integrate(f, 0.0, 1.0);
}

/// Every set partition of {0..n-1} as a block label per element (restricted growth strings).
inline std::vector<std::vector<int>> all_set_partitions(int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> a(n, 0);
    std::function<void(int, int)> rec = [&](int i, int blocks) {
        if (i == n) {
            out.push_back(a);
            return;
        }
        for (int b = 0; b <= blocks; ++b) {
            a[i] = b;
            rec(i + 1, std::max(blocks, b + 1));
        }
    };
    if (n == 0) return {{}};
    rec(0, 0);
    return out;
}

/// Block sizes of a restricted growth string.
inline std::vector<int> block_sizes(const std::vector<int>& labels) {
    std::vector<int> sizes;
    for (int b : labels) {
        if (b >= static_cast<int>(sizes.size())) sizes.resize(b + 1, 0);
        ++sizes[b];
    }
    return sizes;
}

/// Ordered-sample recursion over labelled lineages: every set partition of the n positions into
/// type-homogeneous blocks is a merger, every position can mutate. Values are per ordered sample;
/// returns unordered p0 by multiplying with the multinomial count.
/// `solve_iteratively` swaps the per-level LU for a fixed-point sweep.
inline std::map<SampleConfig, double> ordered_recursion(const MutationModel& model, const XiMeasure& xi, int n,
                                                        bool solve_iteratively = false) {
    const HapId size = model.haplotype_count();
    const MrcaDistribution mrca = mrca_distribution(model);
    std::map<SampleConfig, double> ordered;  // p for one ordering of the multiset
    for (HapId h = 0; h < size; ++h) ordered[SampleConfig{{h, 1}}] = mrca.prob(model, h);

    for (int m = 2; m <= n; ++m) {
        const auto configs = enumerate_configs(size, m);
        std::map<SampleConfig, int> index;
        for (std::size_t i = 0; i < configs.size(); ++i) index[configs[i]] = static_cast<int>(i);
        const auto parts = all_set_partitions(m);

        // g_m by brute force over all partitions
        double g = 0.0;
        for (const auto& p : parts) {
            std::vector<int> sizes;
            int s = 0;
            for (int b : block_sizes(p)) (b >= 2 ? sizes.push_back(b) : void(++s));
            if (sizes.empty()) continue;
            std::sort(sizes.rbegin(), sizes.rend());
            g += xi_rate(xi, m, sizes, s);
        }

        const int dim = static_cast<int>(configs.size());
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
        for (int i = 0; i < dim; ++i) {
            const std::vector<HapId> x = configs[i].expand();
            a(i, i) += m * model.theta() + g;
            for (int pos = 0; pos < m; ++pos)
                for (std::size_t l = 0; l < model.num_loci(); ++l)
                    for (int al = 0; al < model.alleles(l); ++al) {
                        const double p = model.transition(l, al, model.allele(x[pos], l));
                        if (p == 0.0) continue;
                        SampleConfig c = configs[i].with(x[pos], -1).with(model.substitute(x[pos], l, al), 1);
                        a(i, index.at(c)) -= model.theta(l) * p;
                    }
            for (const auto& p : parts) {
                const auto sizes_all = block_sizes(p);
                std::vector<HapId> block_type(sizes_all.size());
                bool homogeneous = true;
                std::vector<char> seen(sizes_all.size(), 0);
                for (int pos = 0; pos < m; ++pos) {
                    if (!seen[p[pos]]) {
                        seen[p[pos]] = 1;
                        block_type[p[pos]] = x[pos];
                    } else if (block_type[p[pos]] != x[pos]) {
                        homogeneous = false;
                    }
                }
                if (!homogeneous) continue;
                std::vector<int> sizes;
                int s = 0;
                for (int b : sizes_all) (b >= 2 ? sizes.push_back(b) : void(++s));
                if (sizes.empty()) continue;
                std::sort(sizes.rbegin(), sizes.rend());
                const double r = xi_rate(xi, m, sizes, s);
                if (r == 0.0) continue;
                SampleConfig pred;
                for (HapId t : block_type) pred.add(t, 1);
                rhs(i) += r * ordered.at(pred);
            }
        }
        Eigen::VectorXd sol;
        if (solve_iteratively) {
            sol = Eigen::VectorXd::Zero(dim);
            for (int it = 0; it < 100000; ++it) {
                Eigen::VectorXd next(dim);
                for (int i = 0; i < dim; ++i) {
                    double acc = rhs(i);
                    for (int j = 0; j < dim; ++j)
                        if (j != i) acc -= a(i, j) * sol(j);
                    next(i) = acc / a(i, i);
                }
                const double diff = (next - sol).cwiseAbs().maxCoeff();
                sol = next;
                if (diff < 1e-16) break;
            }
        } else {
            sol = a.fullPivLu().solve(rhs);
        }
        for (int i = 0; i < dim; ++i) ordered[configs[i]] = sol(i);
    }

    std::map<SampleConfig, double> out;
    for (const auto& [c, p] : ordered) {
        double log_mult = std::lgamma(c.total() + 1.0);
        for (const auto& [h, k] : c.entries()) log_mult -= std::lgamma(k + 1.0);
        out[c] = p * std::exp(log_mult);
    }
    return out;
}

inline MutationModel flip_model(int loci, double theta) { return MutationModel::symmetric_biallelic(loci, theta); }

}  // namespace testsupport
