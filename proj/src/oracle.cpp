#include "mmcoal/oracle.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "mmcoal/combinatorics.hpp"
#include "mmcoal/errors.hpp"

namespace mmcoal {

double LikelihoodTable::level_sum(int m) const {
    double s = 0.0;
    for (const auto& [c, p] : level(m)) s += p;
    return s;
}

double exact_state_count(HapId haplotypes, int n) {
    double total = 0.0;
    for (int m = 1; m <= n; ++m) total += std::exp(log_binomial(static_cast<int>(haplotypes) + m - 1, m));
    return std::round(total);
}

std::vector<SampleConfig> enumerate_configs(HapId haplotypes, int m) {
    std::vector<SampleConfig> out;
    std::vector<SampleConfig::Entry> cur;
    std::function<void(HapId, int)> rec = [&](HapId h, int left) {
        if (left == 0) {
            out.emplace_back(cur);
            return;
        }
        if (h == haplotypes) return;
        for (int c = left; c >= 0; --c) {
            if (c > 0) cur.emplace_back(h, c);
            rec(h + 1, left - c);
            if (c > 0) cur.pop_back();
        }
    };
    rec(0, m);
    return out;
}

namespace {

struct CoalTerm {
    SampleConfig predecessor;
    double coefficient;
};

using CoalFn = std::function<std::vector<CoalTerm>(const SampleConfig&)>;
using TotalFn = std::function<double(int)>;

void check_limits(const MutationModel& model, int n, const OracleLimits& limits) {
    if (n < 1) throw DomainError("solve_exact: sample size must be >= 1");
    const HapId size = model.haplotype_count();
    const double states = exact_state_count(size, n);
    if (n > limits.max_n || size > limits.max_haplotypes || states > static_cast<double>(limits.max_states)) {
        std::ostringstream os;
        os << "solve_exact: state space has " << states << " configurations (n = " << n << ", |H| = " << size
           << "); caps are n <= " << limits.max_n << ", |H| <= " << limits.max_haplotypes << ", states <= "
           << limits.max_states;
        throw SizeError(os.str());
    }
}

LikelihoodTable solve_levels(const MutationModel& model, int n, const CoalFn& coal, const TotalFn& g) {
    const HapId size = model.haplotype_count();
    const MrcaDistribution mrca = mrca_distribution(model);
    std::vector<LikelihoodTable::Level> levels;

    LikelihoodTable::Level first;
    for (HapId h = 0; h < size; ++h) first.emplace(SampleConfig{{h, 1}}, mrca.prob(model, h));
    levels.push_back(std::move(first));

    const double theta = model.theta();
    for (int m = 2; m <= n; ++m) {
        const auto configs = enumerate_configs(size, m);
        std::unordered_map<SampleConfig, int, SampleConfigHash> index;
        for (std::size_t i = 0; i < configs.size(); ++i) index.emplace(configs[i], static_cast<int>(i));
        const int dim = static_cast<int>(configs.size());
        const double denom = m * theta + g(m);

        std::vector<Eigen::Triplet<double>> trips;
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
        for (int i = 0; i < dim; ++i) {
            const SampleConfig& cfg = configs[i];
            double diag = 1.0;
            for (const auto& mv : enumerate_mutation_moves(cfg, model)) {
                const double coef = model.theta(mv.locus) * mv.predecessor.count(mv.parent) *
                                    model.transition(mv.locus, mv.allele, model.allele(mv.hap, mv.locus)) / denom;
                const int j = index.at(mv.predecessor);
                if (j == i) {
                    diag -= coef;
                } else {
                    trips.emplace_back(i, j, -coef);
                }
            }
            trips.emplace_back(i, i, diag);
            const auto& lower = levels;
            for (const auto& term : coal(cfg)) {
                const auto& lvl = lower[term.predecessor.total() - 1];
                rhs(i) += term.coefficient / denom * lvl.at(term.predecessor);
            }
        }
        Eigen::SparseMatrix<double> a(dim, dim);
        a.setFromTriplets(trips.begin(), trips.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(a);
        if (lu.info() != Eigen::Success) throw NumericalError("solve_exact: singular level system");
        const Eigen::VectorXd p = lu.solve(rhs);
        if (lu.info() != Eigen::Success) throw NumericalError("solve_exact: level solve failed");

        LikelihoodTable::Level level;
        level.reserve(dim);
        for (int i = 0; i < dim; ++i) level.emplace(configs[i], p(i));
        levels.push_back(std::move(level));
    }
    return LikelihoodTable(std::move(levels));
}

}  // namespace

LikelihoodTable solve_exact(const MutationModel& model, const XiMeasure& xi, int n, const OracleLimits& limits) {
    check_limits(model, n, limits);
    XiRates rates(xi);
    auto coal = [&](const SampleConfig& cfg) {
        std::vector<CoalTerm> out;
        for (auto& mv : enumerate_merger_moves(cfg, rates))
            out.push_back({std::move(mv.predecessor), std::exp(mv.log_coefficient)});
        return out;
    };
    return solve_levels(model, n, coal, [&](int m) { return rates.g(m); });
}

LikelihoodTable solve_exact(const MutationModel& model, const LambdaMeasure& lambda, int n,
                            const OracleLimits& limits) {
    return solve_exact(model, XiMeasure::from_lambda(lambda), n, limits);
}

LikelihoodTable solve_exact_single_merger(const MutationModel& model, const LambdaMeasure& lambda, int n,
                                          const OracleLimits& limits) {
    check_limits(model, n, limits);
    const RateTable rates(lambda, std::max(n, 2));
    auto coal = [&](const SampleConfig& cfg) {
        std::vector<CoalTerm> out;
        const int m = cfg.total();
        for (const auto& [h, nh] : cfg.entries())
            for (int k = 2; k <= nh; ++k) {
                const double lam = rates.lambda(m, k);
                if (lam <= 0.0) continue;
                out.push_back({cfg.with(h, -(k - 1)), binomial(m, k) * lam * (nh - k + 1) / (m - k + 1)});
            }
        return out;
    };
    return solve_levels(model, n, coal, [&](int m) { return rates.total(m); });
}

double likelihood_of(const LikelihoodTable& table, const SampleConfig& config) {
    const int m = config.total();
    if (m < 1 || m > table.max_size()) throw NotFoundError("likelihood_of: configuration size outside the table");
    const auto& lvl = table.level(m);
    auto it = lvl.find(config);
    if (it == lvl.end()) throw NotFoundError("likelihood_of: configuration not in the table");
    return it->second;
}

}  // namespace mmcoal
