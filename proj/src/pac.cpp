#include "mmcoal/pac.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "mmcoal/errors.hpp"
#include "mmcoal/parallel.hpp"
#include "mmcoal/rng.hpp"

namespace mmcoal {

double pac_single(const std::vector<HapId>& order, const CsdEvaluator& csd, const MrcaDistribution& mrca) {
    if (order.empty()) throw DomainError("pac_single: empty ordering");
    double acc = mrca.log_prob(csd.model(), order.front());
    SampleConfig running{{order.front(), 1}};
    for (std::size_t i = 1; i < order.size(); ++i) {
        acc += std::log(csd.prob(order[i], running));
        running.add(order[i], 1);
    }
    return acc;
}

namespace {

std::unique_ptr<CsdEvaluator> make_csd(const MutationModel& model, const LambdaMeasure& measure, int n,
                                       const PacOptions& options) {
    if (options.kind == CsdKind::XiK) throw ConfigError("PAC: Xi CSD is not supported here");
    auto rates = std::make_shared<const RateTable>(measure, std::max(n + 1, 2));
    return std::make_unique<CsdEvaluator>(options.kind, model, rates, options.csd);
}

}  // namespace

std::vector<double> pac_values(const SampleConfig& data, const MutationModel& model, const LambdaMeasure& measure,
                               const PacOptions& options) {
    if (data.total() < 1) throw DomainError("PAC: empty data");
    if (options.permutations < 1) throw ConfigError("PAC: permutation count must be >= 1");
    if (!(model.theta() > 0.0)) throw DomainError("PAC: total mutation rate theta must be positive");
    const auto csd = make_csd(model, measure, data.total(), options);
    const MrcaDistribution mrca = mrca_distribution(model);
    const std::vector<HapId> base = data.expand();

    std::vector<double> out(static_cast<std::size_t>(options.permutations));
    parallel_for(out.size(), options.threads, [&](std::size_t r) {
        std::vector<HapId> order = base;
        Rng rng(derive_seed(options.seed, {r}));
        for (std::size_t i = order.size(); i-- > 1;) {
            const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i + 1));
            std::swap(order[i], order[std::min(j, i)]);
        }
        out[r] = pac_single(order, *csd, mrca);
    });
    return out;
}

Estimate pac_average(const SampleConfig& data, const MutationModel& model, const LambdaMeasure& measure,
                     const PacOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto values = pac_values(data, model, measure, options);
    Estimate est;
    const double m = *std::max_element(values.begin(), values.end());
    double s = 0.0, s2 = 0.0;
    for (double v : values) {
        const double w = std::exp(v - m);
        s += w;
        s2 += w * w;
    }
    const double r = static_cast<double>(values.size());
    const double mean_rel = s / r;
    est.loglik = m + std::log(mean_rel);
    est.mean = std::exp(est.loglik);
    if (values.size() > 1) {
        const double var = std::max(0.0, (s2 - r * mean_rel * mean_rel) / (r - 1.0));
        est.se = std::exp(m) * std::sqrt(var / r);
        est.loglik_se = std::sqrt(var / r) / mean_rel;
    }
    est.ess = s * s / s2;
    est.particles = options.permutations;
    est.replicates = 1;
    est.replicate_logliks = values;
    est.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return est;
}

}  // namespace mmcoal
