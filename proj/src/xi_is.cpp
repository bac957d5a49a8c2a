#include "mmcoal/xi_is.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mmcoal/combinatorics.hpp"
#include "mmcoal/errors.hpp"
#include "mmcoal/rng.hpp"

namespace mmcoal {

double multivariate_csd(const CsdEvaluator& csd, const SampleConfig& removed, const SampleConfig& base, int orderings) {
    std::vector<HapId> seq = removed.expand();
    if (seq.empty()) return 1.0;
    if (orderings < 1) throw ConfigError("multivariate CSD: ordering count must be >= 1");

    double log_count = log_factorial(removed.total());
    for (const auto& [h, c] : removed.entries()) log_count -= log_factorial(c);

    std::vector<double> logs;
    if (log_count <= std::log(static_cast<double>(orderings)) + 1e-9) {
        std::sort(seq.begin(), seq.end());
        do {
            logs.push_back(csd.log_sequence(seq, base));
        } while (std::next_permutation(seq.begin(), seq.end()));
    } else {
        Rng rng(derive_seed(SampleConfigHash{}(base), {SampleConfigHash{}(removed)}));
        for (int r = 0; r < orderings; ++r) {
            for (std::size_t i = seq.size() - 1; i > 0; --i) {
                const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i + 1));
                std::swap(seq[i], seq[std::min(j, i)]);
            }
            logs.push_back(csd.log_sequence(seq, base));
        }
    }
    return std::exp(log_sum_exp(logs) - std::log(static_cast<double>(logs.size())));
}

XiStepper::XiStepper(const MutationModel& model, const XiMeasure& xi, ProposalKind kind, CsdOptions csd_options,
                     int orderings)
    : model_(model),
      rates_(std::make_shared<const XiRates>(xi)),
      kind_(kind),
      mrca_(mrca_distribution(model)),
      orderings_(orderings) {
    if (!(model_.theta() > 0.0)) throw DomainError("Xi IS: total mutation rate theta must be positive");
    if (kind_ == ProposalKind::K) {
        csd_ = std::make_unique<CsdEvaluator>(model_, rates_, csd_options);
    } else if (kind_ != ProposalKind::GT) {
        throw ConfigError("Xi IS: proposal must be gt or k");
    }
}

double XiStepper::log_terminal(HapId h) const { return mrca_.log_prob(model_, h); }

MoveSet XiStepper::build(const SampleConfig& config) const {
    const int n = config.total();
    const double denom = n * model_.theta() + rates_->g(n);
    const bool use_csd = csd_ != nullptr;

    std::vector<std::vector<std::pair<HapId, int>>> deltas;
    std::vector<double> log_fwd, log_prop;

    for (const auto& [h, nh] : config.entries()) {
        const SampleConfig base = config.with(h, -1);
        const double log_pi_h = use_csd ? std::log(csd_->prob(h, base)) : 0.0;
        for (std::size_t l = 0; l < model_.num_loci(); ++l) {
            const int cur = model_.allele(h, l);
            for (int a = 0; a < model_.alleles(l); ++a) {
                const double p = model_.transition(l, a, cur);
                if (p <= 0.0) continue;
                const HapId parent = model_.substitute(h, l, a);
                const int pred_count = base.count(parent) + 1;
                const double fwd = model_.theta(l) * pred_count * p / denom;
                if (fwd <= 0.0) continue;
                log_fwd.push_back(std::log(fwd));
                log_prop.push_back(use_csd ? std::log(nh * model_.theta(l) * p) +
                                                 std::log(csd_->prob(parent, base)) - log_pi_h
                                           : std::log(fwd));
                if (parent == h) {
                    deltas.push_back({});
                } else {
                    deltas.push_back({{h, -1}, {parent, 1}});
                }
            }
        }
    }
    for (const auto& mv : enumerate_merger_moves(config, *rates_)) {
        const double lf = mv.log_coefficient - std::log(denom);
        std::vector<std::pair<HapId, int>> d;
        std::vector<SampleConfig::Entry> removed;
        for (const auto& [h, nh] : config.entries()) {
            const int drop = nh - mv.predecessor.count(h);
            if (drop > 0) {
                d.emplace_back(h, -drop);
                removed.emplace_back(h, drop);
            }
        }
        log_fwd.push_back(lf);
        if (use_csd) {
            const double pi = multivariate_csd(*csd_, SampleConfig(removed), mv.predecessor, orderings_);
            log_prop.push_back(std::log(mv.rate_sum) - std::log(pi));
        } else {
            log_prop.push_back(lf);
        }
        deltas.push_back(std::move(d));
    }

    const double lse = log_sum_exp(log_prop);
    if (!std::isfinite(lse)) throw ProposalError("Xi IS: all proposal weights are zero");
    MoveSet ms;
    double acc = 0.0;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        const double q = std::exp(log_prop[i] - lse);
        if (q <= 0.0) continue;
        MoveSet::Move m;
        m.begin = static_cast<std::uint32_t>(ms.deltas.size());
        ms.deltas.insert(ms.deltas.end(), deltas[i].begin(), deltas[i].end());
        m.end = static_cast<std::uint32_t>(ms.deltas.size());
        m.log_weight = log_fwd[i] - (log_prop[i] - lse);
        ms.moves.push_back(m);
        acc += q;
        ms.cumulative.push_back(acc);
    }
    return ms;
}

Estimate run_is_xi(const SampleConfig& data, const MutationModel& model, const XiMeasure& xi, const ISConfig& cfg,
                   const XiISOptions& options) {
    if (data.total() > options.max_n) {
        std::ostringstream os;
        os << "Xi IS: sample size " << data.total() << " exceeds the cap " << options.max_n;
        throw SizeError(os.str());
    }
    if (!(model.theta() > 0.0)) throw DomainError("Xi IS: total mutation rate theta must be positive");
    const XiStepper stepper(model, xi, cfg.proposal, cfg.csd, options.orderings);
    return run_smc(data, stepper, cfg);
}

}  // namespace mmcoal
