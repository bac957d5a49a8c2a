#include "mmcoal/is.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "mmcoal/combinatorics.hpp"
#include "mmcoal/errors.hpp"
#include "mmcoal/parallel.hpp"
#include "mmcoal/rng.hpp"

namespace mmcoal {

const char* to_string(ProposalKind kind) {
    switch (kind) {
        case ProposalKind::GT: return "gt";
        case ProposalKind::SD: return "sd";
        case ProposalKind::K: return "k";
        case ProposalKind::K2: return "k2";
    }
    return "?";
}

ProposalKind parse_proposal(std::string_view text) {
    if (text == "gt") return ProposalKind::GT;
    if (text == "sd") return ProposalKind::SD;
    if (text == "k") return ProposalKind::K;
    if (text == "k2") return ProposalKind::K2;
    throw ConfigError("unknown proposal '" + std::string(text) + "' (expected gt, sd, k, k2)");
}

namespace {

double recursion_denominator(const MutationModel& model, const RateTable& rates, int n) {
    return n * model.theta() + rates.total(n);
}

}  // namespace

double forward_prob(const SampleConfig& config, const WeightedMove& move, const MutationModel& model,
                    const RateTable& rates) {
    const int n = config.total();
    if (n < 2 || n > rates.n_max()) throw DomainError("forward_prob: configuration size outside the rate table");
    const int nh = config.count(move.hap);
    const double denom = recursion_denominator(model, rates, n);
    if (move.kind == WeightedMove::Kind::Mutation) {
        if (nh < 1 || move.locus >= model.num_loci() || move.allele < 0 || move.allele >= model.alleles(move.locus))
            throw DomainError("forward_prob: mutation move does not apply to this configuration");
        const HapId parent = model.substitute(move.hap, move.locus, move.allele);
        const int pred_count = config.count(parent) + 1 - (parent == move.hap ? 1 : 0);
        return model.theta(move.locus) * pred_count *
               model.transition(move.locus, move.allele, model.allele(move.hap, move.locus)) / denom;
    }
    if (move.k < 2 || move.k > nh) throw DomainError("forward_prob: merger move does not apply to this configuration");
    const int k = move.k;
    return binomial(n, k) * rates.lambda(n, k) * (nh - k + 1) / (n - k + 1) / denom;
}

namespace {

std::vector<WeightedMove> propose_moves(const SampleConfig& config, const MutationModel& model, const RateTable& rates,
                                        ProposalKind kind, const CsdEvaluator* csd, bool with_predecessors) {
    const int n = config.total();
    if (n < 2) throw DomainError("propose: configuration must have at least two lineages");
    if (n > rates.n_max()) throw SizeError("propose: configuration larger than the rate table");
    const bool use_csd = kind != ProposalKind::GT;
    if (use_csd && !csd) throw ConfigError("propose: CSD evaluator required for this proposal");
    const double denom = recursion_denominator(model, rates, n);

    std::vector<WeightedMove> out;
    std::vector<double> logw;
    for (const auto& [h, nh] : config.entries()) {
        const SampleConfig base = use_csd || with_predecessors ? config.with(h, -1) : SampleConfig{};
        const double log_pi_h = use_csd ? std::log(csd->prob(h, base)) : 0.0;

        for (std::size_t l = 0; l < model.num_loci(); ++l) {
            const int cur = model.allele(h, l);
            for (int a = 0; a < model.alleles(l); ++a) {
                const double p = model.transition(l, a, cur);
                if (p <= 0.0) continue;
                WeightedMove mv;
                mv.kind = WeightedMove::Kind::Mutation;
                mv.hap = h;
                mv.locus = l;
                mv.allele = a;
                mv.parent = model.substitute(h, l, a);
                if (with_predecessors) mv.predecessor = base.with(mv.parent, 1);
                const int pred_count = config.count(mv.parent) + 1 - (mv.parent == h ? 1 : 0);
                mv.forward_prob = model.theta(l) * pred_count * p / denom;
                if (mv.forward_prob <= 0.0) continue;
                double w;
                if (use_csd) {
                    w = std::log(nh * model.theta(l) * p) + std::log(csd->prob(mv.parent, base)) - log_pi_h;
                } else {
                    w = std::log(mv.forward_prob);
                }
                out.push_back(std::move(mv));
                logw.push_back(w);
            }
        }

        // log pi((k-1) e_h | config - (k-1) e_h) = sum_{m=1}^{k-1} log pi(e_h | config - m e_h)
        double chain = 0.0;
        int chain_len = 0;
        for (int k = 2; k <= nh; ++k) {
            const double lam = rates.lambda(n, k);
            if (lam <= 0.0) continue;
            WeightedMove mv;
            mv.kind = WeightedMove::Kind::Coalescence;
            mv.hap = h;
            mv.k = k;
            if (with_predecessors) mv.predecessor = config.with(h, -(k - 1));
            mv.forward_prob = binomial(n, k) * lam * (nh - k + 1) / (n - k + 1) / denom;
            double w;
            if (use_csd) {
                while (chain_len < k - 1) {
                    ++chain_len;
                    chain += chain_len == 1 ? log_pi_h : std::log(csd->prob(h, config.with(h, -chain_len)));
                }
                w = log_binomial(nh, k) + std::log(lam) - chain;
            } else {
                w = std::log(mv.forward_prob);
            }
            out.push_back(std::move(mv));
            logw.push_back(w);
        }
    }
    const double lse = log_sum_exp(logw);
    if (!std::isfinite(lse)) throw ProposalError("propose: all proposal weights are zero");
    for (std::size_t i = 0; i < out.size(); ++i) out[i].proposal_prob = std::exp(logw[i] - lse);
    return out;
}

}  // namespace

std::vector<WeightedMove> propose(const SampleConfig& config, const MutationModel& model, const RateTable& rates,
                                  ProposalKind kind, const CsdEvaluator* csd) {
    return propose_moves(config, model, rates, kind, csd, true);
}

std::vector<int> default_checkpoints(int n) {
    std::vector<int> out;
    for (int b = n - 5; b >= 5; b -= 5) out.push_back(b);
    return out;
}

std::shared_ptr<const MoveSet> Stepper::moves(const SampleConfig& config) const {
    {
        std::shared_lock lock(mu_);
        if (auto it = cache_.find(config); it != cache_.end()) return it->second;
    }
    auto ms = std::make_shared<const MoveSet>(build(config));
    std::unique_lock lock(mu_);
    if (cached_moves_ > 4'000'000) {
        cache_.clear();
        cached_moves_ = 0;
    }
    auto [it, inserted] = cache_.emplace(config, ms);
    if (inserted) cached_moves_ += ms->moves.size() + 1;
    return it->second;
}

namespace {

struct Cohort {
    std::vector<SampleConfig> configs;
    std::vector<double> logw;
};

double log_mean_exp(const std::vector<double>& v) {
    return log_sum_exp(v) - std::log(static_cast<double>(v.size()));
}

double ess_of(const std::vector<double>& logw) {
    const double m = *std::max_element(logw.begin(), logw.end());
    if (!std::isfinite(m)) return 0.0;
    double s = 0.0, s2 = 0.0;
    for (double x : logw) {
        const double w = std::exp(x - m);
        s += w;
        s2 += w * w;
    }
    return s * s / s2;
}

void advance(SampleConfig& cfg, double& logw, int target, const Stepper& stepper, Rng& rng) {
    while (cfg.total() > target) {
        const auto ms = stepper.moves(cfg);
        if (ms->moves.empty()) throw ProposalError("IS: no admissible move from the current configuration");
        const double u = uniform01(rng) * ms->cumulative.back();
        auto pos = std::upper_bound(ms->cumulative.begin(), ms->cumulative.end(), u);
        if (pos == ms->cumulative.end()) --pos;
        const auto& mv = ms->moves[static_cast<std::size_t>(pos - ms->cumulative.begin())];
        if (!std::isfinite(mv.log_weight)) throw ProposalError("IS: sampled move has zero forward probability");
        for (std::uint32_t d = mv.begin; d < mv.end; ++d) cfg.add(ms->deltas[d].first, ms->deltas[d].second);
        logw += mv.log_weight;
    }
}

}  // namespace

Estimate run_smc(const SampleConfig& data, const Stepper& stepper, const ISConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const int n = data.total();
    if (n < 1) throw DomainError("IS: empty data");
    if (cfg.particles < 1) throw ConfigError("IS: particle count must be >= 1");
    if (cfg.replicates < 1) throw ConfigError("IS: replicate count must be >= 1");
    if (!(cfg.ess_threshold > 0.0 && cfg.ess_threshold <= 1.0)) throw ConfigError("IS: ESS threshold must lie in (0, 1]");
    if (cfg.threads < 1) throw ConfigError("IS: thread count must be >= 1");

    std::vector<int> targets;
    if (cfg.resample) {
        const auto cps = cfg.checkpoints.empty() ? default_checkpoints(n) : cfg.checkpoints;
        for (std::size_t i = 1; i < cps.size(); ++i)
            if (cps[i] >= cps[i - 1]) throw ConfigError("IS: checkpoints must be strictly decreasing");
        for (int b : cps) {
            if (b < 1) throw ConfigError("IS: checkpoints must be positive");
            if (b < n && b > 1) targets.push_back(b);
        }
    }
    targets.push_back(1);

    const std::size_t np = static_cast<std::size_t>(cfg.particles);
    Estimate est;
    est.particles = cfg.particles;
    est.replicates = cfg.replicates;
    double ess_acc = 0.0;
    for (int rep = 0; rep < cfg.replicates; ++rep) {
        Cohort cohort{std::vector<SampleConfig>(np, data), std::vector<double>(np, 0.0)};
        double log_const = 0.0;
        for (std::size_t seg = 0; seg < targets.size(); ++seg) {
            const int b = targets[seg];
            parallel_for(np, cfg.threads, [&](std::size_t i) {
                Rng rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(rep), i, seg}));
                advance(cohort.configs[i], cohort.logw[i], b, stepper, rng);
                if (b == 1) cohort.logw[i] += stepper.log_terminal(cohort.configs[i].entries().front().first);
            });
            if (b == 1) break;
            if (ess_of(cohort.logw) < cfg.ess_threshold * static_cast<double>(np)) {
                // systematic resampling
                const double m = *std::max_element(cohort.logw.begin(), cohort.logw.end());
                std::vector<double> cum(np);
                double acc = 0.0;
                for (std::size_t i = 0; i < np; ++i) {
                    acc += std::exp(cohort.logw[i] - m);
                    cum[i] = acc;
                }
                log_const += log_mean_exp(cohort.logw);
                Rng rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(rep), seg, 0xA5A5A5A5ULL}));
                const double u0 = uniform01(rng);
                std::vector<SampleConfig> next;
                next.reserve(np);
                std::size_t j = 0;
                for (std::size_t i = 0; i < np; ++i) {
                    const double u = (u0 + static_cast<double>(i)) / static_cast<double>(np) * acc;
                    while (j + 1 < np && cum[j] <= u) ++j;
                    next.push_back(cohort.configs[j]);
                }
                cohort.configs = std::move(next);
                std::fill(cohort.logw.begin(), cohort.logw.end(), 0.0);
                ++est.resampling_events;
            }
        }
        est.replicate_logliks.push_back(log_const + log_mean_exp(cohort.logw));
        ess_acc += ess_of(cohort.logw);

        if (cfg.replicates == 1) {
            if (est.resampling_events == 0 && np > 1) {
                const double m = *std::max_element(cohort.logw.begin(), cohort.logw.end());
                double s = 0.0, s2 = 0.0;
                for (double x : cohort.logw) {
                    const double w = std::exp(x - m);
                    s += w;
                    s2 += w * w;
                }
                const double mean = s / np;
                const double var = std::max(0.0, (s2 - np * mean * mean) / (np - 1.0));
                est.se = std::exp(m) * std::sqrt(var / np);
                est.loglik_se = std::sqrt(var / np) / mean;
            } else {
                est.se = std::numeric_limits<double>::quiet_NaN();
                est.loglik_se = std::numeric_limits<double>::quiet_NaN();
            }
        }
    }
    est.ess = ess_acc / cfg.replicates;

    const auto& rl = est.replicate_logliks;
    const double m = *std::max_element(rl.begin(), rl.end());
    double s = 0.0, s2 = 0.0;
    for (double x : rl) {
        const double w = std::exp(x - m);
        s += w;
        s2 += w * w;
    }
    const double r = static_cast<double>(rl.size());
    const double mean_rel = s / r;
    est.loglik = m + std::log(mean_rel);
    est.mean = std::exp(est.loglik);
    if (rl.size() > 1) {
        const double var = std::max(0.0, (s2 - r * mean_rel * mean_rel) / (r - 1.0));
        const double se_rel = std::sqrt(var / r);
        est.se = std::exp(m) * se_rel;
        est.loglik_se = se_rel / mean_rel;
    }
    est.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return est;
}

LambdaStepper::LambdaStepper(const MutationModel& model, const LambdaMeasure& measure, int n_max, ProposalKind kind,
                             CsdOptions csd_options)
    : model_(model),
      rates_(std::make_shared<const RateTable>(measure, std::max(n_max + 1, 2))),
      kind_(kind),
      mrca_(mrca_distribution(model)) {
    if (!(model_.theta() > 0.0)) throw DomainError("IS: total mutation rate theta must be positive");
    switch (kind_) {
        case ProposalKind::GT: break;
        case ProposalKind::SD: csd_ = std::make_unique<CsdEvaluator>(CsdKind::SD, model_, rates_, csd_options); break;
        case ProposalKind::K: csd_ = std::make_unique<CsdEvaluator>(CsdKind::K, model_, rates_, csd_options); break;
        case ProposalKind::K2: csd_ = std::make_unique<CsdEvaluator>(CsdKind::K2, model_, rates_, csd_options); break;
    }
}

double LambdaStepper::log_terminal(HapId h) const { return mrca_.log_prob(model_, h); }

MoveSet LambdaStepper::build(const SampleConfig& config) const {
    MoveSet ms;
    const auto moves = propose_moves(config, model_, *rates_, kind_, csd_.get(), false);
    double acc = 0.0;
    for (const auto& mv : moves) {
        if (mv.proposal_prob <= 0.0) continue;
        MoveSet::Move m;
        m.begin = static_cast<std::uint32_t>(ms.deltas.size());
        if (mv.kind == WeightedMove::Kind::Mutation) {
            if (mv.parent != mv.hap) {
                ms.deltas.emplace_back(mv.hap, -1);
                ms.deltas.emplace_back(mv.parent, 1);
            }
        } else {
            ms.deltas.emplace_back(mv.hap, -(mv.k - 1));
        }
        m.end = static_cast<std::uint32_t>(ms.deltas.size());
        m.log_weight = std::log(mv.forward_prob) - std::log(mv.proposal_prob);
        ms.moves.push_back(m);
        acc += mv.proposal_prob;
        ms.cumulative.push_back(acc);
    }
    return ms;
}

Estimate run_is(const SampleConfig& data, const MutationModel& model, const LambdaMeasure& measure,
                const ISConfig& cfg) {
    if (!(model.theta() > 0.0)) throw DomainError("IS: total mutation rate theta must be positive");
    if (data.total() < 1) throw DomainError("IS: empty data");
    const LambdaStepper stepper(model, measure, data.total(), cfg.proposal, cfg.csd);
    return run_smc(data, stepper, cfg);
}

std::vector<SurfacePoint> surface(const SampleConfig& data, const MutationModel& model,
                                  const std::function<LambdaMeasure(std::optional<double>)>& measure_for,
                                  const std::vector<double>& thetas, const std::vector<std::optional<double>>& alphas,
                                  const ISConfig& cfg) {
    if (thetas.empty() || alphas.empty()) throw ConfigError("surface: empty parameter grid");
    std::vector<SurfacePoint> out;
    std::uint64_t index = 0;
    for (const auto& alpha : alphas) {
        const LambdaMeasure measure = measure_for(alpha);
        for (double theta : thetas) {
            ISConfig c = cfg;
            c.seed = derive_seed(cfg.seed, {index});
            SurfacePoint pt;
            pt.theta = theta;
            pt.alpha = alpha;
            pt.seed = c.seed;
            pt.estimate = run_is(data, model.with_theta(theta), measure, c);
            out.push_back(std::move(pt));
            ++index;
        }
    }
    return out;
}

}  // namespace mmcoal
