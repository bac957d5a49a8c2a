#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "mmcoal/csd.hpp"
#include "mmcoal/mutation.hpp"
#include "mmcoal/rates.hpp"

namespace mmcoal {

enum class ProposalKind { GT, SD, K, K2 };

const char* to_string(ProposalKind kind);
ProposalKind parse_proposal(std::string_view text);

/// A candidate predecessor of the current configuration.
struct WeightedMove {
    enum class Kind { Mutation, Coalescence };
    Kind kind = Kind::Mutation;
    HapId hap = 0;            // type of the lineage(s) involved
    std::size_t locus = 0;    // mutation only
    int allele = 0;           // parent allele at `locus`, mutation only
    HapId parent = 0;         // S_l^a(hap), mutation only
    int k = 0;                // merger size, coalescence only
    SampleConfig predecessor;
    double forward_prob = 0.0;   // coefficient of p0(predecessor) in the recursion for p0(config)
    double proposal_prob = 0.0;  // normalized
};

/// Recursion coefficient for a move into `config` (the more recent state):
/// mutation: theta_l (n_{S} + 1 - delta) P_{a,h[l]} / (n theta + g_n);
/// coalescence: C(n,k) lambda_{n,k} (n_h - k + 1)/(n - k + 1) / (n theta + g_n).
double forward_prob(const SampleConfig& config, const WeightedMove& move, const MutationModel& model,
                    const RateTable& rates);

/// All moves out of `config` with normalized proposal probabilities. `csd` is required for
/// the CSD-based proposals and ignored for GT.
std::vector<WeightedMove> propose(const SampleConfig& config, const MutationModel& model, const RateTable& rates,
                                  ProposalKind kind, const CsdEvaluator* csd);

struct ISConfig {
    int particles = 1000;
    ProposalKind proposal = ProposalKind::K;
    /// Sample-size checkpoints, strictly decreasing; empty selects n-5, n-10, ..., >= 5.
    std::vector<int> checkpoints;
    bool resample = true;
    double ess_threshold = 0.5;
    int replicates = 8;
    std::uint64_t seed = 1;
    int threads = 1;
    CsdOptions csd{CsdBackend::Quadrature, 4, 4096};
};

std::vector<int> default_checkpoints(int n);

struct Estimate {
    double loglik = 0.0;     // log of the mean over replicates
    double loglik_se = 0.0;  // se / mean
    double mean = 0.0;
    double se = 0.0;         // across replicates (within the cohort if there is one replicate)
    double ess = 0.0;        // final-cohort ESS, averaged over replicates
    double runtime_s = 0.0;
    long particles = 0;      // per replicate
    int replicates = 0;
    int resampling_events = 0;
    std::vector<double> replicate_logliks;
};

/// Compact move list cached per configuration.
struct MoveSet {
    struct Move {
        std::uint32_t begin = 0, end = 0;  // range in `deltas`
        double log_weight = 0.0;           // log(forward / proposal)
    };
    std::vector<std::pair<HapId, int>> deltas;
    std::vector<Move> moves;
    std::vector<double> cumulative;  // normalized proposal CDF
};

/// Produces the proposal for a configuration; results are memoized.
class Stepper {
public:
    virtual ~Stepper() = default;
    std::shared_ptr<const MoveSet> moves(const SampleConfig& config) const;
    /// log of the MRCA factor for a single-lineage configuration.
    virtual double log_terminal(HapId h) const = 0;

protected:
    virtual MoveSet build(const SampleConfig& config) const = 0;

private:
    mutable std::shared_mutex mu_;
    mutable std::unordered_map<SampleConfig, std::shared_ptr<const MoveSet>, SampleConfigHash> cache_;
    mutable std::size_t cached_moves_ = 0;
};

/// Sequential importance sampling with stopping-time resampling.
Estimate run_smc(const SampleConfig& data, const Stepper& stepper, const ISConfig& cfg);

class LambdaStepper final : public Stepper {
public:
    LambdaStepper(const MutationModel& model, const LambdaMeasure& measure, int n_max, ProposalKind kind,
                  CsdOptions csd_options);
    double log_terminal(HapId h) const override;
    const MutationModel& model() const { return model_; }
    const RateTable& rates() const { return *rates_; }
    const CsdEvaluator* csd() const { return csd_.get(); }

protected:
    MoveSet build(const SampleConfig& config) const override;

private:
    MutationModel model_;
    std::shared_ptr<const RateTable> rates_;
    ProposalKind kind_;
    std::unique_ptr<CsdEvaluator> csd_;
    MrcaDistribution mrca_;
};

Estimate run_is(const SampleConfig& data, const MutationModel& model, const LambdaMeasure& measure,
                const ISConfig& cfg);

struct SurfacePoint {
    double theta = 0.0;
    std::optional<double> alpha;
    Estimate estimate;
    std::uint64_t seed = 0;
};

/// One independent run per grid point; the point's seed is derived from the master seed and
/// its index. `measure_for` maps alpha (or nullopt) to the driving measure.
std::vector<SurfacePoint> surface(const SampleConfig& data, const MutationModel& model,
                                  const std::function<LambdaMeasure(std::optional<double>)>& measure_for,
                                  const std::vector<double>& thetas, const std::vector<std::optional<double>>& alphas,
                                  const ISConfig& cfg);

}  // namespace mmcoal
