#pragma once

#include <cstdint>
#include <memory>
#include <shared_mutex>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mmcoal/mutation.hpp"
#include "mmcoal/rates.hpp"
#include "mmcoal/xi.hpp"

namespace mmcoal {

enum class CsdKind { SD, K, K2, XiK };
enum class CsdBackend { Exact, Quadrature };

const char* to_string(CsdKind kind);
CsdKind parse_csd_kind(std::string_view text);
CsdBackend parse_csd_backend(std::string_view text);

struct CsdOptions {
    CsdBackend backend = CsdBackend::Quadrature;
    int quad_order = 4;
    HapId exact_cap = 4096;
};

/// Rate at which an extra lineage is absorbed into the trunk of `config`, and the law of the
/// type it copies on absorption.
struct Absorption {
    double rate = 0.0;
    std::vector<std::pair<HapId, double>> restart;  // sums to 1 over present types
};

/// SD and K only need `rates` up to n+1; XiK uses `xi` instead.
Absorption absorption_rate(CsdKind kind, const RateTable* rates, const XiRates* xi, const SampleConfig& config);

/// Stationary law of the trunk restart chain: pi = (1 - beta) nu (I - beta P)^{-1}, where P is
/// the theta-weighted mixture of the per-locus chains.
///
/// Values are cached (per beta for the kernels, per beta and source type for exact rows), so a
/// single evaluator can be shared across workers.
class CsdEvaluator {
public:
    CsdEvaluator(CsdKind kind, MutationModel model, std::shared_ptr<const RateTable> rates, CsdOptions options = {});
    CsdEvaluator(MutationModel model, std::shared_ptr<const XiRates> xi, CsdOptions options = {});

    CsdKind kind() const { return kind_; }
    const MutationModel& model() const { return model_; }
    const CsdOptions& options() const { return options_; }

    Absorption absorption(const SampleConfig& config) const;
    double beta(const SampleConfig& config) const;

    /// pi(e_x | config)
    double prob(HapId x, const SampleConfig& config) const;
    /// All of H; requires |H| <= 2^20.
    Eigen::VectorXd distribution(const SampleConfig& config) const;
    /// pi((k-1) e_h | config) = prod_{j=0}^{k-2} pi(e_h | config + j e_h), k >= 2.
    double chain(HapId h, int k, const SampleConfig& config) const;
    double log_chain(HapId h, int k, const SampleConfig& config) const;
    /// Log probability of drawing seq[0], seq[1], ... in order, each conditioned on the
    /// config grown by the previous draws.
    double log_sequence(const std::vector<HapId>& seq, const SampleConfig& config) const;

    /// [(1 - beta)(I - beta P)^{-1}]_{g, x}
    double kernel(double beta, HapId g, HapId x) const;

private:
    struct NodeKernels {
        // [node][locus class] -> exp(s_j w_c (P_c - I))
        std::vector<std::vector<Eigen::MatrixXd>> mats;
    };
    const NodeKernels& node_kernels(double beta) const;
    const Eigen::VectorXd& exact_row(double beta, HapId g) const;

    CsdKind kind_;
    MutationModel model_;
    std::shared_ptr<const RateTable> rates_;
    std::shared_ptr<const XiRates> xi_;
    CsdOptions options_;
    std::vector<int> class_rep_;  // one locus per class

    mutable std::shared_mutex mu_;
    mutable std::unordered_map<std::uint64_t, std::unique_ptr<NodeKernels>> kernels_;
    struct PairHash {
        std::size_t operator()(const std::pair<std::uint64_t, HapId>& p) const noexcept {
            return std::hash<std::uint64_t>{}(p.first * 0x9E3779B97F4A7C15ULL ^ p.second);
        }
    };
    mutable std::unordered_map<std::pair<std::uint64_t, HapId>, std::unique_ptr<Eigen::VectorXd>, PairHash> rows_;
};

/// Dense mixture matrix sum_l (theta_l / theta) P^{(l)} lifted to H; |H| <= 4096.
Eigen::MatrixXd mixture_matrix(const MutationModel& model);

/// max |pi T - pi| for the restart-chain transition matrix T = beta P + (1 - beta) 1 nu.
double stationarity_residual(const CsdEvaluator& csd, const SampleConfig& config);

/// Residual of the first-event equations
/// (theta + A) pi(h) = A nu_h + sum_l theta_l sum_a P_{a h[l]} pi(S_l^a h).
double first_event_residual(const CsdEvaluator& csd, const SampleConfig& config);

/// Residual of the univariate approximate-CSD recursion with the multiple-merger term
/// evaluated through chain products of the same evaluator. It vanishes for Kingman and is
/// nonzero in general (the trunk approximation does not solve it).
double univariate_recursion_residual(const CsdEvaluator& csd, const RateTable& rates, const SampleConfig& config);

}  // namespace mmcoal
