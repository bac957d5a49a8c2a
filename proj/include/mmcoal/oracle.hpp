#pragma once

#include <cstddef>
#include <unordered_map>
#include <vector>

#include "mmcoal/mutation.hpp"
#include "mmcoal/rates.hpp"
#include "mmcoal/xi.hpp"

namespace mmcoal {

struct OracleLimits {
    int max_n = 8;
    HapId max_haplotypes = 256;
    std::size_t max_states = 200000;
};

/// p0(config) for every configuration of size 1..n over H.
class LikelihoodTable {
public:
    using Level = std::unordered_map<SampleConfig, double, SampleConfigHash>;

    explicit LikelihoodTable(std::vector<Level> levels) : levels_(std::move(levels)) {}

    int max_size() const { return static_cast<int>(levels_.size()); }
    /// m = 1..max_size()
    const Level& level(int m) const { return levels_.at(m - 1); }
    double level_sum(int m) const;

private:
    std::vector<Level> levels_;
};

/// Number of configurations of size 1..n over |H| types.
double exact_state_count(HapId haplotypes, int n);

/// All configurations of total size m over haplotypes 0..size-1, in lexicographic order.
std::vector<SampleConfig> enumerate_configs(HapId haplotypes, int m);

/// Sampling recursion solved level by level with the Xi merger kernel.
LikelihoodTable solve_exact(const MutationModel& model, const XiMeasure& xi, int n, const OracleLimits& limits = {});
/// Lambda measures go through the single-coordinate Xi embedding.
LikelihoodTable solve_exact(const MutationModel& model, const LambdaMeasure& lambda, int n,
                            const OracleLimits& limits = {});
/// Same recursion with the single-merger coefficients read from a rate table
/// (C(n,k) lambda_{n,k} (n_h - k + 1)/(n - k + 1)); an independent route for Lambda measures.
LikelihoodTable solve_exact_single_merger(const MutationModel& model, const LambdaMeasure& lambda, int n,
                                          const OracleLimits& limits = {});

/// Throws NotFoundError when the configuration is absent.
double likelihood_of(const LikelihoodTable& table, const SampleConfig& config);

}  // namespace mmcoal
