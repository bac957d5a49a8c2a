#pragma once

#include <cstdint>
#include <vector>

#include "mmcoal/mutation.hpp"
#include "mmcoal/rates.hpp"
#include "mmcoal/rng.hpp"

namespace mmcoal {

/// Lineages are numbered 0..n-1 for the leaves, then n, n+1, ... for merged ancestors.
struct MergerEvent {
    double holding_time = 0.0;  // waiting time since the previous event
    std::vector<int> lineages;  // merged lineages
    int parent = 0;             // id of the new lineage
};

struct Genealogy {
    int leaves = 0;
    std::vector<MergerEvent> events;
    /// Event time of every node (leaves at 0), indexed by lineage id.
    std::vector<double> node_times() const;
};

Genealogy simulate_genealogy(const RateTable& rates, int n, Rng& rng);
Genealogy simulate_genealogy(const LambdaMeasure& measure, int n, std::uint64_t seed);

/// Genealogy plus mutations at rate theta_l per lineage per locus along every branch,
/// MRCA type drawn from the stationary law.
SampleConfig simulate_sample(const MutationModel& model, const LambdaMeasure& measure, int n, std::uint64_t seed);
SampleConfig simulate_sample(const MutationModel& model, const RateTable& rates, int n, Rng& rng);

}  // namespace mmcoal
