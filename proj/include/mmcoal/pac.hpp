#pragma once

#include <cstdint>
#include <vector>

#include "mmcoal/csd.hpp"
#include "mmcoal/is.hpp"

namespace mmcoal {

struct PacOptions {
    CsdKind kind = CsdKind::K;
    int permutations = 1000;
    std::uint64_t seed = 1;
    int threads = 1;
    CsdOptions csd{CsdBackend::Quadrature, 10, 4096};
};

/// log[ m(h_1) prod_{i>=2} pi(h_i | h_1, ..., h_{i-1}) ]
double pac_single(const std::vector<HapId>& order, const CsdEvaluator& csd, const MrcaDistribution& mrca);

/// Mean over random orderings of the ordered-sample product (linear scale), with the
/// across-ordering SE. The unordered-configuration likelihood is n! / prod n_h! times this.
Estimate pac_average(const SampleConfig& data, const MutationModel& model, const LambdaMeasure& measure,
                     const PacOptions& options);

/// Per-ordering log values (ordered-sample scale), in ordering index order.
std::vector<double> pac_values(const SampleConfig& data, const MutationModel& model, const LambdaMeasure& measure,
                               const PacOptions& options);

}  // namespace mmcoal
