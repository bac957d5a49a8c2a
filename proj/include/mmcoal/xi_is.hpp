#pragma once

#include <memory>

#include "mmcoal/csd.hpp"
#include "mmcoal/is.hpp"
#include "mmcoal/xi.hpp"

namespace mmcoal {

struct XiISOptions {
    int max_n = 10;
    /// Orderings averaged in the multivariate CSD; all distinct orderings are used when there
    /// are at most this many.
    int orderings = 10;
};

/// Ordered multivariate CSD pi(removed | base): the chain product along an ordering of
/// `removed`, averaged over orderings.
double multivariate_csd(const CsdEvaluator& csd, const SampleConfig& removed, const SampleConfig& base, int orderings);

/// Proposal over the Xi recursion: mutation moves as in the Lambda case, merger moves weighted
/// by their aggregated partition rate over the multivariate CSD of the removed lineages.
class XiStepper final : public Stepper {
public:
    XiStepper(const MutationModel& model, const XiMeasure& xi, ProposalKind kind, CsdOptions csd_options,
              int orderings);
    double log_terminal(HapId h) const override;
    const XiRates& rates() const { return *rates_; }

protected:
    MoveSet build(const SampleConfig& config) const override;

private:
    MutationModel model_;
    std::shared_ptr<const XiRates> rates_;
    ProposalKind kind_;
    std::unique_ptr<CsdEvaluator> csd_;
    MrcaDistribution mrca_;
    int orderings_;
};

/// Proposals: GT (proportional to the recursion coefficients) or K (trunk CSD of the Xi measure).
Estimate run_is_xi(const SampleConfig& data, const MutationModel& model, const XiMeasure& xi, const ISConfig& cfg,
                   const XiISOptions& options = {});

}  // namespace mmcoal
