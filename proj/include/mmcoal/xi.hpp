#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmcoal/mutation.hpp"
#include "mmcoal/rates.hpp"

namespace mmcoal {

/// Point mass of Xi on the simplex; coordinates are kept sorted non-increasing, zeros dropped.
struct XiAtom {
    std::vector<double> coords;
    double mass;
};

/// Xi = Xi({0}) delta_0 + finitely many simplex atoms (+ an optional single-coordinate Beta
/// part, which is how Beta Lambda-coalescents embed).
class XiMeasure {
public:
    XiMeasure(double kingman_mass, std::vector<XiAtom> atoms, std::optional<BetaComponent> beta = std::nullopt);

    /// Lambda embedding: all mass on {r_2 = r_3 = ... = 0}.
    static XiMeasure from_lambda(const LambdaMeasure& lambda);

    double kingman_mass() const { return kingman_mass_; }
    const std::vector<XiAtom>& atoms() const { return atoms_; }
    const std::optional<BetaComponent>& beta_component() const { return beta_; }
    /// Largest number of simultaneous merger classes with nonzero rate.
    int max_classes() const { return max_classes_; }
    std::string describe() const;

private:
    double kingman_mass_;
    std::vector<XiAtom> atoms_;
    std::optional<BetaComponent> beta_;
    int max_classes_ = 1;
};

/// lambda_{n; k_1..k_p; s}, with s = n - sum k_i. Index sums run over distinct coordinates.
double xi_rate(const XiMeasure& xi, int n, std::span<const int> sizes, int singletons);

/// g_n: total rate of mergers among n untyped lineages, summed over class-size multisets.
double g_total(const XiMeasure& xi, int n);

/// Memoized rates for one measure. Thread-safe.
class XiRates {
public:
    explicit XiRates(XiMeasure xi);

    const XiMeasure& measure() const { return xi_; }
    /// `sizes` must be non-increasing.
    double rate(int n, const std::vector<int>& sizes, int singletons) const;
    double g(int n) const;
    /// Trunk-ancestry absorption rate of an (n+1)th lineage: g_{n+1} / (n+1).
    double csd_absorption(int n) const { return g(n + 1) / (n + 1); }

private:
    XiMeasure xi_;
    mutable std::mutex mu_;
    mutable std::map<std::pair<int, std::vector<int>>, double> cache_;
    mutable std::map<int, double> g_cache_;
};

/// One way of splitting each type's lineages into classes, aggregated over the set partitions
/// that realize the same class sizes.
struct MergerPattern {
    SampleConfig predecessor;       // k: number of classes per type
    std::vector<int> sizes;         // non-singleton class sizes, non-increasing
    int singletons = 0;
    std::uint64_t multiplicity = 0; // number of set partitions realizing it
};

/// All patterns with 1..max_classes non-singleton classes, every class of a single type.
std::vector<MergerPattern> enumerate_merger_patterns(const SampleConfig& config, int max_classes);

struct MergerMove {
    SampleConfig predecessor;
    double rate_sum = 0.0;         // sum over realizing set partitions of lambda_{n;K;S}
    double log_coefficient = 0.0;  // log of the likelihood-recursion coefficient (without 1/(g_n + n theta))
};

/// Merger moves of the Xi sampling recursion; coefficient
/// n!/prod n_h! * prod k_h!/k! * rate_sum, the p0-form of the ordered lookdown recursion.
std::vector<MergerMove> enumerate_merger_moves(const SampleConfig& config, const XiRates& rates);

}  // namespace mmcoal
