#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace mmcoal {

/// Haplotypes are keyed by their mixed-radix index; locus 0 is the most significant digit,
/// matching the left-to-right string form.
using HapId = std::uint64_t;
using Haplotype = std::vector<int>;

struct Locus {
    int alleles = 2;
    double theta = 0.0;
    Eigen::MatrixXd matrix;  // row = from allele, column = to allele
};

/// Finite-sites, finite-alleles mutation model on H = E_1 x ... x E_L.
class MutationModel {
public:
    explicit MutationModel(std::vector<Locus> loci);

    /// L biallelic loci with flip matrices and theta spread evenly.
    static MutationModel symmetric_biallelic(int num_loci, double theta);

    std::size_t num_loci() const { return loci_.size(); }
    const Locus& locus(std::size_t l) const { return loci_.at(l); }
    const std::vector<Locus>& loci() const { return loci_; }
    int alleles(std::size_t l) const { return loci_[l].alleles; }
    double theta() const { return theta_; }
    double theta(std::size_t l) const { return loci_[l].theta; }
    /// P^{(l)}_{from,to}
    double transition(std::size_t l, int from, int to) const { return loci_[l].matrix(from, to); }

    HapId haplotype_count() const { return hap_count_; }
    HapId encode(const Haplotype& h) const;
    Haplotype decode(HapId id) const;
    int allele(HapId id, std::size_t l) const {
        return static_cast<int>((id / strides_[l]) % static_cast<HapId>(loci_[l].alleles));
    }
    HapId substitute(HapId id, std::size_t l, int a) const;

    std::string format(HapId id) const;
    HapId parse(std::string_view text) const;

    /// Same matrices with every theta_l scaled so the total is `theta`.
    MutationModel with_theta(double theta) const;

    /// Loci with identical (theta_l, P^{(l)}) share one class; kernels are computed per class.
    const std::vector<int>& locus_class() const { return locus_class_; }
    int num_locus_classes() const { return num_classes_; }

private:
    std::vector<Locus> loci_;
    std::vector<HapId> strides_;
    HapId hap_count_ = 1;
    double theta_ = 0.0;
    std::vector<int> locus_class_;
    int num_classes_ = 0;
};

/// S_l^a(h) on the explicit allele vector.
Haplotype substitute(const MutationModel& model, const Haplotype& h, std::size_t l, int a);

/// Stationary law of the mixture chain with weights theta_l / theta; it factorizes over loci.
class MrcaDistribution {
public:
    explicit MrcaDistribution(std::vector<Eigen::VectorXd> per_locus) : per_locus_(std::move(per_locus)) {}

    double prob(const MutationModel& model, HapId h) const;
    double log_prob(const MutationModel& model, HapId h) const;
    const Eigen::VectorXd& locus(std::size_t l) const { return per_locus_.at(l); }

private:
    std::vector<Eigen::VectorXd> per_locus_;
};

/// Throws ConfigError (naming the locus) for theta_l = 0 or a reducible P^{(l)}.
MrcaDistribution mrca_distribution(const MutationModel& model);

/// Unordered type-frequency vector n = (n_h), stored sparse and sorted by haplotype id.
class SampleConfig {
public:
    using Entry = std::pair<HapId, int>;

    SampleConfig() = default;
    SampleConfig(std::initializer_list<Entry> entries);
    explicit SampleConfig(const std::vector<Entry>& entries);

    int count(HapId h) const;
    int total() const { return total_; }
    std::size_t distinct() const { return entries_.size(); }
    bool empty() const { return total_ == 0; }
    const std::vector<Entry>& entries() const { return entries_; }

    /// Adds delta copies of h; counts reaching zero are erased. Negative results throw.
    void add(HapId h, int delta);
    SampleConfig with(HapId h, int delta) const {
        SampleConfig c = *this;
        c.add(h, delta);
        return c;
    }
    SampleConfig plus(const SampleConfig& other) const;

    /// Multiset expansion in id order.
    std::vector<HapId> expand() const;

    friend bool operator==(const SampleConfig&, const SampleConfig&) = default;
    friend auto operator<=>(const SampleConfig& a, const SampleConfig& b) { return a.entries_ <=> b.entries_; }

private:
    std::vector<Entry> entries_;
    int total_ = 0;
};

struct SampleConfigHash {
    std::size_t operator()(const SampleConfig& c) const noexcept;
};

/// Backward mutation move: a lineage of type `hap` whose parent carried allele `allele` at `locus`.
struct MutationMove {
    HapId hap;
    std::size_t locus;
    int allele;
    HapId parent;  // S_l^a(hap)
    SampleConfig predecessor;
};

/// One entry per present h, locus l and allele a with P^{(l)}_{a,h[l]} > 0.
std::vector<MutationMove> enumerate_mutation_moves(const SampleConfig& config, const MutationModel& model);

}  // namespace mmcoal
