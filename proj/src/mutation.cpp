#include "mmcoal/mutation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mmcoal/errors.hpp"

namespace mmcoal {

namespace {

constexpr double kRowTol = 1e-12;

bool irreducible(const Eigen::MatrixXd& p) {
    const int e = static_cast<int>(p.rows());
    for (int s = 0; s < e; ++s) {
        std::vector<char> seen(e, 0);
        std::vector<int> stack{s};
        seen[s] = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v = 0; v < e; ++v) {
                if (!seen[v] && p(u, v) > 0.0) {
                    seen[v] = 1;
                    stack.push_back(v);
                }
            }
        }
        if (std::count(seen.begin(), seen.end(), 1) != e) return false;
    }
    return true;
}

}  // namespace

MutationModel::MutationModel(std::vector<Locus> loci) : loci_(std::move(loci)) {
    if (loci_.empty()) throw ConfigError("mutation model: at least one locus required");
    strides_.assign(loci_.size(), 1);
    hap_count_ = 1;
    for (std::size_t i = loci_.size(); i-- > 0;) {
        const Locus& lc = loci_[i];
        std::ostringstream where;
        where << "mutation model: locus " << i << ": ";
        if (lc.alleles < 2) throw ConfigError(where.str() + "need at least two alleles");
        if (lc.theta < 0.0 || !std::isfinite(lc.theta)) throw ConfigError(where.str() + "theta must be >= 0");
        if (lc.matrix.rows() != lc.alleles || lc.matrix.cols() != lc.alleles)
            throw ConfigError(where.str() + "matrix size does not match allele count");
        for (int r = 0; r < lc.alleles; ++r) {
            if ((lc.matrix.row(r).array() < 0.0).any()) throw ConfigError(where.str() + "negative matrix entry");
            if (std::abs(lc.matrix.row(r).sum() - 1.0) > kRowTol)
                throw ConfigError(where.str() + "matrix row does not sum to 1");
        }
        strides_[i] = hap_count_;
        if (hap_count_ > std::numeric_limits<HapId>::max() / static_cast<HapId>(lc.alleles))
            throw SizeError("mutation model: haplotype space does not fit in 64 bits");
        hap_count_ *= static_cast<HapId>(lc.alleles);
    }
    theta_ = 0.0;
    for (const auto& lc : loci_) theta_ += lc.theta;

    locus_class_.assign(loci_.size(), -1);
    std::vector<std::size_t> reps;
    for (std::size_t l = 0; l < loci_.size(); ++l) {
        for (std::size_t c = 0; c < reps.size(); ++c) {
            const Locus& r = loci_[reps[c]];
            if (r.alleles == loci_[l].alleles && r.theta == loci_[l].theta && r.matrix == loci_[l].matrix) {
                locus_class_[l] = static_cast<int>(c);
                break;
            }
        }
        if (locus_class_[l] < 0) {
            locus_class_[l] = static_cast<int>(reps.size());
            reps.push_back(l);
        }
    }
    num_classes_ = static_cast<int>(reps.size());
}

MutationModel MutationModel::symmetric_biallelic(int num_loci, double theta) {
    if (num_loci < 1) throw ConfigError("symmetric_biallelic: need at least one locus");
    Eigen::MatrixXd flip(2, 2);
    flip << 0.0, 1.0, 1.0, 0.0;
    std::vector<Locus> loci(num_loci, Locus{2, theta / num_loci, flip});
    return MutationModel(std::move(loci));
}

HapId MutationModel::encode(const Haplotype& h) const {
    if (h.size() != loci_.size()) throw DomainError("encode: haplotype length does not match locus count");
    HapId id = 0;
    for (std::size_t l = 0; l < loci_.size(); ++l) {
        if (h[l] < 0 || h[l] >= loci_[l].alleles) throw DomainError("encode: allele out of range");
        id += static_cast<HapId>(h[l]) * strides_[l];
    }
    return id;
}

Haplotype MutationModel::decode(HapId id) const {
    if (id >= hap_count_) throw DomainError("decode: haplotype index out of range");
    Haplotype h(loci_.size());
    for (std::size_t l = 0; l < loci_.size(); ++l) h[l] = allele(id, l);
    return h;
}

HapId MutationModel::substitute(HapId id, std::size_t l, int a) const {
    if (l >= loci_.size()) throw DomainError("substitute: locus out of range");
    if (a < 0 || a >= loci_[l].alleles) throw DomainError("substitute: allele out of range");
    const int cur = allele(id, l);
    return id - static_cast<HapId>(cur) * strides_[l] + static_cast<HapId>(a) * strides_[l];
}

std::string MutationModel::format(HapId id) const {
    const Haplotype h = decode(id);
    const bool wide = std::any_of(loci_.begin(), loci_.end(), [](const Locus& l) { return l.alleles > 10; });
    std::string out;
    for (std::size_t l = 0; l < h.size(); ++l) {
        if (wide) {
            if (l) out += ',';
            out += std::to_string(h[l]);
        } else {
            out += static_cast<char>('0' + h[l]);
        }
    }
    return out;
}

HapId MutationModel::parse(std::string_view text) const {
    Haplotype h;
    if (text.find(',') != std::string_view::npos) {
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t end = text.find(',', start);
            if (end == std::string_view::npos) end = text.size();
            const std::string tok(text.substr(start, end - start));
            if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
                throw ParseError("haplotype '" + std::string(text) + "': bad allele token");
            h.push_back(std::stoi(tok));
            start = end + 1;
        }
    } else {
        for (char c : text) {
            if (c < '0' || c > '9') throw ParseError("haplotype '" + std::string(text) + "': non-digit character");
            h.push_back(c - '0');
        }
    }
    if (h.size() != loci_.size())
        throw ParseError("haplotype '" + std::string(text) + "': expected " + std::to_string(loci_.size()) + " loci");
    for (std::size_t l = 0; l < h.size(); ++l)
        if (h[l] >= loci_[l].alleles) throw ParseError("haplotype '" + std::string(text) + "': allele out of range");
    return encode(h);
}

MutationModel MutationModel::with_theta(double theta) const {
    std::vector<Locus> loci = loci_;
    if (theta_ <= 0.0) {
        for (auto& l : loci) l.theta = theta / static_cast<double>(loci.size());
    } else {
        for (auto& l : loci) l.theta = l.theta * (theta / theta_);
    }
    return MutationModel(std::move(loci));
}

Haplotype substitute(const MutationModel& model, const Haplotype& h, std::size_t l, int a) {
    if (l >= model.num_loci()) throw DomainError("substitute: locus out of range");
    if (a < 0 || a >= model.alleles(l)) throw DomainError("substitute: allele out of range");
    Haplotype out = h;
    out[l] = a;
    return out;
}

double MrcaDistribution::prob(const MutationModel& model, HapId h) const {
    double p = 1.0;
    for (std::size_t l = 0; l < per_locus_.size(); ++l) p *= per_locus_[l](model.allele(h, l));
    return p;
}

double MrcaDistribution::log_prob(const MutationModel& model, HapId h) const {
    double lp = 0.0;
    for (std::size_t l = 0; l < per_locus_.size(); ++l) lp += std::log(per_locus_[l](model.allele(h, l)));
    return lp;
}

MrcaDistribution mrca_distribution(const MutationModel& model) {
    std::vector<Eigen::VectorXd> out;
    for (std::size_t l = 0; l < model.num_loci(); ++l) {
        const Locus& lc = model.locus(l);
        if (lc.theta <= 0.0)
            throw ConfigError("mrca_distribution: locus " + std::to_string(l) + " has theta = 0");
        if (!irreducible(lc.matrix))
            throw ConfigError("mrca_distribution: locus " + std::to_string(l) + " has a reducible matrix");
        // m (P - I) = 0 with sum(m) = 1: replace one equation by the normalization.
        const int e = lc.alleles;
        Eigen::MatrixXd a = (lc.matrix - Eigen::MatrixXd::Identity(e, e)).transpose();
        a.row(e - 1).setOnes();
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(e);
        rhs(e - 1) = 1.0;
        Eigen::VectorXd m = a.fullPivLu().solve(rhs);
        out.push_back(m);
    }
    return MrcaDistribution(std::move(out));
}

SampleConfig::SampleConfig(std::initializer_list<Entry> entries) {
    for (const auto& [h, c] : entries) add(h, c);
}

SampleConfig::SampleConfig(const std::vector<Entry>& entries) {
    for (const auto& [h, c] : entries) add(h, c);
}

int SampleConfig::count(HapId h) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), h,
                               [](const Entry& e, HapId key) { return e.first < key; });
    return (it != entries_.end() && it->first == h) ? it->second : 0;
}

void SampleConfig::add(HapId h, int delta) {
    if (delta == 0) return;
    auto it = std::lower_bound(entries_.begin(), entries_.end(), h,
                               [](const Entry& e, HapId key) { return e.first < key; });
    if (it != entries_.end() && it->first == h) {
        const int nv = it->second + delta;
        if (nv < 0) throw DomainError("SampleConfig: count would become negative");
        if (nv == 0) {
            entries_.erase(it);
        } else {
            it->second = nv;
        }
    } else {
        if (delta < 0) throw DomainError("SampleConfig: count would become negative");
        entries_.insert(it, {h, delta});
    }
    total_ += delta;
}

SampleConfig SampleConfig::plus(const SampleConfig& other) const {
    SampleConfig c = *this;
    for (const auto& [h, n] : other.entries_) c.add(h, n);
    return c;
}

std::vector<HapId> SampleConfig::expand() const {
    std::vector<HapId> out;
    out.reserve(total_);
    for (const auto& [h, c] : entries_) out.insert(out.end(), c, h);
    return out;
}

std::size_t SampleConfigHash::operator()(const SampleConfig& c) const noexcept {
    std::size_t seed = 0x9e3779b97f4a7c15ULL;
    for (const auto& [h, n] : c.entries()) {
        seed ^= std::hash<HapId>{}(h) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
        seed ^= std::hash<int>{}(n) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    }
    return seed;
}

std::vector<MutationMove> enumerate_mutation_moves(const SampleConfig& config, const MutationModel& model) {
    std::vector<MutationMove> out;
    for (const auto& [h, nh] : config.entries()) {
        for (std::size_t l = 0; l < model.num_loci(); ++l) {
            const int cur = model.allele(h, l);
            for (int a = 0; a < model.alleles(l); ++a) {
                if (model.transition(l, a, cur) <= 0.0) continue;
                const HapId parent = model.substitute(h, l, a);
                SampleConfig pred = config;
                pred.add(h, -1);
                pred.add(parent, 1);
                out.push_back({h, l, a, parent, std::move(pred)});
            }
        }
    }
    return out;
}

}  // namespace mmcoal
