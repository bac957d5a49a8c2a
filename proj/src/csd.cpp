#include "mmcoal/csd.hpp"

#include <bit>
#include <cmath>
#include <mutex>
#include <sstream>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "mmcoal/combinatorics.hpp"
#include "mmcoal/errors.hpp"
#include "mmcoal/quadrature.hpp"

namespace mmcoal {

const char* to_string(CsdKind kind) {
    switch (kind) {
        case CsdKind::SD: return "sd";
        case CsdKind::K: return "k";
        case CsdKind::K2: return "k2";
        case CsdKind::XiK: return "xik";
    }
    return "?";
}

CsdKind parse_csd_kind(std::string_view text) {
    if (text == "sd") return CsdKind::SD;
    if (text == "k") return CsdKind::K;
    if (text == "k2") return CsdKind::K2;
    if (text == "xik") return CsdKind::XiK;
    throw ConfigError("unknown CSD kind '" + std::string(text) + "' (expected sd, k, k2)");
}

CsdBackend parse_csd_backend(std::string_view text) {
    if (text == "exact") return CsdBackend::Exact;
    if (text == "quadrature") return CsdBackend::Quadrature;
    throw ConfigError("unknown CSD backend '" + std::string(text) + "' (expected exact, quadrature)");
}

namespace {

void require_rates(const RateTable* rates, int n) {
    if (!rates) throw ConfigError("CSD: rate table required");
    if (n > rates->n_max()) {
        std::ostringstream os;
        os << "CSD: rate table covers n <= " << rates->n_max() << ", need " << n;
        throw SizeError(os.str());
    }
}

}  // namespace

Absorption absorption_rate(CsdKind kind, const RateTable* rates, const XiRates* xi, const SampleConfig& config) {
    const int n = config.total();
    if (n < 1) throw DomainError("absorption_rate: empty configuration");
    Absorption out;
    switch (kind) {
        case CsdKind::SD:
            out.rate = n / 2.0;
            break;
        case CsdKind::K: {
            require_rates(rates, n + 1);
            out.rate = rates->kingman_mass() * n / 2.0 + rates->jump_total(n + 1) / (n + 1);
            break;
        }
        case CsdKind::XiK: {
            if (!xi) throw ConfigError("CSD: Xi rates required");
            out.rate = xi->csd_absorption(n);
            break;
        }
        case CsdKind::K2: {
            require_rates(rates, n + 1);
            for (const auto& [h, c] : config.entries()) {
                double part = rates->kingman_mass() * c / 2.0;
                double jumps = 0.0;
                for (int k = 2; k <= c + 1; ++k) jumps += binomial(c + 1, k) * rates->jump(n + 1, k);
                part += jumps / (c + 1);
                out.rate += part;
                out.restart.emplace_back(h, part);
            }
            if (out.rate > 0.0)
                for (auto& [h, w] : out.restart) w /= out.rate;
            return out;
        }
    }
    for (const auto& [h, c] : config.entries()) out.restart.emplace_back(h, static_cast<double>(c) / n);
    return out;
}

CsdEvaluator::CsdEvaluator(CsdKind kind, MutationModel model, std::shared_ptr<const RateTable> rates, CsdOptions options)
    : kind_(kind), model_(std::move(model)), rates_(std::move(rates)), options_(options) {
    if (kind_ == CsdKind::XiK) throw ConfigError("CsdEvaluator: Xi kind needs Xi rates");
    if (kind_ != CsdKind::SD && !rates_) throw ConfigError("CsdEvaluator: rate table required");
    if (!(model_.theta() > 0.0)) throw DomainError("CSD: total mutation rate theta must be positive");
    if (options_.quad_order < 1) throw DomainError("CSD: quadrature order must be >= 1");
    class_rep_.assign(model_.num_locus_classes(), -1);
    for (std::size_t l = 0; l < model_.num_loci(); ++l)
        if (class_rep_[model_.locus_class()[l]] < 0) class_rep_[model_.locus_class()[l]] = static_cast<int>(l);
}

CsdEvaluator::CsdEvaluator(MutationModel model, std::shared_ptr<const XiRates> xi, CsdOptions options)
    : kind_(CsdKind::XiK), model_(std::move(model)), xi_(std::move(xi)), options_(options) {
    if (!xi_) throw ConfigError("CsdEvaluator: Xi rates required");
    if (!(model_.theta() > 0.0)) throw DomainError("CSD: total mutation rate theta must be positive");
    if (options_.quad_order < 1) throw DomainError("CSD: quadrature order must be >= 1");
    class_rep_.assign(model_.num_locus_classes(), -1);
    for (std::size_t l = 0; l < model_.num_loci(); ++l)
        if (class_rep_[model_.locus_class()[l]] < 0) class_rep_[model_.locus_class()[l]] = static_cast<int>(l);
}

Absorption CsdEvaluator::absorption(const SampleConfig& config) const {
    return absorption_rate(kind_, rates_.get(), xi_.get(), config);
}

double CsdEvaluator::beta(const SampleConfig& config) const {
    const double a = absorption(config).rate;
    if (!(a > 0.0)) throw NumericalError("CSD: absorption rate is zero");
    return model_.theta() / (model_.theta() + a);
}

const CsdEvaluator::NodeKernels& CsdEvaluator::node_kernels(double beta) const {
    const auto key = std::bit_cast<std::uint64_t>(beta);
    {
        std::shared_lock lock(mu_);
        if (auto it = kernels_.find(key); it != kernels_.end()) return *it->second;
    }
    const auto& rule = gauss_laguerre(options_.quad_order);
    auto nk = std::make_unique<NodeKernels>();
    // (1-beta)(I - beta P)^{-1} = int_0^inf e^{-t} exp(t c (P - I)) dt with c = beta / (1 - beta)
    const double c = beta / (1.0 - beta);
    for (double t : rule.nodes) {
        std::vector<Eigen::MatrixXd> per_class;
        for (int rep : class_rep_) {
            const auto& loc = model_.locus(rep);
            const double w = loc.theta / model_.theta();
            Eigen::MatrixXd q = loc.matrix - Eigen::MatrixXd::Identity(loc.alleles, loc.alleles);
            per_class.push_back(generator_exp(q * w, t * c));
        }
        nk->mats.push_back(std::move(per_class));
    }
    std::unique_lock lock(mu_);
    if (kernels_.size() > 20000) kernels_.clear();
    auto [it, inserted] = kernels_.emplace(key, std::move(nk));
    return *it->second;
}

const Eigen::VectorXd& CsdEvaluator::exact_row(double beta, HapId g) const {
    const auto key = std::make_pair(std::bit_cast<std::uint64_t>(beta), g);
    {
        std::shared_lock lock(mu_);
        if (auto it = rows_.find(key); it != rows_.end()) return *it->second;
    }
    const HapId size = model_.haplotype_count();
    if (size > options_.exact_cap) {
        std::ostringstream os;
        os << "CSD exact backend: |H| = " << size << " exceeds the cap " << options_.exact_cap;
        throw SizeError(os.str());
    }
    // Solve (I - beta P)^T y = (1 - beta) e_g; y is row g of the resolvent.
    std::vector<Eigen::Triplet<double>> trips;
    const double theta = model_.theta();
    for (HapId h = 0; h < size; ++h) {
        double diag = 1.0;
        for (std::size_t l = 0; l < model_.num_loci(); ++l) {
            const double w = model_.theta(l) / theta;
            const int from = model_.allele(h, l);
            for (int a = 0; a < model_.alleles(l); ++a) {
                const double p = w * model_.transition(l, from, a);
                if (p == 0.0) continue;
                const HapId to = model_.substitute(h, l, a);
                if (to == h) {
                    diag -= beta * p;
                } else {
                    trips.emplace_back(static_cast<int>(to), static_cast<int>(h), -beta * p);
                }
            }
        }
        trips.emplace_back(static_cast<int>(h), static_cast<int>(h), diag);
    }
    Eigen::SparseMatrix<double> a(static_cast<int>(size), static_cast<int>(size));
    a.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) throw NumericalError("CSD exact backend: factorization failed");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<int>(size));
    rhs(static_cast<int>(g)) = 1.0 - beta;
    auto row = std::make_unique<Eigen::VectorXd>(lu.solve(rhs));
    if (lu.info() != Eigen::Success) throw NumericalError("CSD exact backend: solve failed");

    std::unique_lock lock(mu_);
    if (rows_.size() > 200000) rows_.clear();
    auto [it, inserted] = rows_.emplace(key, std::move(row));
    return *it->second;
}

double CsdEvaluator::kernel(double beta, HapId g, HapId x) const {
    if (options_.backend == CsdBackend::Exact) return exact_row(beta, g)(static_cast<int>(x));
    const auto& nk = node_kernels(beta);
    const auto& rule = gauss_laguerre(options_.quad_order);
    const auto& cls = model_.locus_class();
    const std::size_t nl = model_.num_loci();
    double total = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        double prod = rule.weights[j];
        for (std::size_t l = 0; l < nl && prod != 0.0; ++l)
            prod *= nk.mats[j][cls[l]](model_.allele(g, l), model_.allele(x, l));
        total += prod;
    }
    return total;
}

double CsdEvaluator::prob(HapId x, const SampleConfig& config) const {
    const Absorption abs = absorption(config);
    if (!(abs.rate > 0.0)) throw NumericalError("CSD: absorption rate is zero");
    const double b = model_.theta() / (model_.theta() + abs.rate);
    double p = 0.0;
    for (const auto& [g, w] : abs.restart) p += w * kernel(b, g, x);
    return p;
}

Eigen::VectorXd CsdEvaluator::distribution(const SampleConfig& config) const {
    const HapId size = model_.haplotype_count();
    if (size > (HapId{1} << 20)) throw SizeError("CSD distribution: haplotype space too large to tabulate");
    const Absorption abs = absorption(config);
    if (!(abs.rate > 0.0)) throw NumericalError("CSD: absorption rate is zero");
    const double b = model_.theta() / (model_.theta() + abs.rate);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<int>(size));
    for (const auto& [g, w] : abs.restart) {
        if (options_.backend == CsdBackend::Exact) {
            out += w * exact_row(b, g);
        } else {
            for (HapId x = 0; x < size; ++x) out(static_cast<int>(x)) += w * kernel(b, g, x);
        }
    }
    return out;
}

double CsdEvaluator::log_chain(HapId h, int k, const SampleConfig& config) const {
    if (k < 2) throw DomainError("CSD chain: merger size must be >= 2");
    double acc = 0.0;
    SampleConfig grown = config;
    for (int j = 0; j <= k - 2; ++j) {
        acc += std::log(prob(h, grown));
        grown.add(h, 1);
    }
    return acc;
}

double CsdEvaluator::chain(HapId h, int k, const SampleConfig& config) const {
    return std::exp(log_chain(h, k, config));
}

double CsdEvaluator::log_sequence(const std::vector<HapId>& seq, const SampleConfig& config) const {
    double acc = 0.0;
    SampleConfig grown = config;
    for (HapId h : seq) {
        acc += std::log(prob(h, grown));
        grown.add(h, 1);
    }
    return acc;
}

Eigen::MatrixXd mixture_matrix(const MutationModel& model) {
    const HapId size = model.haplotype_count();
    if (size > 4096) throw SizeError("mixture_matrix: |H| exceeds 4096");
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(static_cast<int>(size), static_cast<int>(size));
    for (HapId h = 0; h < size; ++h)
        for (std::size_t l = 0; l < model.num_loci(); ++l) {
            const double w = model.theta(l) / model.theta();
            for (int a = 0; a < model.alleles(l); ++a)
                p(static_cast<int>(h), static_cast<int>(model.substitute(h, l, a))) +=
                    w * model.transition(l, model.allele(h, l), a);
        }
    return p;
}

double stationarity_residual(const CsdEvaluator& csd, const SampleConfig& config) {
    const auto& model = csd.model();
    const Eigen::VectorXd pi = csd.distribution(config);
    const double b = csd.beta(config);
    Eigen::VectorXd nu = Eigen::VectorXd::Zero(pi.size());
    for (const auto& [h, w] : csd.absorption(config).restart) nu(static_cast<int>(h)) = w;
    const Eigen::MatrixXd t = b * mixture_matrix(model) + (1.0 - b) * Eigen::VectorXd::Ones(pi.size()) * nu.transpose();
    return (pi.transpose() * t - pi.transpose()).cwiseAbs().maxCoeff();
}

double first_event_residual(const CsdEvaluator& csd, const SampleConfig& config) {
    const auto& model = csd.model();
    const Eigen::VectorXd pi = csd.distribution(config);
    const Absorption abs = csd.absorption(config);
    Eigen::VectorXd nu = Eigen::VectorXd::Zero(pi.size());
    for (const auto& [h, w] : abs.restart) nu(static_cast<int>(h)) = w;
    double worst = 0.0;
    for (HapId h = 0; h < model.haplotype_count(); ++h) {
        double rhs = abs.rate * nu(static_cast<int>(h));
        for (std::size_t l = 0; l < model.num_loci(); ++l)
            for (int a = 0; a < model.alleles(l); ++a)
                rhs += model.theta(l) * model.transition(l, a, model.allele(h, l)) *
                       pi(static_cast<int>(model.substitute(h, l, a)));
        const double lhs = (model.theta() + abs.rate) * pi(static_cast<int>(h));
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

double univariate_recursion_residual(const CsdEvaluator& csd, const RateTable& rates, const SampleConfig& config) {
    const auto& model = csd.model();
    const int n = config.total();
    require_rates(&rates, n + 1);
    const double k0 = rates.kingman_mass();
    const double lhs_rate = k0 * n / 2.0 + model.theta() + rates.jump_total(n + 1) / (n + 1);
    const Eigen::VectorXd pi = csd.distribution(config);
    double worst = 0.0;
    for (HapId h = 0; h < model.haplotype_count(); ++h) {
        const int nh = config.count(h);
        double rhs = nh / 2.0 * (k0 + rates.jump(n + 1, 2));
        for (std::size_t l = 0; l < model.num_loci(); ++l)
            for (int a = 0; a < model.alleles(l); ++a)
                rhs += model.theta(l) * model.transition(l, a, model.allele(h, l)) *
                       pi(static_cast<int>(model.substitute(h, l, a)));
        double multi = 0.0;
        for (int k = 3; k <= nh + 1; ++k) {
            const SampleConfig base = config.with(h, -(k - 2));
            multi += binomial(nh + 1, k) * rates.jump(n + 1, k) / csd.chain(h, k - 1, base);
        }
        rhs += multi / (nh + 1);
        worst = std::max(worst, std::abs(lhs_rate * pi(static_cast<int>(h)) - rhs));
    }
    return worst;
}

}  // namespace mmcoal
