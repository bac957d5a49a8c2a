#include "mmcoal/rates.hpp"

#include <cfloat>
#include <cmath>
#include <limits>
#include <sstream>

#include "mmcoal/combinatorics.hpp"
#include "mmcoal/errors.hpp"

namespace mmcoal {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kMassTol = 1e-12;

double log_beta_fn(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

// log of w * psi^{k-2} (1-psi)^{n-k}
double log_atom_term(const PointAtom& atom, int n, int k) {
    if (atom.mass <= 0.0) return kNegInf;
    double lr = std::log(atom.mass);
    if (k > 2) lr += (k - 2) * std::log(atom.location);
    if (n > k) {
        if (atom.location >= 1.0) return kNegInf;
        lr += (n - k) * std::log1p(-atom.location);
    }
    return lr;
}

double log_beta_term(const BetaComponent& b, int n, int k) {
    if (b.mass <= 0.0) return kNegInf;
    return std::log(b.mass) + log_beta_fn(k - b.alpha, n - k + b.alpha) - log_beta_fn(2.0 - b.alpha, b.alpha);
}

}  // namespace

LambdaMeasure::LambdaMeasure(double kingman_mass, std::vector<PointAtom> atoms,
                             std::optional<BetaComponent> beta)
    : kingman_mass_(kingman_mass), atoms_(std::move(atoms)), beta_(beta) {
    double total = kingman_mass_;
    if (kingman_mass_ < 0.0) throw ConfigError("Lambda measure: negative Kingman mass");
    for (const auto& a : atoms_) {
        if (a.mass < 0.0) throw ConfigError("Lambda measure: negative atom mass");
        if (!(a.location > 0.0 && a.location <= 1.0))
            throw ConfigError("Lambda measure: atom location must lie in (0, 1]");
        total += a.mass;
    }
    if (beta_) {
        if (beta_->mass < 0.0) throw ConfigError("Lambda measure: negative Beta mass");
        if (!(beta_->alpha > 1.0 && beta_->alpha < 2.0))
            throw ConfigError("Lambda measure: Beta alpha must lie strictly inside (1, 2)");
        total += beta_->mass;
    }
    if (std::abs(total - 1.0) > kMassTol) {
        std::ostringstream os;
        os << "Lambda measure: total mass " << total << " is not 1";
        throw ConfigError(os.str());
    }
}

LambdaMeasure LambdaMeasure::kingman() { return LambdaMeasure(1.0, {}); }

LambdaMeasure LambdaMeasure::star() { return LambdaMeasure(0.0, {{1.0, 1.0}}); }

LambdaMeasure LambdaMeasure::eldon_wakeley(double psi) {
    if (!(psi > 0.0 && psi <= 1.0)) throw ConfigError("Eldon-Wakeley: psi must lie in (0, 1]");
    const double d = 2.0 + psi * psi;
    return LambdaMeasure(2.0 / d, {{psi, psi * psi / d}});
}

LambdaMeasure LambdaMeasure::beta(double alpha) { return LambdaMeasure(0.0, {}, BetaComponent{alpha, 1.0}); }

std::string LambdaMeasure::describe() const {
    std::ostringstream os;
    os << "kingman=" << kingman_mass_;
    for (const auto& a : atoms_) os << " atom(" << a.location << ")=" << a.mass;
    if (beta_) os << " beta(" << beta_->alpha << ")=" << beta_->mass;
    return os.str();
}

double lambda_rate(const LambdaMeasure& measure, int n, int k, bool include_kingman_atom) {
    if (k < 2 || k > n) throw DomainError("lambda_rate: require 2 <= k <= n");
    double r = 0.0;
    if (include_kingman_atom && k == 2) r += measure.kingman_mass();
    for (const auto& a : measure.atoms()) {
        if (a.mass > 0.0) r += a.mass * std::pow(a.location, k - 2) * std::pow(1.0 - a.location, n - k);
    }
    if (const auto& b = measure.beta_component()) r += std::exp(log_beta_term(*b, n, k));
    return r;
}

double total_coal_rate(const LambdaMeasure& measure, int n) {
    if (n < 2) throw DomainError("total_coal_rate: require n >= 2");
    double total = measure.kingman_mass() * binomial(n, 2);
    for (int k = 2; k <= n; ++k) {
        const double jump = lambda_rate(measure, n, k, false);
        if (jump > 0.0) total += std::exp(log_binomial(n, k) + std::log(jump));
    }
    return total;
}

RateTable::RateTable(const LambdaMeasure& measure, int n_max)
    : measure_(measure), n_max_(n_max), kingman_mass_(measure.kingman_mass()) {
    if (n_max < 2) throw DomainError("RateTable: n_max must be at least 2");
    const std::size_t sz = static_cast<std::size_t>(n_max + 1) * static_cast<std::size_t>(n_max + 1);
    jump_.assign(sz, 0.0);
    log_jump_.assign(sz, kNegInf);
    totals_.assign(n_max + 1, 0.0);
    jump_totals_.assign(n_max + 1, 0.0);

    // Beta part by exact ratio recurrences on B(k - alpha, n - k + alpha); relative error
    // grows like (n + k) ulp, far better than differencing large log-gamma values.
    std::vector<double> beta_lin(sz, 0.0);
    const auto& b = measure.beta_component();
    const bool beta_recurrence = b && b->mass > 0.0 && n_max <= 1000;
    if (beta_recurrence) {
        const double a = b->alpha;
        double col2 = b->mass;  // lambda_{2,2}
        for (int n = 2; n <= n_max; ++n) {
            if (n > 2) col2 *= (n - 3 + a) / (n - 1);
            double v = col2;
            beta_lin[idx(n, 2)] = v;
            for (int k = 2; k < n; ++k) {
                v *= (k - a) / (n - k - 1 + a);
                beta_lin[idx(n, k + 1)] = v;
            }
        }
    }

    for (int n = 2; n <= n_max; ++n) {
        for (int k = 2; k <= n; ++k) {
            double lin = 0.0;
            for (const auto& at : measure.atoms()) {
                if (at.mass > 0.0) lin += at.mass * std::pow(at.location, k - 2) * std::pow(1.0 - at.location, n - k);
            }
            if (beta_recurrence) {
                lin += beta_lin[idx(n, k)];
            } else if (b && b->mass > 0.0) {
                lin += std::exp(log_beta_term(*b, n, k));
            }
            jump_[idx(n, k)] = lin;

            if (lin >= DBL_MIN) {
                log_jump_[idx(n, k)] = std::log(lin);
            } else {
                // Underflowed in linear space; recombine components in log space.
                std::vector<double> parts;
                for (const auto& at : measure.atoms()) parts.push_back(log_atom_term(at, n, k));
                if (b) parts.push_back(log_beta_term(*b, n, k));
                log_jump_[idx(n, k)] = log_sum_exp(parts);
            }
        }
        double jt = 0.0;
        for (int k = 2; k <= n; ++k) {
            const double lj = log_jump_[idx(n, k)];
            if (lj > kNegInf) jt += std::exp(log_binomial(n, k) + lj);
        }
        jump_totals_[n] = jt;
        totals_[n] = kingman_mass_ * binomial(n, 2) + jt;
    }
}

std::size_t RateTable::idx(int n, int k) const {
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(n_max_ + 1) + static_cast<std::size_t>(k);
}

void RateTable::check(int n, int k) const {
    if (k < 2 || k > n || n > n_max_) throw DomainError("RateTable: require 2 <= k <= n <= n_max");
}

double RateTable::jump(int n, int k) const {
    check(n, k);
    return jump_[idx(n, k)];
}

double RateTable::lambda(int n, int k) const {
    check(n, k);
    return jump_[idx(n, k)] + (k == 2 ? kingman_mass_ : 0.0);
}

double RateTable::log_jump(int n, int k) const {
    check(n, k);
    return log_jump_[idx(n, k)];
}

double RateTable::log_lambda(int n, int k) const {
    check(n, k);
    if (k == 2 && kingman_mass_ > 0.0) {
        const double lj = log_jump_[idx(n, k)];
        const double lk = std::log(kingman_mass_);
        if (lj == kNegInf) return lk;
        const double mx = std::max(lj, lk);
        return mx + std::log(std::exp(lj - mx) + std::exp(lk - mx));
    }
    return log_jump_[idx(n, k)];
}

double RateTable::log_coal_weight(int n, int k) const { return log_binomial(n, k) + log_lambda(n, k); }

double RateTable::total(int n) const {
    if (n < 0 || n > n_max_) throw DomainError("RateTable::total: n out of range");
    return totals_[n];
}

double RateTable::jump_total(int n) const {
    if (n < 0 || n > n_max_) throw DomainError("RateTable::jump_total: n out of range");
    return jump_totals_[n];
}

RateTable build_rate_table(const LambdaMeasure& measure, int n_max) { return RateTable(measure, n_max); }

}  // namespace mmcoal
