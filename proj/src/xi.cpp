#include "mmcoal/xi.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "mmcoal/combinatorics.hpp"
#include "mmcoal/errors.hpp"

namespace mmcoal {

namespace {

constexpr double kMassTol = 1e-12;

// e_j(values) for j = 0..values.size()
std::vector<double> elementary_symmetric(const std::vector<double>& values) {
    std::vector<double> e(values.size() + 1, 0.0);
    e[0] = 1.0;
    for (double v : values) {
        for (std::size_t j = e.size() - 1; j >= 1; --j) e[j] += v * e[j - 1];
    }
    return e;
}

// Sum over injective block -> coordinate assignments of prod r_i^{k_j} times the singleton
// factor for the unused coordinates.
double atom_integrand(const std::vector<double>& r, std::span<const int> sizes, int s) {
    const int m = static_cast<int>(r.size());
    const int p = static_cast<int>(sizes.size());
    if (p > m) return 0.0;
    double dust = 1.0;
    for (double x : r) dust -= x;
    if (dust < 0.0) dust = 0.0;

    double total = 0.0;
    std::vector<char> used(m, 0);
    std::function<void(int, double)> rec = [&](int j, double prod) {
        if (j == p) {
            std::vector<double> rest;
            for (int i = 0; i < m; ++i)
                if (!used[i]) rest.push_back(r[i]);
            const auto e = elementary_symmetric(rest);
            double singles = 0.0;
            const int lmax = std::min<int>(s, static_cast<int>(rest.size()));
            for (int l = 0; l <= lmax; ++l) {
                // ordered distinct l-tuples of remaining coordinates: l! e_l
                const double dust_pow = (s - l == 0) ? 1.0 : std::pow(dust, s - l);
                singles += binomial(s, l) * std::exp(log_factorial(l)) * e[l] * dust_pow;
            }
            total += prod * singles;
            return;
        }
        for (int i = 0; i < m; ++i) {
            if (used[i]) continue;
            used[i] = 1;
            rec(j + 1, prod * std::pow(r[i], sizes[j]));
            used[i] = 0;
        }
    };
    rec(0, 1.0);
    double r2 = 0.0;
    for (double x : r) r2 += x * x;
    return total / r2;
}

}  // namespace

XiMeasure::XiMeasure(double kingman_mass, std::vector<XiAtom> atoms, std::optional<BetaComponent> beta)
    : kingman_mass_(kingman_mass), atoms_(std::move(atoms)), beta_(beta) {
    double total = kingman_mass_;
    if (kingman_mass_ < 0.0) throw ConfigError("Xi measure: negative Kingman mass");
    for (auto& a : atoms_) {
        if (a.mass < 0.0) throw ConfigError("Xi measure: negative atom mass");
        std::erase_if(a.coords, [](double x) { return x == 0.0; });
        if (a.coords.empty()) throw ConfigError("Xi measure: atom with no positive coordinate (use kingman_mass)");
        double sum = 0.0;
        for (double x : a.coords) {
            if (x < 0.0 || x > 1.0) throw ConfigError("Xi measure: coordinate outside [0, 1]");
            sum += x;
        }
        if (sum > 1.0 + 1e-12) throw ConfigError("Xi measure: atom coordinates sum above 1");
        std::sort(a.coords.begin(), a.coords.end(), std::greater<>());
        total += a.mass;
        if (a.mass > 0.0) max_classes_ = std::max<int>(max_classes_, static_cast<int>(a.coords.size()));
    }
    if (beta_) {
        if (beta_->mass < 0.0) throw ConfigError("Xi measure: negative Beta mass");
        if (!(beta_->alpha > 1.0 && beta_->alpha < 2.0)) throw ConfigError("Xi measure: Beta alpha outside (1, 2)");
        total += beta_->mass;
    }
    if (std::abs(total - 1.0) > kMassTol) {
        std::ostringstream os;
        os << "Xi measure: total mass " << total << " is not 1";
        throw ConfigError(os.str());
    }
}

XiMeasure XiMeasure::from_lambda(const LambdaMeasure& lambda) {
    std::vector<XiAtom> atoms;
    for (const auto& a : lambda.atoms()) atoms.push_back({{a.location}, a.mass});
    return XiMeasure(lambda.kingman_mass(), std::move(atoms), lambda.beta_component());
}

std::string XiMeasure::describe() const {
    std::ostringstream os;
    os << "kingman=" << kingman_mass_;
    for (const auto& a : atoms_) {
        os << " atom(";
        for (std::size_t i = 0; i < a.coords.size(); ++i) os << (i ? "," : "") << a.coords[i];
        os << ")=" << a.mass;
    }
    if (beta_) os << " beta(" << beta_->alpha << ")=" << beta_->mass;
    return os.str();
}

double xi_rate(const XiMeasure& xi, int n, std::span<const int> sizes, int singletons) {
    if (sizes.empty()) throw DomainError("xi_rate: at least one merger class required");
    int sum = 0;
    for (int k : sizes) {
        if (k < 2) throw DomainError("xi_rate: merger class sizes must be >= 2");
        sum += k;
    }
    if (singletons < 0 || sum + singletons != n) throw DomainError("xi_rate: sizes and singletons do not add to n");

    double rate = 0.0;
    if (sizes.size() == 1 && sizes[0] == 2) rate += xi.kingman_mass();
    if (const auto& b = xi.beta_component(); b && sizes.size() == 1 && b->mass > 0.0) {
        const int k = sizes[0];
        const double a = b->alpha;
        rate += b->mass * std::exp(std::lgamma(k - a) + std::lgamma(singletons + a) - std::lgamma(n) -
                                   (std::lgamma(2.0 - a) + std::lgamma(a)));
    }
    for (const auto& atom : xi.atoms()) {
        if (atom.mass > 0.0) rate += atom.mass * atom_integrand(atom.coords, sizes, singletons);
    }
    return rate;
}

double g_total(const XiMeasure& xi, int n) {
    if (n < 2) throw DomainError("g_total: require n >= 2");
    double g = 0.0;
    for (const auto& parts : integer_partitions(n)) {
        std::vector<int> sizes;
        int s = 0;
        for (int b : parts) {
            if (b >= 2) {
                sizes.push_back(b);
            } else {
                ++s;
            }
        }
        if (sizes.empty() || static_cast<int>(sizes.size()) > xi.max_classes()) continue;
        const double r = xi_rate(xi, n, sizes, s);
        if (r <= 0.0) continue;
        // n! / (prod b! prod mult!) set partitions share this block-size multiset
        double log_count = log_factorial(n);
        std::map<int, int> mult;
        for (int b : parts) {
            log_count -= log_factorial(b);
            ++mult[b];
        }
        for (auto [size, m] : mult) log_count -= log_factorial(m);
        g += std::exp(log_count) * r;
    }
    return g;
}

XiRates::XiRates(XiMeasure xi) : xi_(std::move(xi)) {}

double XiRates::rate(int n, const std::vector<int>& sizes, int singletons) const {
    std::vector<int> key_sizes = sizes;
    key_sizes.push_back(-singletons);
    auto key = std::make_pair(n, std::move(key_sizes));
    {
        std::lock_guard lock(mu_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    const double r = xi_rate(xi_, n, sizes, singletons);
    std::lock_guard lock(mu_);
    cache_.emplace(std::move(key), r);
    return r;
}

double XiRates::g(int n) const {
    if (n < 2) return 0.0;
    {
        std::lock_guard lock(mu_);
        if (auto it = g_cache_.find(n); it != g_cache_.end()) return it->second;
    }
    const double v = g_total(xi_, n);
    std::lock_guard lock(mu_);
    g_cache_.emplace(n, v);
    return v;
}

std::vector<MergerPattern> enumerate_merger_patterns(const SampleConfig& config, int max_classes) {
    std::vector<MergerPattern> out;
    const auto& entries = config.entries();
    const std::size_t d = entries.size();
    std::vector<const std::vector<std::vector<int>>*> options(d);
    for (std::size_t i = 0; i < d; ++i) options[i] = &integer_partitions(entries[i].second);

    std::vector<std::size_t> choice(d, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == d) {
            MergerPattern pat;
            std::uint64_t mult = 1;
            std::vector<SampleConfig::Entry> pred;
            for (std::size_t t = 0; t < d; ++t) {
                const auto& parts = (*options[t])[choice[t]];
                for (int b : parts) {
                    if (b >= 2) {
                        pat.sizes.push_back(b);
                    } else {
                        ++pat.singletons;
                    }
                }
                mult *= set_partition_count(parts);
                pred.emplace_back(entries[t].first, static_cast<int>(parts.size()));
            }
            if (pat.sizes.empty() || static_cast<int>(pat.sizes.size()) > max_classes) return;
            std::sort(pat.sizes.begin(), pat.sizes.end(), std::greater<>());
            pat.predecessor = SampleConfig(pred);
            pat.multiplicity = mult;
            out.push_back(std::move(pat));
            return;
        }
        for (std::size_t c = 0; c < options[i]->size(); ++c) {
            choice[i] = c;
            rec(i + 1);
        }
    };
    rec(0);
    return out;
}

std::vector<MergerMove> enumerate_merger_moves(const SampleConfig& config, const XiRates& rates) {
    const int n = config.total();
    std::map<SampleConfig, double> agg;
    for (const auto& pat : enumerate_merger_patterns(config, rates.measure().max_classes())) {
        const double r = rates.rate(n, pat.sizes, pat.singletons);
        if (r <= 0.0) continue;
        agg[pat.predecessor] += static_cast<double>(pat.multiplicity) * r;
    }
    double log_multinom_n = log_factorial(n);
    for (const auto& [h, c] : config.entries()) log_multinom_n -= log_factorial(c);

    std::vector<MergerMove> out;
    out.reserve(agg.size());
    for (auto& [pred, rsum] : agg) {
        double log_inv_multinom_k = -log_factorial(pred.total());
        for (const auto& [h, c] : pred.entries()) log_inv_multinom_k += log_factorial(c);
        out.push_back({pred, rsum, log_multinom_n + log_inv_multinom_k + std::log(rsum)});
    }
    return out;
}

}  // namespace mmcoal
