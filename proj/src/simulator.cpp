#include "mmcoal/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mmcoal/combinatorics.hpp"
#include "mmcoal/errors.hpp"

namespace mmcoal {

std::vector<double> Genealogy::node_times() const {
    std::vector<double> t(static_cast<std::size_t>(leaves) + events.size(), 0.0);
    double now = 0.0;
    for (const auto& ev : events) {
        now += ev.holding_time;
        t[ev.parent] = now;
    }
    return t;
}

Genealogy simulate_genealogy(const RateTable& rates, int n, Rng& rng) {
    if (n < 1) throw DomainError("simulate_genealogy: n must be >= 1");
    if (n > rates.n_max()) throw SizeError("simulate_genealogy: n exceeds the rate table");
    Genealogy g;
    g.leaves = n;
    std::vector<int> active(n);
    std::iota(active.begin(), active.end(), 0);
    int next_id = n;
    std::vector<double> weights;
    while (active.size() > 1) {
        const int b = static_cast<int>(active.size());
        const double total = rates.total(b);
        if (!(total > 0.0)) throw NumericalError("simulate_genealogy: zero coalescence rate");
        MergerEvent ev;
        ev.holding_time = -std::log1p(-uniform01(rng)) / total;
        weights.clear();
        for (int k = 2; k <= b; ++k) weights.push_back(std::exp(rates.log_coal_weight(b, k)));
        double u = uniform01(rng) * std::accumulate(weights.begin(), weights.end(), 0.0);
        int k = 2;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (u < weights[i] || i + 1 == weights.size()) {
                k = static_cast<int>(i) + 2;
                break;
            }
            u -= weights[i];
        }
        // partial Fisher-Yates picks k distinct lineages
        for (int i = 0; i < k; ++i) {
            const auto j = i + static_cast<int>(uniform01(rng) * (b - i));
            std::swap(active[i], active[std::min(j, b - 1)]);
        }
        ev.lineages.assign(active.begin(), active.begin() + k);
        std::sort(ev.lineages.begin(), ev.lineages.end());
        ev.parent = next_id++;
        active.erase(active.begin(), active.begin() + k);
        active.push_back(ev.parent);
        g.events.push_back(std::move(ev));
    }
    return g;
}

Genealogy simulate_genealogy(const LambdaMeasure& measure, int n, std::uint64_t seed) {
    const RateTable rates(measure, std::max(n, 2));
    Rng rng(seed);
    return simulate_genealogy(rates, n, rng);
}

namespace {

HapId draw_root(const MutationModel& model, Rng& rng) {
    // theta = 0 leaves the stationary law undefined; the unscaled chains still define it when
    // they are irreducible, otherwise the all-zero type is used.
    const MutationModel base = model.theta() > 0.0 ? model : model.with_theta(1.0);
    try {
        const MrcaDistribution m = mrca_distribution(base);
        Haplotype h(model.num_loci());
        for (std::size_t l = 0; l < model.num_loci(); ++l) {
            double u = uniform01(rng);
            const auto& v = m.locus(l);
            int a = 0;
            for (; a + 1 < v.size(); ++a) {
                if (u < v(a)) break;
                u -= v(a);
            }
            h[l] = a;
        }
        return model.encode(h);
    } catch (const ConfigError&) {
        return 0;
    }
}

HapId mutate_along(const MutationModel& model, HapId h, double length, Rng& rng) {
    const double theta = model.theta();
    if (theta <= 0.0 || length <= 0.0) return h;
    double t = -std::log1p(-uniform01(rng)) / theta;
    while (t < length) {
        double u = uniform01(rng) * theta;
        std::size_t l = 0;
        for (; l + 1 < model.num_loci(); ++l) {
            if (u < model.theta(l)) break;
            u -= model.theta(l);
        }
        const int from = model.allele(h, l);
        double v = uniform01(rng);
        int a = 0;
        for (; a + 1 < model.alleles(l); ++a) {
            const double p = model.transition(l, from, a);
            if (v < p) break;
            v -= p;
        }
        h = model.substitute(h, l, a);
        t += -std::log1p(-uniform01(rng)) / theta;
    }
    return h;
}

}  // namespace

SampleConfig simulate_sample(const MutationModel& model, const RateTable& rates, int n, Rng& rng) {
    if (n < 1) throw DomainError("simulate_sample: n must be >= 1");
    const HapId root_type = draw_root(model, rng);
    if (n == 1) return SampleConfig{{root_type, 1}};
    const Genealogy g = simulate_genealogy(rates, n, rng);
    const auto times = g.node_times();
    std::vector<HapId> type(times.size(), 0);
    type[g.events.back().parent] = root_type;
    for (auto it = g.events.rbegin(); it != g.events.rend(); ++it)
        for (int child : it->lineages)
            type[child] = mutate_along(model, type[it->parent], times[it->parent] - times[child], rng);
    SampleConfig out;
    for (int i = 0; i < n; ++i) out.add(type[i], 1);
    return out;
}

SampleConfig simulate_sample(const MutationModel& model, const LambdaMeasure& measure, int n, std::uint64_t seed) {
    const RateTable rates(measure, std::max(n, 2));
    Rng rng(seed);
    return simulate_sample(model, rates, n, rng);
}

}  // namespace mmcoal
