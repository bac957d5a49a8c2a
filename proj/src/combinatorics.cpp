#include "mmcoal/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "mmcoal/errors.hpp"

namespace mmcoal {

namespace {

constexpr int kLogFactTable = 4096;

const std::vector<double>& log_factorial_table() {
    static const std::vector<double> table = [] {
        std::vector<double> t(kLogFactTable);
        t[0] = 0.0;
        // lgamma is accurate to a few ulp; summing logs would accumulate error.
        for (int i = 1; i < kLogFactTable; ++i) t[i] = std::lgamma(static_cast<double>(i) + 1.0);
        return t;
    }();
    return table;
}

void partitions_rec(int remaining, int max_part, std::vector<int>& cur,
                    std::vector<std::vector<int>>& out) {
    if (remaining == 0) {
        out.push_back(cur);
        return;
    }
    for (int p = std::min(remaining, max_part); p >= 1; --p) {
        cur.push_back(p);
        partitions_rec(remaining - p, p, cur, out);
        cur.pop_back();
    }
}

}  // namespace

double log_factorial(int n) {
    if (n < 0) throw DomainError("log_factorial: negative argument");
    if (n < kLogFactTable) return log_factorial_table()[n];
    return std::lgamma(static_cast<double>(n) + 1.0);
}

double log_binomial(int n, int k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    // Each partial product is C(n - k + i, i), an integer, so this is exact below 2^53.
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

std::uint64_t factorial(int n) {
    if (n < 0 || n > 20) throw DomainError("factorial: argument outside [0, 20]");
    std::uint64_t r = 1;
    for (int i = 2; i <= n; ++i) r *= static_cast<std::uint64_t>(i);
    return r;
}

const std::vector<std::vector<int>>& integer_partitions(int n) {
    static std::map<int, std::vector<std::vector<int>>> cache;
    static std::mutex mu;
    if (n < 0) throw DomainError("integer_partitions: negative argument");
    std::lock_guard lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    partitions_rec(n, n, cur, out);
    return cache.emplace(n, std::move(out)).first->second;
}

std::uint64_t set_partition_count(std::span<const int> parts) {
    int n = 0;
    for (int p : parts) n += p;
    if (n > 20) throw DomainError("set_partition_count: more than 20 elements");
    std::uint64_t denom = 1;
    std::map<int, int> mult;
    for (int p : parts) {
        denom *= factorial(p);
        ++mult[p];
    }
    for (auto [size, m] : mult) denom *= factorial(m);
    return factorial(n) / denom;
}

double log_sum_exp(std::span<const double> values) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : values) mx = std::max(mx, v);
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (double v : values) s += std::exp(v - mx);
    return mx + std::log(s);
}

}  // namespace mmcoal
