#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mmcoal {

/// log(n!) from a table built once for n < 4096, lgamma beyond.
double log_factorial(int n);

/// log C(n, k); -inf when k is out of range.
double log_binomial(int n, int k);

/// Exact C(n, k) in double precision (Pascal recurrence, exact while below 2^53).
double binomial(int n, int k);

/// n! as an integer; n <= 20.
std::uint64_t factorial(int n);

/// All integer partitions of n as non-increasing part lists. Cached per n.
const std::vector<std::vector<int>>& integer_partitions(int n);

/// Number of set partitions of a set of size sum(parts) whose block sizes are `parts`:
/// n! / (prod b_i! * prod_size mult_size!).
std::uint64_t set_partition_count(std::span<const int> parts);

/// log-sum-exp of a range; returns -inf for an empty range or all -inf inputs.
double log_sum_exp(std::span<const double> values);

}  // namespace mmcoal
