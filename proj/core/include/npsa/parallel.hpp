#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace npsa::parallel {

/// Sets the worker count used by data-parallel loops. 0 selects the
/// hardware concurrency. Results never depend on this value.
void set_threads(unsigned count);
unsigned threads();

/// Runs fn(i) for i in [0, count), splitting the range into contiguous
/// chunks across workers. The first exception thrown is rethrown.
void for_each_index(std::size_t count, const std::function<void(std::size_t)>& fn);

/// Pairwise (tree) summation; the association order depends only on the
/// length of the input.
double pairwise_sum(std::span<const double> values);

}  // namespace npsa::parallel
