#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace kbound {

/// Number of worker threads used by parallel_for. Defaults to 1.
int worker_threads();
void set_worker_threads(int n);

/// Runs body(i) for i in [0, n). Each index is independent and writes to its
/// own output slot, so results do not depend on the thread count. Nested calls
/// from inside a worker run serially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Fixed-shape pairwise summation: the association order depends only on the
/// length of the input.
double pairwise_sum(std::span<const double> values);

}  // namespace kbound
