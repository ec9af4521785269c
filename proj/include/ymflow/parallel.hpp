#pragma once
// Site-parallel loops and order-fixed reductions.
//
// Work is cut into fixed-size blocks independent of the thread count, and
// reductions combine block results pairwise in block order, so every sum is
// bit-identical for any number of threads.

#include <cstddef>
#include <functional>
#include <span>

namespace ymflow {

void set_threads(int n);
int threads();

/// Threads from YMFLOW_THREADS, or 1.
int threads_from_env();

inline constexpr std::size_t kBlockSize = 512;

/// Calls fn(begin, end) over [0, n) in blocks of kBlockSize.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

/// Pairwise sum in a fixed tree order.
double pairwise_sum(std::span<const double> v);

/// sum_i f(i) over [0, n), deterministic for any thread count.
double parallel_sum(std::size_t n, const std::function<double(std::size_t)>& f);

/// max_i f(i) over [0, n).
double parallel_max(std::size_t n, const std::function<double(std::size_t)>& f);

}  // namespace ymflow
