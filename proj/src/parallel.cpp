#include "ymflow/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace ymflow {

namespace {
std::atomic<int> g_threads{1};

void run_blocks(std::size_t nblocks, const std::function<void(std::size_t)>& body) {
  const int nt = std::min<int>(g_threads.load(), static_cast<int>(nblocks));
  if (nt <= 1) {
    for (std::size_t b = 0; b < nblocks; ++b) body(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t b = next.fetch_add(1); b < nblocks; b = next.fetch_add(1)) body(b);
  };
  std::vector<std::jthread> pool;
  pool.reserve(nt - 1);
  for (int i = 1; i < nt; ++i) pool.emplace_back(worker);
  worker();
}
}  // namespace

void set_threads(int n) { g_threads.store(std::max(1, n)); }
int threads() { return g_threads.load(); }

int threads_from_env() {
  if (const char* s = std::getenv("YMFLOW_THREADS")) {
    try {
      return std::max(1, std::stoi(s));
    } catch (...) {
    }
  }
  return 1;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
  const std::size_t nblocks = (n + kBlockSize - 1) / kBlockSize;
  run_blocks(nblocks, [&](std::size_t b) {
    const std::size_t begin = b * kBlockSize;
    fn(begin, std::min(n, begin + kBlockSize));
  });
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

double parallel_sum(std::size_t n, const std::function<double(std::size_t)>& f) {
  const std::size_t nblocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<double> partial(nblocks, 0.0);
  run_blocks(nblocks, [&](std::size_t b) {
    const std::size_t begin = b * kBlockSize;
    const std::size_t end = std::min(n, begin + kBlockSize);
    std::vector<double> local(end - begin);
    for (std::size_t i = begin; i < end; ++i) local[i - begin] = f(i);
    partial[b] = pairwise_sum(local);
  });
  return pairwise_sum(partial);
}

double parallel_max(std::size_t n, const std::function<double(std::size_t)>& f) {
  const std::size_t nblocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<double> partial(nblocks, 0.0);
  run_blocks(nblocks, [&](std::size_t b) {
    const std::size_t begin = b * kBlockSize;
    const std::size_t end = std::min(n, begin + kBlockSize);
    double m = 0.0;
    for (std::size_t i = begin; i < end; ++i) m = std::max(m, f(i));
    partial[b] = m;
  });
  double m = 0.0;
  for (double x : partial) m = std::max(m, x);
  return m;
}

}  // namespace ymflow
