// Compiled with -mavx2 (no FMA, so every lane rounds like the scalar path).
#include <immintrin.h>

#include "kernels_impl.hpp"
#include "ymflow/parallel.hpp"

namespace ymflow::kernels {

namespace {
using detail::ScalarLane;

struct Avx2Lane {
  using V = __m256d;
  static constexpr int width = 4;
  static V load(const double* p) { return _mm256_loadu_pd(p); }
  static V gather(const double* base, const std::int32_t* idx) {
    return _mm256_i32gather_pd(base, _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx)), 8);
  }
  static void store(double* p, V v) { _mm256_storeu_pd(p, v); }
  static V set1(double x) { return _mm256_set1_pd(x); }
  static V sqrt(V x) { return _mm256_sqrt_pd(x); }
};

// Vector body over the width-aligned prefix, scalar lane over the tail.
template <class Fn>
void split(std::size_t b, std::size_t e, Fn&& fn) {
  const std::size_t mid = b + (e - b) / Avx2Lane::width * Avx2Lane::width;
  fn(Avx2Lane{}, b, mid);
  if (mid < e) fn(ScalarLane{}, mid, e);
}

void density(const GaugeField& U, double* rho) {
  parallel_for(U.lattice().volume(), [&](std::size_t b, std::size_t e) {
    split(b, e, [&]<class L>(L, std::size_t lo, std::size_t hi) {
      detail::action_density_range<L>(U, rho, lo, hi);
    });
  });
}

void force(const GaugeField& U, const double* w, double* z) {
  parallel_for(U.lattice().volume(), [&](std::size_t b, std::size_t e) {
    split(b, e, [&]<class L>(L, std::size_t lo, std::size_t hi) {
      detail::force_range<L>(U, w, z, lo, hi);
    });
  });
}

void update(GaugeField& U, const double* z, double scale) {
  parallel_for(U.lattice().volume(), [&](std::size_t b, std::size_t e) {
    split(b, e, [&]<class L>(L, std::size_t lo, std::size_t hi) {
      detail::exp_update_range<L>(U, z, scale, lo, hi);
    });
  });
}
}  // namespace

const KernelSet* avx2_kernels_compiled() {
  static const KernelSet set{"avx2", &density, &force, &update};
  return &set;
}

}  // namespace ymflow::kernels
