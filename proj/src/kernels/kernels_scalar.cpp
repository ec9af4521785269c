#include "kernels_impl.hpp"
#include "ymflow/parallel.hpp"

namespace ymflow::kernels {

namespace {
using detail::ScalarLane;

void density(const GaugeField& U, double* rho) {
  parallel_for(U.lattice().volume(), [&](std::size_t b, std::size_t e) {
    detail::action_density_range<ScalarLane>(U, rho, b, e);
  });
}

void force(const GaugeField& U, const double* w, double* z) {
  parallel_for(U.lattice().volume(), [&](std::size_t b, std::size_t e) {
    detail::force_range<ScalarLane>(U, w, z, b, e);
  });
}

void update(GaugeField& U, const double* z, double scale) {
  parallel_for(U.lattice().volume(), [&](std::size_t b, std::size_t e) {
    detail::exp_update_range<ScalarLane>(U, z, scale, b, e);
  });
}
}  // namespace

const KernelSet& scalar_kernels() {
  static const KernelSet set{"scalar", &density, &force, &update};
  return set;
}

}  // namespace ymflow::kernels
