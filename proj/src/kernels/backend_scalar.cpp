// Scalar instantiation of the kernel templates. This TU is compiled without
// any -m arch flags so it runs on the build's baseline target everywhere.

#include "homog/kernels/kernels_impl.hpp"

namespace homog::kernels::detail {

const kernel_table& scalar_table() {
  static const kernel_table t = make_table<scalar_backend>();
  return t;
}

void orbit_fill_scalar(const map_params& mp, double y0, long n, double* out) {
  kern<scalar_backend>::orbit_fill(mp, y0, n, out);
}

double map_step_one_scalar(const map_params& mp, double y) {
  f64x1 v(y);
  f64x1 r = mp.kind == 0 ? kern<scalar_backend>::step_pm(mp, v)
                         : kern<scalar_backend>::step_mpm(mp, v);
  double out;
  r.store(&out);
  return out;
}

}  // namespace homog::kernels::detail
