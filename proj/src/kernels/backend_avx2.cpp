// AVX2 instantiation of the kernel templates. This is the only TU compiled
// with -mavx2 (and only that; FMA stays off so every product and sum rounds
// exactly like the scalar backend). On targets without AVX2 support it
// degrades to a null table and dispatch stays on scalar.

#include "homog/kernels/kernels_impl.hpp"

namespace homog::kernels::detail {

#ifdef __AVX2__

const kernel_table& avx2_table() {
  static const kernel_table t = make_table<avx2_backend>();
  return t;
}

#else

const kernel_table& avx2_table() {
  static const kernel_table t{};
  return t;
}

#endif

}  // namespace homog::kernels::detail
