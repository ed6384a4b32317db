#include <emmintrin.h>

#include "floquet/detail/rk4_body.hpp"

namespace {

struct Sse2Pack {
  using V = __m128d;
  using M = __m128d;
  static constexpr std::size_t width = 2;

  static V load(const double* p) { return _mm_loadu_pd(p); }
  static void store(double* p, V v) { _mm_storeu_pd(p, v); }
  static V set1(double v) { return _mm_set1_pd(v); }
  static V add(V a, V b) { return _mm_add_pd(a, b); }
  static V sub(V a, V b) { return _mm_sub_pd(a, b); }
  static V mul(V a, V b) { return _mm_mul_pd(a, b); }
  static V neg(V a) { return _mm_xor_pd(a, _mm_set1_pd(-0.0)); }
  static V abs(V a) { return _mm_andnot_pd(_mm_set1_pd(-0.0), a); }
  static M none() { return _mm_setzero_pd(); }
  static M exceeds(V a, V b) { return _mm_cmpnle_pd(a, b); }
  static M mask_or(M a, M b) { return _mm_or_pd(a, b); }
  static unsigned bits(M m) { return static_cast<unsigned>(_mm_movemask_pd(m)); }
};

}  // namespace

namespace floquet::kernels::detail {

void rk4_advance_sse2(const Rk4Problem& pb, int first_step, int n_steps, double* state, int* fail_step) {
  rk4_body<Sse2Pack>(pb, first_step, n_steps, state, fail_step);
}

}  // namespace floquet::kernels::detail
