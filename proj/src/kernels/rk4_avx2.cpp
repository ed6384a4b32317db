#include <immintrin.h>

#include "floquet/detail/rk4_body.hpp"

namespace {

struct Avx2Pack {
  using V = __m256d;
  using M = __m256d;
  static constexpr std::size_t width = 4;

  static V load(const double* p) { return _mm256_loadu_pd(p); }
  static void store(double* p, V v) { _mm256_storeu_pd(p, v); }
  static V set1(double v) { return _mm256_set1_pd(v); }
  static V add(V a, V b) { return _mm256_add_pd(a, b); }
  static V sub(V a, V b) { return _mm256_sub_pd(a, b); }
  static V mul(V a, V b) { return _mm256_mul_pd(a, b); }
  static V neg(V a) { return _mm256_xor_pd(a, _mm256_set1_pd(-0.0)); }
  static V abs(V a) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), a); }
  static M none() { return _mm256_setzero_pd(); }
  static M exceeds(V a, V b) { return _mm256_cmp_pd(a, b, _CMP_NLE_UQ); }
  static M mask_or(M a, M b) { return _mm256_or_pd(a, b); }
  static unsigned bits(M m) { return static_cast<unsigned>(_mm256_movemask_pd(m)); }
};

}  // namespace

namespace floquet::kernels::detail {

void rk4_advance_avx2(const Rk4Problem& pb, int first_step, int n_steps, double* state, int* fail_step) {
  rk4_body<Avx2Pack>(pb, first_step, n_steps, state, fail_step);
}

}  // namespace floquet::kernels::detail
