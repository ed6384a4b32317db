#include <cmath>

#include "floquet/detail/rk4_body.hpp"

namespace {

struct ScalarPack {
  using V = double;
  using M = bool;
  static constexpr std::size_t width = 1;

  static V load(const double* p) { return *p; }
  static void store(double* p, V v) { *p = v; }
  static V set1(double v) { return v; }
  static V add(V a, V b) { return a + b; }
  static V sub(V a, V b) { return a - b; }
  static V mul(V a, V b) { return a * b; }
  static V neg(V a) { return -a; }
  static V abs(V a) { return std::fabs(a); }
  static M none() { return false; }
  static M exceeds(V a, V b) { return !(a <= b); }
  static M mask_or(M a, M b) { return a || b; }
  static unsigned bits(M m) { return m ? 1U : 0U; }
};

}  // namespace

namespace floquet::kernels::detail {

void rk4_advance_scalar(const Rk4Problem& pb, int first_step, int n_steps, double* state, int* fail_step) {
  rk4_body<ScalarPack>(pb, first_step, n_steps, state, fail_step);
}

}  // namespace floquet::kernels::detail
