#include <atomic>

#include "floquet/errors.hpp"
#include "floquet/kernels.hpp"

namespace floquet::kernels {

namespace {

std::atomic<int>& active_slot() {
  static std::atomic<int> slot{static_cast<int>(best_isa())};
  return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Sse2: return "sse2";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
#if defined(FLOQUET_HAVE_X86_KERNELS)
    case Isa::Sse2: return __builtin_cpu_supports("sse2");
    case Isa::Avx2: return __builtin_cpu_supports("avx2");
#else
    case Isa::Sse2:
    case Isa::Avx2: return false;
#endif
  }
  return false;
}

Isa best_isa() {
  if (isa_supported(Isa::Avx2)) return Isa::Avx2;
  if (isa_supported(Isa::Sse2)) return Isa::Sse2;
  return Isa::Scalar;
}

Isa active_isa() { return static_cast<Isa>(active_slot().load(std::memory_order_relaxed)); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw PreconditionError("kernel variant '" + std::string(isa_name(isa)) + "' is not supported on this CPU");
  }
  active_slot().store(static_cast<int>(isa), std::memory_order_relaxed);
}

void rk4_advance(Isa isa, const Rk4Problem& problem, int first_step, int n_steps, double* state, int* fail_step) {
  if (problem.lanes % kLaneBlock != 0 || problem.stride < problem.lanes) {
    throw PreconditionError("rk4_advance: lanes must be a multiple of kLaneBlock and fit the stride");
  }
  switch (isa) {
#if defined(FLOQUET_HAVE_X86_KERNELS)
    case Isa::Avx2: detail::rk4_advance_avx2(problem, first_step, n_steps, state, fail_step); return;
    case Isa::Sse2: detail::rk4_advance_sse2(problem, first_step, n_steps, state, fail_step); return;
#else
    case Isa::Avx2:
    case Isa::Sse2:
      throw PreconditionError("SIMD kernels were not compiled for this target");
#endif
    case Isa::Scalar: detail::rk4_advance_scalar(problem, first_step, n_steps, state, fail_step); return;
  }
}

}  // namespace floquet::kernels
