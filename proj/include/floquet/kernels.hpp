#pragma once

// Batched fixed-step RK4 for the fundamental-solution system
//
//   u'' = -(E + V(x)) u,         u = u1, u2
//   w'' = -(E + V(x)) w - u,     w = du/dE
//
// integrated for many energies at once. Energies occupy SIMD lanes; the
// potential samples are shared by all lanes. Every variant executes the same
// sequence of IEEE operations (no fused multiply-add), so results are
// bit-identical whichever variant runs.

#include <cstddef>
#include <string_view>

namespace floquet::kernels {

enum class Isa { Scalar, Sse2, Avx2 };

std::string_view isa_name(Isa isa);
bool isa_supported(Isa isa);
/// Widest variant the running CPU supports.
Isa best_isa();

/// Variant used by rk4_advance(). Defaults to best_isa().
Isa active_isa();
/// Throws PreconditionError if the CPU does not support `isa`.
void set_active_isa(Isa isa);

/// Lane counts handed to rk4_advance must be a multiple of this.
inline constexpr std::size_t kLaneBlock = 8;

/// Complex state components, in row order.
enum Component : int { U1, U1p, U2, U2p, W1, W1p, W2, W2p, kComponents };
/// Rows of the state matrix: component c stores Re at 2c and Im at 2c+1.
inline constexpr int kStateRows = 2 * kComponents;

/// A state component whose |Re| or |Im| exceeds this (or is not finite)
/// marks its lane as failed.
inline constexpr double kOverflowLimit = 1e150;

struct Rk4Problem {
  /// V at the half-step nodes x0 + j*h/2, j = 0..2*total_steps.
  const double* v_re = nullptr;
  const double* v_im = nullptr;
  double h = 0.0;  ///< may be negative (backward integration)
  const double* e_re = nullptr;
  const double* e_im = nullptr;
  std::size_t lanes = 0;   ///< multiple of kLaneBlock
  std::size_t stride = 0;  ///< distance between state rows, >= lanes
};

/// Advance steps [first_step, first_step + n_steps). `state` holds
/// kStateRows rows of `stride` doubles. `fail_step[l]` is -1 for a healthy
/// lane; on overflow it receives the index of the offending step. Failed
/// lanes keep integrating but their contents are meaningless.
void rk4_advance(Isa isa, const Rk4Problem& problem, int first_step, int n_steps, double* state,
                 int* fail_step);

inline void rk4_advance(const Rk4Problem& problem, int first_step, int n_steps, double* state,
                        int* fail_step) {
  rk4_advance(active_isa(), problem, first_step, n_steps, state, fail_step);
}

namespace detail {
void rk4_advance_scalar(const Rk4Problem&, int, int, double*, int*);
void rk4_advance_sse2(const Rk4Problem&, int, int, double*, int*);
void rk4_advance_avx2(const Rk4Problem&, int, int, double*, int*);
}  // namespace detail

}  // namespace floquet::kernels
