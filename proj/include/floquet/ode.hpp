#pragma once

// Fundamental solutions of  -(psi'' + V psi) = E psi  over one period.
//
// u1, u2 start from (1, 0) and (0, 1) at x = 0 and are integrated with
// classical RK4 on a uniform grid of steps_per_period steps, so x = pi/2 is
// a grid node. Energy derivatives of the solutions ride along so callers can
// locate extrema of the discriminant without finite differences.

#include <complex>
#include <span>
#include <vector>

#include "floquet/potential.hpp"

namespace floquet {

struct IntegrationConfig {
  int steps_per_period = 4096;
  static constexpr int method_order = 4;
  bool record_midpoint = true;

  /// Throws PreconditionError unless steps_per_period >= 16 and even.
  void validate() const;
};

/// (u1, u1', u2, u2') at one point.
struct FundamentalValues {
  complex u1{}, u1p{}, u2{}, u2p{};

  complex wronskian() const { return u1 * u2p - u1p * u2; }
};

struct TransferData {
  complex energy{};
  FundamentalValues half;     ///< at x = pi/2 (zero unless record_midpoint)
  FundamentalValues full;     ///< at x = pi
  FundamentalValues full_dE;  ///< d/dE of `full`
  double wronskian_drift = 0.0;  ///< max |W - 1| over the recorded points
};

/// Fundamental pair v1, v2 of the half-period-shifted potential
/// U(z) = V(z + pi/2), started at z = 0.
struct ShiftedTransfer {
  complex energy{};
  FundamentalValues forward;   ///< at z = +pi/2
  FundamentalValues backward;  ///< at z = -pi/2
  double wronskian_drift = 0.0;
};

/// V sampled on the RK4 half-step nodes x0 + j*h/2, j = 0..2*steps.
struct SampledPotential {
  double origin = 0.0;
  double step = 0.0;
  int steps = 0;
  std::vector<double> re, im;

  static SampledPotential sample(const PotentialExpr& p, double origin, double step, int steps);
};

/// Reusable integrator for one potential: samples the potential once and
/// integrates any number of energies, batched across SIMD lanes and threads.
/// Results do not depend on the thread count or on the kernel variant.
class FundamentalIntegrator {
 public:
  FundamentalIntegrator(const PotentialExpr& p, IntegrationConfig cfg = {});

  const IntegrationConfig& config() const { return cfg_; }

  TransferData fundamental(complex energy) const;
  ShiftedTransfer shifted(complex energy) const;

  /// threads == 0 means one per hardware thread.
  std::vector<TransferData> fundamental(std::span<const complex> energies, unsigned threads = 1) const;
  std::vector<ShiftedTransfer> shifted(std::span<const complex> energies, unsigned threads = 1) const;

 private:
  IntegrationConfig cfg_;
  SampledPotential grid_;      // x in [0, pi]
  SampledPotential forward_;   // z in [0, pi/2] of U
  SampledPotential backward_;  // z in [0, -pi/2] of U
};

TransferData integrate_fundamental(const PotentialExpr& p, complex energy, const IntegrationConfig& cfg = {});

/// Integrates U(z) = V(z + pi/2) from z = 0 forward to +pi/2 and backward to
/// -pi/2 by sampling V at shifted nodes directly.
ShiftedTransfer integrate_shifted(const PotentialExpr& p, complex energy, const IntegrationConfig& cfg = {});

/// Resolves a requested thread count: 0 means hardware concurrency.
unsigned resolve_threads(unsigned requested);

}  // namespace floquet
