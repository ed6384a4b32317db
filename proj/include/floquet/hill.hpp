#pragma once

// Hill's method: the operator -d^2/dx^2 - V(x) restricted to Bloch waves
// exp(i(2n + k)x), n = -N..N, as a (2N+1)-square matrix. Its eigenvalues at
// fixed k approximate the band energies with quasimomentum k, independently
// of any ODE integration.

#include <span>
#include <vector>

#include "floquet/eigen.hpp"
#include "floquet/floquet.hpp"
#include "floquet/potential.hpp"

namespace floquet {

struct HillConfig {
  int truncation = 24;  ///< N
  int fourier = 0;      ///< M; 0 picks min(16, N)
  double tol_real = 1e-7;

  int fourier_order() const;
};

struct HillSpectrum {
  double k = 0.0;
  std::vector<complex> eigenvalues;  ///< sorted by (Re, Im), 2N+1 entries
  double max_imag = 0.0;
  bool real = false;  ///< max_imag <= tol_real
};

/// Entry (m, n) = (2n + k)^2 delta_mn - c_{m-n}, rows and columns n = -N..N.
ComplexMatrix hill_matrix(const FourierCoeffs& c, double k, int truncation);

HillSpectrum hill_energies(const FourierCoeffs& c, double k, const HillConfig& cfg = {});
HillSpectrum hill_energies(const PotentialExpr& p, double k, const HillConfig& cfg = {});

/// Coefficients used by hill_energies(p, ...).
FourierCoeffs hill_coefficients(const PotentialExpr& p, const HillConfig& cfg = {});

struct ValidationEntry {
  double k = 0.0;
  int band = 0;
  bool applicable = false;
  double floquet_energy = 0.0;
  complex hill_energy{};
  double abs_error = 0.0;
};

struct ValidationTable {
  std::vector<ValidationEntry> entries;
  std::vector<double> max_error_per_band;
  double max_error = 0.0;
  bool hill_real_everywhere = true;
};

inline constexpr int kValidatedBands = 3;

/// Uniform grid of n points on [0, 1].
std::vector<double> uniform_k_grid(int n);

/// For each k and each of the lowest three bands, solves Re delta(E) =
/// cos(k pi) by bisection inside the band and compares with the matching
/// sorted Hill eigenvalue. Entries whose k is not reached inside a band are
/// marked inapplicable.
ValidationTable cross_validate(const PotentialExpr& p, const BandStructure& bands, std::span<const double> k_grid,
                               const HillConfig& hcfg = {}, const IntegrationConfig& icfg = {});
ValidationTable cross_validate(const FundamentalIntegrator& integrator, const FourierCoeffs& coeffs,
                               const BandStructure& bands, std::span<const double> k_grid,
                               const HillConfig& hcfg = {});

}  // namespace floquet
