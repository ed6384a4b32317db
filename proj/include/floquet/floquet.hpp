#pragma once

// Floquet analysis: discriminant, PT reality identities, Bloch index and
// band structure assembly from energy scans.

#include <complex>
#include <span>
#include <vector>

#include "floquet/ode.hpp"
#include "floquet/potential.hpp"

namespace floquet {

struct Tolerances {
  double identity = 1e-8;  ///< identity residuals, |Im delta|
  double root = 1e-10;     ///< band-edge bracket width in E
  double merge = 1e-6;     ///< gap width below which bands count as coalesced
  double eig = 1e-8;       ///< relative eigen-residual for Bloch coefficients
};

/// Half the monodromy trace, (u1(pi) + u2'(pi)) / 2.
complex discriminant(const TransferData& t);
/// dDelta/dE from the energy-derivative solutions.
complex discriminant_derivative(const TransferData& t);

/// Residuals of the reality identities. All are zero for a PT-symmetric
/// potential at exact arithmetic.
struct IdentityResiduals {
  double conj_residual = 0.0;     ///< |u1(pi) - conj(u2'(pi))|
  double im_u1p = 0.0;            ///< |Im u1'(pi)|
  double im_u2 = 0.0;             ///< |Im u2(pi)|
  double compose_residual = 0.0;  ///< u1(pi) = conj(u2'(pi)) = u1(pi/2) conj(u2'(pi/2)) + u1'(pi/2) conj(u2(pi/2))
  double trace1_residual = 0.0;   ///< u1'(pi) = 2 Re(conj(u1(pi/2)) u1'(pi/2))
  double trace2_residual = 0.0;   ///< u2(pi)  = 2 Re(conj(u2(pi/2)) u2'(pi/2))

  /// v(-pi/2) against conj(v(+pi/2)) for v1, v1', v2, v2' (signs +, -, -, +).
  double reflection[4] = {0, 0, 0, 0};
  /// u1(pi/2) = v2'(-pi/2), u1'(pi/2) = -v1'(-pi/2), u2(pi/2) = -v2(-pi/2), u2'(pi/2) = v1(-pi/2).
  double correspondence[4] = {0, 0, 0, 0};
  /// u-values at pi rebuilt from the shifted pair at +-pi/2 (u1, u1', u2, u2').
  double transport[4] = {0, 0, 0, 0};

  double max_reflection() const;
  double max_correspondence() const;
  double max_transport() const;
  /// Largest of every residual above.
  double max() const;
};

/// `t` and `shifted` must come from the same energy; otherwise PreconditionError.
IdentityResiduals verify_pt_identities(const TransferData& t, const ShiftedTransfer& shifted);

/// k with cos(k pi) = delta. Re k in [0, 1]; for real delta, Im k >= 0 and
/// k is real exactly when |delta| <= 1.
complex bloch_k(complex delta);

struct BlochSolution {
  complex k{};
  complex c{};  ///< coefficient of u1
  complex d{};  ///< coefficient of u2
};

/// Eigenvector of the monodromy matrix for eigenvalue exp(i k pi), with
/// |c|^2 + |d|^2 = 1 and the first non-zero component real positive. A
/// scalar monodromy yields (1, 0). NumericalError when exp(i k pi) is not
/// an eigenvalue within tol_eig.
BlochSolution bloch_coefficients(const TransferData& t, complex k, double tol_eig = 1e-8);

struct DiscriminantSample {
  double energy = 0.0;
  complex delta{};
  complex delta_dE{};
  complex k{};
  IdentityResiduals residuals;
  TransferData transfer;
};

struct ScanOptions {
  IntegrationConfig integration;
  unsigned threads = 1;  ///< 0 = hardware concurrency
};

/// n uniformly spaced energies in [e_min, e_max], in increasing order.
std::vector<DiscriminantSample> scan_discriminant(const PotentialExpr& p, double e_min, double e_max, int n,
                                                  const ScanOptions& opts = {});
std::vector<DiscriminantSample> scan_discriminant(const FundamentalIntegrator& integrator,
                                                  std::span<const double> energies, unsigned threads = 1);

struct BandEdge {
  double energy = 0.0;
  int sign = 0;          ///< +1 where delta = 1, -1 where delta = -1
  int multiplicity = 1;  ///< 2 for a tangential (double) edge
  bool at_boundary = false;
};

/// Roots of Re delta = +-1 among the samples, refined by bisection with
/// fresh integrations. Tangential touches are located through the zero of
/// dDelta/dE and reported as double edges. Throws NumericalError when any
/// sample has |Im delta| > 100 * tol.identity.
std::vector<BandEdge> find_band_edges(const FundamentalIntegrator& integrator,
                                      std::span<const DiscriminantSample> samples, const Tolerances& tol = {});
std::vector<BandEdge> find_band_edges(const PotentialExpr& p, std::span<const DiscriminantSample> samples,
                                      const IntegrationConfig& cfg = {}, const Tolerances& tol = {});

struct Band {
  double lower = 0.0;
  double upper = 0.0;
  int lower_sign = 0;  ///< delta at the lower edge (0 when truncated)
  int upper_sign = 0;
  bool truncated_lower = false;  ///< band extends below the scan
  bool truncated_upper = false;
};

struct BandStructure {
  std::vector<Band> bands;
  std::vector<double> gaps;    ///< gaps[i] lies between bands[i] and bands[i+1]
  std::vector<bool> coalesced;  ///< gaps[i] <= merge tolerance
};

BandStructure assemble_bands(std::span<const BandEdge> edges, std::span<const DiscriminantSample> samples,
                             const Tolerances& tol = {});

}  // namespace floquet
