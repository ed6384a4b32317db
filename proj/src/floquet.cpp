#include "floquet/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "floquet/errors.hpp"
#include "floquet/roots.hpp"

namespace floquet {

complex discriminant(const TransferData& t) { return 0.5 * (t.full.u1 + t.full.u2p); }

complex discriminant_derivative(const TransferData& t) { return 0.5 * (t.full_dE.u1 + t.full_dE.u2p); }

namespace {

double max_of(const double (&a)[4]) { return std::max(std::max(a[0], a[1]), std::max(a[2], a[3])); }

}  // namespace

double IdentityResiduals::max_reflection() const { return max_of(reflection); }
double IdentityResiduals::max_correspondence() const { return max_of(correspondence); }
double IdentityResiduals::max_transport() const { return max_of(transport); }

double IdentityResiduals::max() const {
  return std::max({conj_residual, im_u1p, im_u2, compose_residual, trace1_residual, trace2_residual,
                   max_reflection(), max_correspondence(), max_transport()});
}

IdentityResiduals verify_pt_identities(const TransferData& t, const ShiftedTransfer& shifted) {
  if (t.energy != shifted.energy) {
    throw PreconditionError("verify_pt_identities: records were computed at different energies");
  }
  const FundamentalValues& h = t.half;
  const FundamentalValues& f = t.full;
  const FundamentalValues& vp = shifted.forward;
  const FundamentalValues& vm = shifted.backward;

  IdentityResiduals r;
  r.conj_residual = std::abs(f.u1 - std::conj(f.u2p));
  r.im_u1p = std::abs(f.u1p.imag());
  r.im_u2 = std::abs(f.u2.imag());

  const complex composed = h.u1 * std::conj(h.u2p) + h.u1p * std::conj(h.u2);
  r.compose_residual = std::max(std::abs(f.u1 - composed), std::abs(std::conj(f.u2p) - composed));
  r.trace1_residual = std::abs(f.u1p - 2.0 * (std::conj(h.u1) * h.u1p).real());
  r.trace2_residual = std::abs(f.u2 - 2.0 * (std::conj(h.u2) * h.u2p).real());

  r.reflection[0] = std::abs(vm.u1 - std::conj(vp.u1));
  r.reflection[1] = std::abs(vm.u1p + std::conj(vp.u1p));
  r.reflection[2] = std::abs(vm.u2 + std::conj(vp.u2));
  r.reflection[3] = std::abs(vm.u2p - std::conj(vp.u2p));

  r.correspondence[0] = std::abs(h.u1 - vm.u2p);
  r.correspondence[1] = std::abs(h.u1p + vm.u1p);
  r.correspondence[2] = std::abs(h.u2 + vm.u2);
  r.correspondence[3] = std::abs(h.u2p - vm.u1);

  r.transport[0] = std::abs(f.u1 - (vm.u2p * vp.u1 - vm.u1p * vp.u2));
  r.transport[1] = std::abs(f.u1p - (vm.u2p * vp.u1p - vm.u1p * vp.u2p));
  r.transport[2] = std::abs(f.u2 - (-vm.u2 * vp.u1 + vm.u1 * vp.u2));
  r.transport[3] = std::abs(f.u2p - (-vm.u2 * vp.u1p + vm.u1 * vp.u2p));
  return r;
}

complex bloch_k(complex delta) {
  if (delta.imag() == 0.0) {
    const double d = delta.real();
    if (d > 1.0) return {0.0, std::acosh(d) / kPi};
    if (d < -1.0) return {1.0, std::acosh(-d) / kPi};
    return {std::acos(d) / kPi, 0.0};
  }
  return std::acos(delta) / kPi;
}

BlochSolution bloch_coefficients(const TransferData& t, complex k, double tol_eig) {
  const complex m00 = t.full.u1, m01 = t.full.u2, m10 = t.full.u1p, m11 = t.full.u2p;
  const complex lambda = std::exp(complex(0.0, kPi) * k);
  const double norm = std::max({std::abs(m00), std::abs(m01), std::abs(m10), std::abs(m11)});
  const double scale = norm + std::abs(lambda);

  BlochSolution s;
  s.k = k;
  const double off = std::max({std::abs(m01), std::abs(m10), std::abs(m00 - m11)});
  if (off <= tol_eig * scale) {
    if (std::abs(m00 - lambda) > tol_eig * scale) {
      throw NumericalError("bloch_coefficients: exp(i k pi) is not an eigenvalue of the monodromy");
    }
    s.c = 1.0;
    s.d = 0.0;
    return s;
  }

  // Null vector of M - lambda I from its larger row.
  const complex a0 = m00 - lambda, b0 = m01;
  const complex a1 = m10, b1 = m11 - lambda;
  complex c, d;
  if (std::norm(a0) + std::norm(b0) >= std::norm(a1) + std::norm(b1)) {
    c = b0;
    d = -a0;
  } else {
    c = -b1;
    d = a1;
  }
  const double len = std::sqrt(std::norm(c) + std::norm(d));
  c /= len;
  d /= len;

  const double residual = std::max(std::abs(m00 * c + m01 * d - lambda * c), std::abs(m10 * c + m11 * d - lambda * d));
  if (residual > tol_eig * scale) {
    throw NumericalError("bloch_coefficients: exp(i k pi) is not an eigenvalue of the monodromy (residual " +
                         std::to_string(residual) + ")");
  }

  const complex lead = std::abs(c) > 1e-14 ? c : d;
  const complex phase = std::conj(lead) / std::abs(lead);
  s.c = c * phase;
  s.d = d * phase;
  if (std::abs(c) > 1e-14) s.c = s.c.real();
  else s.d = s.d.real();
  return s;
}

std::vector<DiscriminantSample> scan_discriminant(const FundamentalIntegrator& integrator,
                                                  std::span<const double> energies, unsigned threads) {
  std::vector<complex> es(energies.begin(), energies.end());
  const auto fundamental = integrator.fundamental(es, threads);
  const auto shifted = integrator.shifted(es, threads);
  std::vector<DiscriminantSample> out(energies.size());
  for (std::size_t j = 0; j < energies.size(); ++j) {
    DiscriminantSample& s = out[j];
    s.energy = energies[j];
    s.transfer = fundamental[j];
    s.delta = discriminant(s.transfer);
    s.delta_dE = discriminant_derivative(s.transfer);
    s.k = bloch_k(s.delta);
    s.residuals = verify_pt_identities(s.transfer, shifted[j]);
  }
  return out;
}

std::vector<DiscriminantSample> scan_discriminant(const PotentialExpr& p, double e_min, double e_max, int n,
                                                  const ScanOptions& opts) {
  if (!(e_min < e_max)) throw PreconditionError("scan_discriminant: need e_min < e_max");
  if (n < 2) throw PreconditionError("scan_discriminant: need n >= 2");
  std::vector<double> energies(static_cast<std::size_t>(n));
  const double step = (e_max - e_min) / (n - 1);
  for (int j = 0; j < n; ++j) energies[static_cast<std::size_t>(j)] = e_min + j * step;
  energies.back() = e_max;
  FundamentalIntegrator integrator(p, opts.integration);
  return scan_discriminant(integrator, energies, opts.threads);
}

namespace {

// Samples within this distance of +-1 at the scan ends count as edges.
constexpr double kBoundaryEdgeTol = 1e-9;

struct EdgeFinder {
  const FundamentalIntegrator& integrator;
  const Tolerances& tol;

  TransferData at(double e) const { return integrator.fundamental(complex(e, 0.0)); }
  double delta(double e) const { return discriminant(at(e)).real(); }
  double slope(double e) const { return discriminant_derivative(at(e)).real(); }

  // Root of s*Re(delta) - 1 in [lo, hi]; the caller guarantees a sign change.
  double crossing(double lo, double hi, double f_lo, int s) const {
    return bisect([&](double e) { return s * delta(e) - 1.0; }, lo, hi, f_lo, tol.root);
  }
};

bool outside(double re_delta, int s) { return s * re_delta > 1.0; }

}  // namespace

std::vector<BandEdge> find_band_edges(const FundamentalIntegrator& integrator,
                                      std::span<const DiscriminantSample> samples, const Tolerances& tol) {
  for (const auto& s : samples) {
    if (std::abs(s.delta.imag()) > 100.0 * tol.identity) {
      throw NumericalError("find_band_edges: discriminant is not real at E=" + std::to_string(s.energy) +
                           " (|Im delta| = " + std::to_string(std::abs(s.delta.imag())) + ")");
    }
  }
  for (std::size_t j = 1; j < samples.size(); ++j) {
    if (!(samples[j - 1].energy < samples[j].energy)) {
      throw PreconditionError("find_band_edges: samples must be sorted by increasing energy");
    }
  }

  std::vector<BandEdge> edges;
  if (samples.size() < 2) return edges;
  const EdgeFinder finder{integrator, tol};
  const std::size_t last = samples.size() - 1;

  // A scan end sitting on an edge; the tangency search skips the adjacent
  // interval so the edge is not reported twice.
  bool edge_at_start = false;
  bool edge_at_end = false;
  for (int s : {+1, -1}) {
    const double d0 = samples.front().delta.real();
    if (!outside(d0, s) && !outside(samples[1].delta.real(), s) && std::abs(s * d0 - 1.0) <= kBoundaryEdgeTol) {
      edges.push_back({samples.front().energy, s, 1, true});
      edge_at_start = true;
    }
    const double dn = samples[last].delta.real();
    if (!outside(dn, s) && !outside(samples[last - 1].delta.real(), s) && std::abs(s * dn - 1.0) <= kBoundaryEdgeTol) {
      edges.push_back({samples[last].energy, s, 1, true});
      edge_at_end = true;
    }
  }

  for (std::size_t j = 0; j < last; ++j) {
    const DiscriminantSample& a = samples[j];
    const DiscriminantSample& b = samples[j + 1];
    const double da = a.delta.real();
    const double db = b.delta.real();

    for (int s : {+1, -1}) {
      if (outside(da, s) != outside(db, s)) {
        edges.push_back({finder.crossing(a.energy, b.energy, s * da - 1.0, s), s, 1, false});
      }
    }

    // An extremum of delta between two in-band samples may hide a tangential
    // edge or a gap narrower than the sample spacing.
    const double sa = a.delta_dE.real();
    const double sb = b.delta_dE.real();
    if ((sa < 0.0) == (sb < 0.0)) continue;
    if ((j == 0 && edge_at_start) || (j + 1 == last && edge_at_end)) continue;
    const int s = sa > 0.0 ? +1 : -1;  // maximum -> +1 side
    if (outside(da, s) || outside(db, s)) continue;
    const double e_ext = bisect([&](double e) { return finder.slope(e); }, a.energy, b.energy, sa, tol.root);
    const double d_ext = finder.delta(e_ext);
    if (outside(d_ext, s)) {
      const double lo = finder.crossing(a.energy, e_ext, s * da - 1.0, s);
      const double hi = finder.crossing(e_ext, b.energy, s * d_ext - 1.0, s);
      if (hi - lo <= tol.merge) {
        edges.push_back({e_ext, s, 2, false});
      } else {
        edges.push_back({lo, s, 1, false});
        edges.push_back({hi, s, 1, false});
      }
    } else if (1.0 - s * d_ext <= tol.merge) {
      edges.push_back({e_ext, s, 2, false});
    }
  }

  std::sort(edges.begin(), edges.end(), [](const BandEdge& x, const BandEdge& y) { return x.energy < y.energy; });

  // Near a tangency |delta| - 1 is quadratic in E and drowns in round-off, so
  // a pair of same-side crossings closer than the merge tolerance becomes one
  // double edge at the extremum.
  std::vector<BandEdge> merged;
  merged.reserve(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const BandEdge& e = edges[i];
    if (i + 1 < edges.size()) {
      const BandEdge& next = edges[i + 1];
      if (e.sign == next.sign && e.multiplicity == 1 && next.multiplicity == 1 && !e.at_boundary &&
          !next.at_boundary && next.energy - e.energy <= tol.merge) {
        // Round-off can put both crossings on one side of the extremum, so
        // widen the bracket until the slope changes sign.
        const double width = std::max(next.energy - e.energy, tol.root);
        double lo = e.energy, hi = next.energy;
        double lo_slope = finder.slope(lo);
        double hi_slope = finder.slope(hi);
        for (int grow = 0; grow < 8 && (lo_slope > 0.0) == (hi_slope > 0.0); ++grow) {
          lo -= width * (1 << grow);
          hi += width * (1 << grow);
          lo_slope = finder.slope(lo);
          hi_slope = finder.slope(hi);
        }
        const double e_ext = (lo_slope > 0.0) == (hi_slope > 0.0)
                                 ? 0.5 * (e.energy + next.energy)
                                 : bisect([&](double x) { return finder.slope(x); }, lo, hi, lo_slope, tol.root);
        merged.push_back({e_ext, e.sign, 2, false});
        ++i;
        continue;
      }
    }
    merged.push_back(e);
  }
  return merged;
}

std::vector<BandEdge> find_band_edges(const PotentialExpr& p, std::span<const DiscriminantSample> samples,
                                      const IntegrationConfig& cfg, const Tolerances& tol) {
  FundamentalIntegrator integrator(p, cfg);
  return find_band_edges(integrator, samples, tol);
}

BandStructure assemble_bands(std::span<const BandEdge> edges, std::span<const DiscriminantSample> samples,
                             const Tolerances& tol) {
  BandStructure out;
  if (samples.empty()) return out;
  const double e_min = samples.front().energy;
  const double e_max = samples.back().energy;

  bool in_band = std::abs(samples.front().delta.real()) <= 1.0;
  if (!edges.empty() && edges.front().at_boundary && edges.front().energy == e_min) in_band = false;

  Band current;
  if (in_band) {
    current.lower = e_min;
    current.truncated_lower = true;
  }
  for (const BandEdge& edge : edges) {
    for (int m = 0; m < edge.multiplicity; ++m) {
      if (in_band) {
        current.upper = edge.energy;
        current.upper_sign = edge.sign;
        out.bands.push_back(current);
        current = Band{};
      } else {
        current.lower = edge.energy;
        current.lower_sign = edge.sign;
      }
      in_band = !in_band;
    }
  }
  if (in_band) {
    current.upper = e_max;
    current.truncated_upper = true;
    out.bands.push_back(current);
  }

  for (std::size_t i = 0; i + 1 < out.bands.size(); ++i) {
    const double gap = out.bands[i + 1].lower - out.bands[i].upper;
    out.gaps.push_back(gap);
    out.coalesced.push_back(gap <= tol.merge);
  }
  return out;
}

}  // namespace floquet
