#include "floquet/hill.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "floquet/errors.hpp"
#include "floquet/roots.hpp"

namespace floquet {

int HillConfig::fourier_order() const { return fourier > 0 ? fourier : std::min(16, truncation); }

ComplexMatrix hill_matrix(const FourierCoeffs& c, double k, int truncation) {
  if (k < 0.0 || k > 1.0) throw PreconditionError("hill_matrix: k must lie in [0, 1]");
  if (truncation < c.truncation) throw PreconditionError("hill_matrix: truncation must be >= Fourier order");
  const std::size_t dim = 2 * static_cast<std::size_t>(truncation) + 1;
  ComplexMatrix h(dim);
  for (std::size_t row = 0; row < dim; ++row) {
    const int m = static_cast<int>(row) - truncation;
    for (std::size_t col = 0; col < dim; ++col) {
      const int n = static_cast<int>(col) - truncation;
      complex entry = -c[m - n];
      if (m == n) entry += (2.0 * n + k) * (2.0 * n + k);
      h(row, col) = entry;
    }
  }
  return h;
}

FourierCoeffs hill_coefficients(const PotentialExpr& p, const HillConfig& cfg) {
  const int order = cfg.fourier_order();
  return fourier_coefficients(p, order, std::max(4 * order + 4, 512));
}

HillSpectrum hill_energies(const FourierCoeffs& c, double k, const HillConfig& cfg) {
  if (cfg.truncation < c.truncation) {
    throw PreconditionError("hill_energies: truncation N=" + std::to_string(cfg.truncation) +
                            " is below the Fourier order M=" + std::to_string(c.truncation));
  }
  HillSpectrum s;
  s.k = k;
  s.eigenvalues = eigenvalues(hill_matrix(c, k, cfg.truncation));
  std::stable_sort(s.eigenvalues.begin(), s.eigenvalues.end(), [](const complex& a, const complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  for (const auto& e : s.eigenvalues) s.max_imag = std::max(s.max_imag, std::abs(e.imag()));
  s.real = s.max_imag <= cfg.tol_real;
  return s;
}

HillSpectrum hill_energies(const PotentialExpr& p, double k, const HillConfig& cfg) {
  return hill_energies(hill_coefficients(p, cfg), k, cfg);
}

std::vector<double> uniform_k_grid(int n) {
  if (n < 2) throw PreconditionError("uniform_k_grid: need at least 2 points");
  std::vector<double> ks(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) ks[static_cast<std::size_t>(j)] = static_cast<double>(j) / (n - 1);
  return ks;
}

namespace {

constexpr double kBandRootTol = 1e-13;

}  // namespace

ValidationTable cross_validate(const FundamentalIntegrator& integrator, const FourierCoeffs& coeffs,
                               const BandStructure& bands, std::span<const double> k_grid, const HillConfig& hcfg) {
  if (bands.bands.size() < static_cast<std::size_t>(kValidatedBands) || bands.bands.front().truncated_lower) {
    throw PreconditionError("cross_validate: the band structure must contain the lowest three bands");
  }
  const auto delta_at = [&](double e) { return discriminant(integrator.fundamental(complex(e, 0.0))).real(); };

  ValidationTable table;
  table.max_error_per_band.assign(kValidatedBands, 0.0);
  for (double k : k_grid) {
    const HillSpectrum spectrum = hill_energies(coeffs, k, hcfg);
    table.hill_real_everywhere = table.hill_real_everywhere && spectrum.real;
    const double target = std::cos(k * kPi);

    for (int b = 0; b < kValidatedBands; ++b) {
      const Band& band = bands.bands[static_cast<std::size_t>(b)];
      ValidationEntry entry;
      entry.k = k;
      entry.band = b;
      entry.hill_energy = spectrum.eigenvalues[static_cast<std::size_t>(b)];

      const double f_lo = (band.truncated_lower ? delta_at(band.lower) : band.lower_sign) - target;
      const double f_hi = (band.truncated_upper ? delta_at(band.upper) : band.upper_sign) - target;
      if (f_lo == 0.0) {
        entry.floquet_energy = band.lower;
        entry.applicable = true;
      } else if (f_hi == 0.0) {
        entry.floquet_energy = band.upper;
        entry.applicable = true;
      } else if ((f_lo > 0.0) != (f_hi > 0.0)) {
        entry.floquet_energy =
            bisect([&](double e) { return delta_at(e) - target; }, band.lower, band.upper, f_lo, kBandRootTol);
        entry.applicable = true;
      }
      if (entry.applicable) {
        entry.abs_error = std::abs(complex(entry.floquet_energy, 0.0) - entry.hill_energy);
        table.max_error_per_band[static_cast<std::size_t>(b)] =
            std::max(table.max_error_per_band[static_cast<std::size_t>(b)], entry.abs_error);
        table.max_error = std::max(table.max_error, entry.abs_error);
      }
      table.entries.push_back(entry);
    }
  }
  return table;
}

ValidationTable cross_validate(const PotentialExpr& p, const BandStructure& bands, std::span<const double> k_grid,
                               const HillConfig& hcfg, const IntegrationConfig& icfg) {
  FundamentalIntegrator integrator(p, icfg);
  return cross_validate(integrator, hill_coefficients(p, hcfg), bands, k_grid, hcfg);
}

}  // namespace floquet
