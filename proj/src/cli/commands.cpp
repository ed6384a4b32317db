#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "floquet/cli.hpp"
#include "floquet/floquet.hpp"
#include "floquet/hill.hpp"
#include "output.hpp"

namespace floquet::cli {

namespace {

// Oracle agreement required by hill-compare.
constexpr double kHillCompareTol = 1e-6;
constexpr int kHillCompareKPoints = 16;

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    err << "error: cannot parse potential: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

// Parses and validates the configured potential; nullopt after reporting a
// failed periodicity/PT check.
std::optional<PotentialExpr> load_potential(const RunConfig& cfg, std::ostream& err) {
  cfg.validate();
  PotentialExpr p = parse_potential(cfg.potential_text());
  const ValidationReport report = validate_potential(p);
  if (!report.passed()) {
    err << fmt::format("potential '{}' failed validation: periodicity residual {} ({}), PT residual {} ({})\n",
                       p.source_text(), report.periodicity_residual, report.periodic ? "ok" : "FAIL",
                       report.pt_residual, report.pt_symmetric ? "ok" : "FAIL");
    return std::nullopt;
  }
  return p;
}

ScanOptions scan_options(const RunConfig& cfg) {
  ScanOptions opts;
  opts.integration.steps_per_period = cfg.steps_per_period;
  opts.threads = cfg.threads;
  return opts;
}

Tolerances tolerances(const RunConfig& cfg) {
  Tolerances tol;
  tol.identity = cfg.tol_identity;
  tol.root = cfg.tol_root;
  tol.merge = cfg.merge_tol;
  return tol;
}

ojson header_for(const PotentialExpr& p, const RunConfig& cfg) {
  ojson h;
  h["potential"] = p.source_text();
  h["e_min"] = cfg.e_min;
  h["e_max"] = cfg.e_max;
  h["n_samples"] = cfg.n_samples;
  h["steps_per_period"] = cfg.steps_per_period;
  return h;
}

Table scan_table(std::span<const DiscriminantSample> samples) {
  Table t{"scan", {"E", "re_delta", "im_delta", "re_k", "im_k", "conj_residual", "wronskian_drift"}, ojson::array()};
  for (const auto& s : samples) {
    ojson row;
    row["E"] = s.energy;
    row["re_delta"] = s.delta.real();
    row["im_delta"] = s.delta.imag();
    row["re_k"] = s.k.real();
    row["im_k"] = s.k.imag();
    row["conj_residual"] = s.residuals.conj_residual;
    row["wronskian_drift"] = s.transfer.wronskian_drift;
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table band_table(const BandStructure& bs) {
  Table t{"bands", {"band", "lower", "upper", "gap_above", "coalesced"}, ojson::array()};
  for (std::size_t i = 0; i < bs.bands.size(); ++i) {
    const Band& b = bs.bands[i];
    ojson row;
    row["band"] = static_cast<long long>(i);
    row["lower"] = b.lower;
    row["upper"] = b.upper;
    row["gap_above"] = i < bs.gaps.size() ? ojson(bs.gaps[i]) : ojson(nullptr);
    row["coalesced"] = i < bs.coalesced.size() ? ojson(static_cast<bool>(bs.coalesced[i])) : ojson(nullptr);
    row["truncated_lower"] = b.truncated_lower;
    row["truncated_upper"] = b.truncated_upper;
    t.rows.push_back(std::move(row));
  }
  return t;
}

struct BandRun {
  std::vector<DiscriminantSample> samples;
  BandStructure bands;
};

// Scan + edges + assembly; nullopt (after reporting) when the discriminant
// is not real along the scan.
std::optional<BandRun> compute_bands(const FundamentalIntegrator& integrator, const RunConfig& cfg,
                                     std::ostream& err) {
  std::vector<double> energies(static_cast<std::size_t>(cfg.n_samples));
  const double step = (cfg.e_max - cfg.e_min) / (cfg.n_samples - 1);
  for (int j = 0; j < cfg.n_samples; ++j) energies[static_cast<std::size_t>(j)] = cfg.e_min + j * step;
  energies.back() = cfg.e_max;

  BandRun run;
  run.samples = scan_discriminant(integrator, energies, cfg.threads);
  const Tolerances tol = tolerances(cfg);
  double worst = 0.0;
  for (const auto& s : run.samples) worst = std::max(worst, std::abs(s.delta.imag()));
  if (worst > 100.0 * tol.identity) {
    err << fmt::format("discriminant is not real along the scan (max |Im delta| = {}); refusing to locate edges\n",
                       worst);
    return std::nullopt;
  }
  const auto edges = find_band_edges(integrator, run.samples, tol);
  run.bands = assemble_bands(edges, run.samples, tol);
  return run;
}

}  // namespace

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto p = load_potential(cfg, err);
    if (!p) return static_cast<int>(kExitInvalidPotential);
    const auto samples = scan_discriminant(*p, cfg.e_min, cfg.e_max, cfg.n_samples, scan_options(cfg));

    Table t{"residuals",
            {"E", "re_delta", "im_delta", "conj_residual", "im_u1p", "im_u2", "compose_residual", "trace1_residual",
             "trace2_residual", "reflection_residual", "correspondence_residual", "transport_residual",
             "wronskian_drift"},
            ojson::array()};
    ojson max_row;
    const auto fill = [](ojson& row, const IdentityResiduals& r, double im_delta, double drift) {
      row["im_delta"] = im_delta;
      row["conj_residual"] = r.conj_residual;
      row["im_u1p"] = r.im_u1p;
      row["im_u2"] = r.im_u2;
      row["compose_residual"] = r.compose_residual;
      row["trace1_residual"] = r.trace1_residual;
      row["trace2_residual"] = r.trace2_residual;
      row["reflection_residual"] = r.max_reflection();
      row["correspondence_residual"] = r.max_correspondence();
      row["transport_residual"] = r.max_transport();
      row["wronskian_drift"] = drift;
    };

    IdentityResiduals worst;
    double worst_im = 0.0;
    double worst_drift = 0.0;
    const auto upd = [](double& a, double b) { a = std::max(a, b); };
    for (const auto& s : samples) {
      ojson row;
      row["E"] = s.energy;
      row["re_delta"] = s.delta.real();
      fill(row, s.residuals, s.delta.imag(), s.transfer.wronskian_drift);
      t.rows.push_back(std::move(row));

      const IdentityResiduals& r = s.residuals;
      upd(worst.conj_residual, r.conj_residual);
      upd(worst.im_u1p, r.im_u1p);
      upd(worst.im_u2, r.im_u2);
      upd(worst.compose_residual, r.compose_residual);
      upd(worst.trace1_residual, r.trace1_residual);
      upd(worst.trace2_residual, r.trace2_residual);
      for (int i = 0; i < 4; ++i) {
        upd(worst.reflection[i], r.reflection[i]);
        upd(worst.correspondence[i], r.correspondence[i]);
        upd(worst.transport[i], r.transport[i]);
      }
      upd(worst_im, std::abs(s.delta.imag()));
      upd(worst_drift, s.transfer.wronskian_drift);
    }
    max_row["E"] = "max";
    fill(max_row, worst, worst_im, worst_drift);
    t.rows.push_back(max_row);

    const double max_residual = std::max(worst.max(), worst_im);
    const bool passed = max_residual <= cfg.tol_identity;
    ojson header = header_for(*p, cfg);
    header["tol_identity"] = cfg.tol_identity;
    header["max_residual"] = max_residual;
    header["passed"] = passed;
    emit(cfg, header, {t}, out);
    err << fmt::format("verify: max identity residual {} (tolerance {}): {}\n", max_residual, cfg.tol_identity,
                       passed ? "PASS" : "FAIL");
    return static_cast<int>(passed ? kExitPass : kExitIdentityFailure);
  });
}

int cmd_bands(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto p = load_potential(cfg, err);
    if (!p) return static_cast<int>(kExitInvalidPotential);
    IntegrationConfig icfg;
    icfg.steps_per_period = cfg.steps_per_period;
    const FundamentalIntegrator integrator(*p, icfg);
    const auto run = compute_bands(integrator, cfg, err);
    if (!run) return static_cast<int>(kExitIdentityFailure);

    ojson header = header_for(*p, cfg);
    header["merge_tol"] = cfg.merge_tol;
    emit(cfg, header, {band_table(run->bands), scan_table(run->samples)}, out);
    return static_cast<int>(kExitPass);
  });
}

int cmd_hill_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto p = load_potential(cfg, err);
    if (!p) return static_cast<int>(kExitInvalidPotential);
    IntegrationConfig icfg;
    icfg.steps_per_period = cfg.steps_per_period;
    const FundamentalIntegrator integrator(*p, icfg);
    const auto run = compute_bands(integrator, cfg, err);
    if (!run) return static_cast<int>(kExitIdentityFailure);
    if (run->bands.bands.size() < static_cast<std::size_t>(kValidatedBands) ||
        run->bands.bands.front().truncated_lower) {
      throw ConfigError(fmt::format("energy range {}:{} does not cover the lowest three bands", cfg.e_min, cfg.e_max));
    }

    HillConfig hcfg;
    hcfg.truncation = cfg.hill_N;
    const FourierCoeffs coeffs = hill_coefficients(*p, hcfg);
    if (coeffs.truncation_warning) {
      err << fmt::format("warning: Fourier series of the potential is not resolved at order {}\n",
                         coeffs.truncation);
    }
    const auto ks = uniform_k_grid(kHillCompareKPoints);
    const ValidationTable table = cross_validate(integrator, coeffs, run->bands, ks, hcfg);

    Table t{"comparison", {"k", "band", "applicable", "floquet_energy", "hill_re", "hill_im", "abs_error"},
            ojson::array()};
    for (const auto& e : table.entries) {
      ojson row;
      row["k"] = e.k;
      row["band"] = e.band;
      row["applicable"] = e.applicable;
      row["floquet_energy"] = e.applicable ? ojson(e.floquet_energy) : ojson(nullptr);
      row["hill_re"] = e.hill_energy.real();
      row["hill_im"] = e.hill_energy.imag();
      row["abs_error"] = e.applicable ? ojson(e.abs_error) : ojson(nullptr);
      t.rows.push_back(std::move(row));
    }
    const bool passed = table.max_error <= kHillCompareTol;
    ojson header = header_for(*p, cfg);
    header["hill_N"] = cfg.hill_N;
    header["max_abs_error"] = table.max_error;
    header["hill_real_everywhere"] = table.hill_real_everywhere;
    header["passed"] = passed;
    emit(cfg, header, {t}, out);
    err << fmt::format("hill-compare: max |dE| {} (tolerance {}): {}\n", table.max_error, kHillCompareTol,
                       passed ? "PASS" : "FAIL");
    return static_cast<int>(passed ? kExitPass : kExitIdentityFailure);
  });
}

namespace {

struct Flags {
  std::string config_path;
  std::string potential;
  std::string preset;
  double v0 = 0.0;
  std::string e_range;
  int n = 0;
  int steps = 0;
  int hill_n = 0;
  std::string format;
  std::string out;
};

void add_flags(CLI::App& app, Flags& f) {
  app.add_option("--config", f.config_path, "JSON config file (keys are RunConfig field names)");
  app.add_option("--potential", f.potential, "potential V(x) in the expression language, e.g. \"cos(2*x)\"");
  app.add_option("--preset", f.preset, "free | mathieu | pt-lattice | pt-exp");
  app.add_option("--v0", f.v0, "imaginary amplitude for the pt-lattice preset");
  app.add_option("--e-range", f.e_range, "energy window a:b");
  app.add_option("--n", f.n, "number of energy samples");
  app.add_option("--steps", f.steps, "RK4 steps per period (even, >= 16)");
  app.add_option("--hill-n", f.hill_n, "Hill truncation N (matrix size 2N+1)");
  app.add_option("--format", f.format, "csv | json");
  app.add_option("--out", f.out, "output path (default: stdout)");
}

RunConfig build_config(const CLI::App& sub, const Flags& f) {
  RunConfig cfg;
  if (sub.count("--config")) apply_config_file(f.config_path, cfg);
  if (sub.count("--potential") && sub.count("--preset")) {
    throw ConfigError("--potential and --preset are mutually exclusive");
  }
  if (sub.count("--potential")) {
    cfg.potential = f.potential;
    cfg.preset.clear();
  }
  if (sub.count("--preset")) {
    cfg.preset = f.preset;
    cfg.potential.clear();
  }
  if (sub.count("--v0")) cfg.v0 = f.v0;
  if (sub.count("--e-range")) parse_energy_range(f.e_range, cfg.e_min, cfg.e_max);
  if (sub.count("--n")) cfg.n_samples = f.n;
  if (sub.count("--steps")) cfg.steps_per_period = f.steps;
  if (sub.count("--hill-n")) cfg.hill_N = f.hill_n;
  if (sub.count("--format")) {
    if (f.format == "csv") cfg.output_format = OutputFormat::Csv;
    else if (f.format == "json") cfg.output_format = OutputFormat::Json;
    else throw ConfigError("--format must be csv or json");
  }
  if (sub.count("--out")) cfg.output_path = f.out;
  cfg.threads = threads_from_env();
  return cfg;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  // "--e-range -1:10" would otherwise read the negative bound as a flag.
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--e-range" && i + 1 < argc && argv[i + 1][0] == '-') {
      a += "=";
      a += argv[++i];
    }
    args.push_back(std::move(a));
  }
  std::reverse(args.begin(), args.end());

  CLI::App app{"Floquet discriminants and Bloch bands of PT-symmetric periodic potentials", "floquet-bands"};
  app.require_subcommand(1);
  Flags flags;
  CLI::App* verify = app.add_subcommand("verify", "certify the reality identities over an energy grid");
  CLI::App* bands = app.add_subcommand("bands", "scan the discriminant and assemble the band structure");
  CLI::App* hill = app.add_subcommand("hill-compare", "compare band energies with the plane-wave oracle");
  for (CLI::App* sub : {verify, bands, hill}) add_flags(*sub, flags);

  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  CLI::App* chosen = verify->parsed() ? verify : bands->parsed() ? bands : hill;
  RunConfig cfg;
  const int status = guarded(err, [&] {
    cfg = build_config(*chosen, flags);
    return 0;
  });
  if (status != 0) return status;

  if (chosen == verify) return cmd_verify(cfg, out, err);
  if (chosen == bands) return cmd_bands(cfg, out, err);
  return cmd_hill_compare(cfg, out, err);
}

}  // namespace floquet::cli
