#include "floquet/ode.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <thread>

#include "floquet/errors.hpp"
#include "floquet/kernels.hpp"

namespace floquet {

namespace {

using kernels::kLaneBlock;
using kernels::kStateRows;

constexpr std::size_t kBlockEnergies = 64;

// Energies of one block laid out for the kernel, padded with E = 0 lanes.
struct LaneBlock {
  std::size_t count = 0;
  std::size_t lanes = 0;
  std::vector<double> e_re, e_im, state;
  std::vector<int> fail;

  explicit LaneBlock(std::span<const complex> energies) : count(energies.size()) {
    lanes = (count + kLaneBlock - 1) / kLaneBlock * kLaneBlock;
    e_re.assign(lanes, 0.0);
    e_im.assign(lanes, 0.0);
    for (std::size_t l = 0; l < count; ++l) {
      e_re[l] = energies[l].real();
      e_im[l] = energies[l].imag();
    }
    state.assign(kStateRows * lanes, 0.0);
    fail.assign(lanes, -1);
    for (std::size_t l = 0; l < lanes; ++l) {
      row(kernels::U1, false)[l] = 1.0;
      row(kernels::U2p, false)[l] = 1.0;
    }
  }

  double* row(int component, bool imag) { return state.data() + (2 * component + (imag ? 1 : 0)) * lanes; }
  const double* row(int component, bool imag) const {
    return state.data() + (2 * component + (imag ? 1 : 0)) * lanes;
  }

  complex value(int component, std::size_t lane) const {
    return {row(component, false)[lane], row(component, true)[lane]};
  }

  FundamentalValues values(std::size_t lane) const {
    return {value(kernels::U1, lane), value(kernels::U1p, lane), value(kernels::U2, lane), value(kernels::U2p, lane)};
  }

  FundamentalValues energy_derivatives(std::size_t lane) const {
    return {value(kernels::W1, lane), value(kernels::W1p, lane), value(kernels::W2, lane), value(kernels::W2p, lane)};
  }

  void advance(const SampledPotential& grid, int first_step, int n_steps) {
    kernels::Rk4Problem pb;
    pb.v_re = grid.re.data();
    pb.v_im = grid.im.data();
    pb.h = grid.step;
    pb.e_re = e_re.data();
    pb.e_im = e_im.data();
    pb.lanes = lanes;
    pb.stride = lanes;
    kernels::rk4_advance(pb, first_step, n_steps, state.data(), fail.data());
  }
};

double drift(const FundamentalValues& v) { return std::abs(v.wronskian() - 1.0); }

// First failing lane in energy order, as an exception.
struct Failure {
  std::size_t index;
  double x;
};

[[noreturn]] void raise(const Failure& f, complex energy) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "integration overflow at x=%.17g for E=%.17g%+.17gi", f.x, energy.real(),
                energy.imag());
  throw IntegrationError(buf, f.x, energy.real());
}

std::optional<Failure> first_failure(const LaneBlock& block, const SampledPotential& grid, std::size_t base,
                                     std::optional<Failure> current) {
  for (std::size_t l = 0; l < block.count; ++l) {
    if (block.fail[l] < 0) continue;
    if (!current || base + l < current->index) {
      current = Failure{base + l, grid.origin + (block.fail[l] + 1) * grid.step};
    }
    break;
  }
  return current;
}

template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& body) {
  threads = std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  }
}

}  // namespace

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void IntegrationConfig::validate() const {
  if (steps_per_period < 16 || steps_per_period % 2 != 0) {
    throw PreconditionError("steps_per_period must be even and >= 16, got " + std::to_string(steps_per_period));
  }
}

SampledPotential SampledPotential::sample(const PotentialExpr& p, double origin, double step, int steps) {
  SampledPotential s;
  s.origin = origin;
  s.step = step;
  s.steps = steps;
  const std::size_t nodes = 2 * static_cast<std::size_t>(steps) + 1;
  s.re.resize(nodes);
  s.im.resize(nodes);
  for (std::size_t j = 0; j < nodes; ++j) {
    const complex v = p.evaluate(origin + static_cast<double>(j) * (0.5 * step));
    s.re[j] = v.real();
    s.im[j] = v.imag();
  }
  return s;
}

FundamentalIntegrator::FundamentalIntegrator(const PotentialExpr& p, IntegrationConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  const int n = cfg_.steps_per_period;
  const double h = kPeriod / n;
  grid_ = SampledPotential::sample(p, 0.0, h, n);
  forward_ = SampledPotential::sample(p, kPeriod / 2, h, n / 2);
  backward_ = SampledPotential::sample(p, kPeriod / 2, -h, n / 2);
}

std::vector<TransferData> FundamentalIntegrator::fundamental(std::span<const complex> energies,
                                                             unsigned threads) const {
  std::vector<TransferData> out(energies.size());
  const std::size_t blocks = (energies.size() + kBlockEnergies - 1) / kBlockEnergies;
  std::vector<std::optional<Failure>> failures(blocks);
  const int half = cfg_.steps_per_period / 2;

  parallel_for(blocks, threads, [&](std::size_t b) {
    const std::size_t base = b * kBlockEnergies;
    const auto slice = energies.subspan(base, std::min(kBlockEnergies, energies.size() - base));
    LaneBlock block(slice);
    block.advance(grid_, 0, half);
    if (cfg_.record_midpoint) {
      for (std::size_t l = 0; l < block.count; ++l) out[base + l].half = block.values(l);
    }
    block.advance(grid_, half, cfg_.steps_per_period - half);
    for (std::size_t l = 0; l < block.count; ++l) {
      TransferData& t = out[base + l];
      t.energy = slice[l];
      t.full = block.values(l);
      t.full_dE = block.energy_derivatives(l);
      t.wronskian_drift = drift(t.full);
      if (cfg_.record_midpoint) t.wronskian_drift = std::max(t.wronskian_drift, drift(t.half));
    }
    failures[b] = first_failure(block, grid_, base, std::nullopt);
  });

  for (const auto& f : failures) {
    if (f) raise(*f, energies[f->index]);
  }
  return out;
}

std::vector<ShiftedTransfer> FundamentalIntegrator::shifted(std::span<const complex> energies,
                                                            unsigned threads) const {
  std::vector<ShiftedTransfer> out(energies.size());
  const std::size_t blocks = (energies.size() + kBlockEnergies - 1) / kBlockEnergies;
  std::vector<std::optional<Failure>> failures(blocks);
  const int half = cfg_.steps_per_period / 2;

  parallel_for(blocks, threads, [&](std::size_t b) {
    const std::size_t base = b * kBlockEnergies;
    const auto slice = energies.subspan(base, std::min(kBlockEnergies, energies.size() - base));
    LaneBlock fwd(slice);
    LaneBlock bwd(slice);
    fwd.advance(forward_, 0, half);
    bwd.advance(backward_, 0, half);
    for (std::size_t l = 0; l < fwd.count; ++l) {
      ShiftedTransfer& t = out[base + l];
      t.energy = slice[l];
      t.forward = fwd.values(l);
      t.backward = bwd.values(l);
      t.wronskian_drift = std::max(drift(t.forward), drift(t.backward));
    }
    auto f = first_failure(fwd, forward_, base, std::nullopt);
    failures[b] = first_failure(bwd, backward_, base, f);
  });

  for (const auto& f : failures) {
    if (f) raise(*f, energies[f->index]);
  }
  return out;
}

TransferData FundamentalIntegrator::fundamental(complex energy) const {
  return fundamental(std::span<const complex>(&energy, 1), 1).front();
}

ShiftedTransfer FundamentalIntegrator::shifted(complex energy) const {
  return shifted(std::span<const complex>(&energy, 1), 1).front();
}

TransferData integrate_fundamental(const PotentialExpr& p, complex energy, const IntegrationConfig& cfg) {
  if (!std::isfinite(energy.real()) || !std::isfinite(energy.imag())) {
    throw PreconditionError("integrate_fundamental: energy must be finite");
  }
  return FundamentalIntegrator(p, cfg).fundamental(energy);
}

ShiftedTransfer integrate_shifted(const PotentialExpr& p, complex energy, const IntegrationConfig& cfg) {
  if (!std::isfinite(energy.real()) || !std::isfinite(energy.imag())) {
    throw PreconditionError("integrate_shifted: energy must be finite");
  }
  return FundamentalIntegrator(p, cfg).shifted(energy);
}

}  // namespace floquet
