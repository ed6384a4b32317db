#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "floquet/errors.hpp"
#include "floquet/floquet.hpp"
#include "oracle.hpp"

using namespace floquet;

namespace {

bool near(complex a, complex b, double tol) { return std::abs(a - b) <= tol; }

std::string pt_lattice(double v0) { return "cos(2*x)+" + std::to_string(v0) + "i*sin(2*x)"; }

// Hill-matrix spectra from an independent LAPACK run (N = 40). Band edges in
// increasing order: k=0 ground, k=1 pair, k=0 pair, k=1 pair.
constexpr double kMathieuEdges[] = {-0.121765544941085, 0.470654354933847, 1.46676684251607,
                                    3.97918921575136,   4.10090059556048,  9.01371983892041};
constexpr double kPt03Edges[] = {-0.111058702192784, 0.496248255631759, 1.44681129712577,
                                 3.98106034376447,   4.09207418522503,  9.0125627180736};

std::vector<BandEdge> edges_for(const std::string& text, double lo, double hi, int n,
                                std::vector<DiscriminantSample>* keep = nullptr) {
  const auto p = parse_potential(text);
  auto samples = scan_discriminant(p, lo, hi, n);
  auto edges = find_band_edges(p, samples);
  if (keep) *keep = std::move(samples);
  return edges;
}

}  // namespace

TEST_CASE("discriminant examples") {
  TransferData t;
  t.full.u1 = -1.0;
  t.full.u2p = -1.0;
  CHECK(discriminant(t) == complex(-1.0));

  const auto v0 = parse_potential("0");
  CHECK(near(discriminant(integrate_fundamental(v0, 0.25)), 0.0, 1e-10));
  CHECK(near(discriminant(integrate_fundamental(v0, -1.0)), std::cosh(kPi), 1e-9));
  // dDelta/dE for the free particle: -pi sin(pi sqrt E) / (2 sqrt E)
  CHECK(near(discriminant_derivative(integrate_fundamental(v0, 2.0)),
             -kPi * std::sin(kPi * std::sqrt(2.0)) / (2 * std::sqrt(2.0)), 1e-8));
}

TEST_CASE("bloch_k examples") {
  CHECK(near(bloch_k(1.0), 0.0, 1e-15));
  CHECK(near(bloch_k(-1.0), 1.0, 1e-15));
  CHECK(near(bloch_k(0.0), 0.5, 1e-15));
  CHECK(near(bloch_k(std::cosh(kPi)), complex(0.0, 1.0), 1e-14));
  CHECK(near(bloch_k(std::cos(0.3 * kPi)), 0.3, 1e-14));
  const complex below = bloch_k(-std::cosh(0.5 * kPi));
  CHECK(near(below, complex(1.0, 0.5), 1e-14));
}

TEST_CASE("secular consistency") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int j = 0; j < 2000; ++j) {
    complex d = j % 2 ? complex(u(rng), 0.0) : complex(u(rng), u(rng));
    if (std::abs(d) > 10.0) d *= 10.0 / std::abs(d);
    const complex k = bloch_k(d);
    CHECK(std::abs(std::cos(k * kPi) - d) <= 1e-12);
    CHECK(k.real() >= -1e-15);
    CHECK(k.real() <= 1.0 + 1e-15);
    if (d.imag() == 0.0) CHECK(k.imag() >= 0.0);
  }
}

TEST_CASE("bloch_coefficients") {
  const auto v0 = parse_potential("0");
  const auto deg = bloch_coefficients(integrate_fundamental(v0, 1.0), 1.0);
  CHECK(deg.c == complex(1.0));
  CHECK(deg.d == complex(0.0));

  const auto quarter = bloch_coefficients(integrate_fundamental(v0, 0.25), 0.5);
  const double norm = std::sqrt(1.25);
  CHECK(near(quarter.c, 1.0 / norm, 1e-8));
  CHECK(near(quarter.d, complex(0.0, 0.5) / norm, 1e-8));

  CHECK_THROWS_AS(bloch_coefficients(integrate_fundamental(v0, 0.25), 0.0), NumericalError);

  // Mathieu, first band at k = 1/2: find Delta = 0 there and check the eigen-residual.
  const auto p = parse_potential("cos(2*x)");
  double lo = kMathieuEdges[0], hi = kMathieuEdges[1];
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (discriminant(integrate_fundamental(p, mid)).real() > 0.0 ? lo : hi) = mid;
  }
  const auto t = integrate_fundamental(p, 0.5 * (lo + hi));
  const auto b = bloch_coefficients(t, 0.5);
  const complex lambda(0.0, 1.0);
  const complex r1 = t.full.u1 * b.c + t.full.u2 * b.d - lambda * b.c;
  const complex r2 = t.full.u1p * b.c + t.full.u2p * b.d - lambda * b.d;
  CHECK(std::hypot(std::abs(r1), std::abs(r2)) <= 1e-8);
  CHECK(near(std::norm(b.c) + std::norm(b.d), 1.0, 1e-14));
}

TEST_CASE("PT identities hold") {
  const auto v0 = parse_potential("0");
  for (double e : {0.3, 1.0, 2.0, 7.5}) {
    const auto r = verify_pt_identities(integrate_fundamental(v0, e), integrate_shifted(v0, e));
    INFO("E=" << e);
    CHECK(r.max() <= 1e-12);
  }
  const auto p = parse_potential("cos(2*x)+0.3i*sin(2*x)");
  const auto r = verify_pt_identities(integrate_fundamental(p, 2.0), integrate_shifted(p, 2.0));
  CHECK(r.max() <= 1e-8);
  CHECK(r.max() == std::max({r.conj_residual, r.im_u1p, r.im_u2, r.compose_residual, r.trace1_residual,
                             r.trace2_residual, r.max_reflection(), r.max_correspondence(), r.max_transport()}));
}

TEST_CASE("PT identities fail without PT symmetry") {
  const auto p = parse_potential("cos(2*x)+i*cos(2*x)");
  REQUIRE_FALSE(validate_potential(p).passed());
  const auto r = verify_pt_identities(integrate_fundamental(p, 2.0), integrate_shifted(p, 2.0));
  CHECK(r.conj_residual > 1e-3);
}

TEST_CASE("PT identities refuse mismatched energies") {
  const auto p = parse_potential("cos(2*x)");
  CHECK_THROWS_AS(verify_pt_identities(integrate_fundamental(p, 1.0), integrate_shifted(p, 2.0)), PreconditionError);
}

TEST_CASE("scan examples") {
  const auto s = scan_discriminant(parse_potential("0"), 0.0, 4.0, 5);
  REQUIRE(s.size() == 5);
  CHECK(near(s[0].delta, 1.0, 1e-10));
  CHECK(near(s[1].delta, -1.0, 1e-10));
  CHECK(near(s[2].delta, std::cos(kPi * std::sqrt(2.0)), 1e-10));
  CHECK(near(s[3].delta, std::cos(kPi * std::sqrt(3.0)), 1e-10));
  CHECK(near(s[4].delta, 1.0, 1e-10));
  CHECK(s[4].energy == 4.0);

  double mi = 0.0;
  for (const auto& x : scan_discriminant(parse_potential("cos(2*x)"), -1.0, 10.0, 200)) {
    mi = std::max(mi, std::abs(x.delta.imag()));
  }
  CHECK(mi <= 1e-10);

  mi = 0.0;
  for (const auto& x : scan_discriminant(parse_potential(pt_lattice(0.45)), -1.0, 10.0, 200)) {
    mi = std::max(mi, std::abs(x.delta.imag()));
  }
  CHECK(mi <= 1e-8);

  CHECK_THROWS_AS(scan_discriminant(parse_potential("0"), 1.0, 1.0, 5), PreconditionError);
  CHECK_THROWS_AS(scan_discriminant(parse_potential("0"), 0.0, 1.0, 1), PreconditionError);
}

TEST_CASE("free particle edges are double") {
  const auto edges = edges_for("0", 0.5, 4.5, 81);
  REQUIRE(edges.size() == 2);
  CHECK(std::abs(edges[0].energy - 1.0) <= 1e-8);
  CHECK(edges[0].sign == -1);
  CHECK(edges[0].multiplicity == 2);
  CHECK(std::abs(edges[1].energy - 4.0) <= 1e-8);
  CHECK(edges[1].sign == 1);
  CHECK(edges[1].multiplicity == 2);
}

TEST_CASE("Mathieu and PT edges match the Hill oracle") {
  const auto m = edges_for("cos(2*x)", -1.0, 10.0, 200);
  REQUIRE(m.size() >= 6);
  CHECK(m[0].sign == 1);
  CHECK(std::abs(m[0].energy - kMathieuEdges[0]) <= 1e-7);
  for (int j = 0; j < 6; ++j) CHECK(std::abs(m[j].energy - kMathieuEdges[j]) <= 1e-6);

  const auto p = edges_for(pt_lattice(0.3), -1.0, 10.0, 200);
  REQUIRE(p.size() >= 6);
  for (int j = 0; j < 6; ++j) CHECK(std::abs(p[j].energy - kPt03Edges[j]) <= 1e-6);
  CHECK(p[2].energy - p[1].energy > 0.5);
}

TEST_CASE("find_band_edges refuses complex discriminants") {
  const auto p = parse_potential("cos(2*x)+i*cos(2*x)");
  const auto s = scan_discriminant(p, -1.0, 5.0, 30);
  CHECK_THROWS_AS(find_band_edges(p, s), NumericalError);
}

TEST_CASE("assemble free bands") {
  std::vector<DiscriminantSample> s;
  const auto edges = edges_for("0", 0.0, 10.0, 200, &s);
  const auto bs = assemble_bands(edges, s);
  REQUIRE(bs.bands.size() == 4);
  const double expect[][2] = {{0, 1}, {1, 4}, {4, 9}};
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(bs.bands[j].lower - expect[j][0]) <= 1e-8);
    CHECK(std::abs(bs.bands[j].upper - expect[j][1]) <= 1e-8);
    CHECK(std::abs(bs.gaps[j]) <= 1e-8);
    CHECK(bs.coalesced[j]);
  }
  CHECK(bs.bands[3].truncated_upper);
  CHECK(bs.bands[3].upper == 10.0);
}

TEST_CASE("assemble Mathieu bands") {
  std::vector<DiscriminantSample> s;
  const auto edges = edges_for("cos(2*x)", -1.0, 10.0, 200, &s);
  const auto bs = assemble_bands(edges, s);
  REQUIRE(bs.bands.size() >= 3);
  CHECK(bs.gaps[0] > 0.9);
  CHECK_FALSE(bs.coalesced[0]);
  CHECK(std::abs(bs.gaps[0] - (kMathieuEdges[2] - kMathieuEdges[1])) <= 1e-6);
  CHECK_FALSE(bs.bands[0].truncated_lower);
}

TEST_CASE("band starting below the scan is truncated") {
  std::vector<DiscriminantSample> s;
  const auto edges = edges_for("cos(2*x)", 0.0, 2.0, 40, &s);
  const auto bs = assemble_bands(edges, s);
  REQUIRE(bs.bands.size() == 2);
  CHECK(bs.bands[0].truncated_lower);
  CHECK(bs.bands[0].lower == 0.0);
  CHECK(bs.bands[1].truncated_upper);
}

namespace {

std::string random_pt_trig(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coef(-0.8, 0.8);
  std::string s = std::to_string(coef(rng));
  for (int n = 1; n <= 2; ++n) {
    s += "+" + std::to_string(coef(rng)) + "*cos(" + std::to_string(2 * n) + "*x)";
    s += "+" + std::to_string(coef(rng)) + "i*sin(" + std::to_string(2 * n) + "*x)";
  }
  return s;
}

}  // namespace

TEST_CASE("reality for random PT potentials") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 8; ++trial) {
    const std::string text = random_pt_trig(rng);
    const auto p = parse_potential(text);
    REQUIRE(validate_potential(p).passed());
    INFO(text);
    for (const auto& x : scan_discriminant(p, -2.0, 30.0, 60)) {
      const double scale = std::max(1.0, std::abs(x.delta));
      CHECK(std::abs(x.delta.imag()) <= 1e-8 * scale);
      CHECK(x.residuals.conj_residual <= 1e-8 * scale);
    }
  }
}

TEST_CASE("imaginary translation: PT lattice shares the Mathieu discriminant") {
  // cos 2x + i v0 sin 2x = sqrt(1 - v0^2) cos(2(x - i theta)), tanh 2 theta = v0.
  for (double v0 : {0.3, 0.6, 0.9}) {
    const double a = std::sqrt(1.0 - v0 * v0);
    const auto mathieu = [a](double x) { return oracle::cd(a * std::cos(2 * x)); };
    const auto pt = parse_potential(pt_lattice(v0));
    for (double e : {-1.5, 0.2, 1.0, 3.0, 4.05, 9.0, 15.5}) {
      const complex d = discriminant(integrate_fundamental(pt, e));
      const complex ref = oracle::discriminant(mathieu, e, 8192);
      INFO("v0=" << v0 << " E=" << e);
      CHECK(std::abs(d - ref) <= 1e-8 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST_CASE("Hermitian degeneration") {
  for (const char* text : {"cos(2*x)", "cos(2*x)-0.4*cos(4*x)+0.3"}) {
    const auto p = parse_potential(text);
    for (double e : {-1.0, 0.7, 3.3, 11.0}) {
      const auto t = integrate_fundamental(p, e);
      for (complex v : {t.half.u1, t.half.u1p, t.half.u2, t.half.u2p, t.full.u1, t.full.u1p, t.full.u2,
                        t.full.u2p}) {
        CHECK(std::abs(v.imag()) <= 1e-10);
      }
      CHECK(near(t.full.u1, t.full.u2p, 1e-9 * std::max(1.0, std::abs(t.full.u1))));
    }
  }
}

TEST_CASE("edges re-evaluate on the boundary and survive step doubling") {
  for (double v0 : {0.0, 0.3, 0.45}) {
    const auto p = parse_potential(pt_lattice(v0));
    const auto s = scan_discriminant(p, -2.0, 30.0, 200);
    const auto edges = find_band_edges(p, s);
    INFO("v0=" << v0);
    for (const auto& e : edges) {
      const complex d = discriminant(integrate_fundamental(p, e.energy));
      CHECK(std::abs(d.real() - e.sign) <= 1e-8);
    }

    ScanOptions fine;
    fine.integration.steps_per_period = 8192;
    const auto s2 = scan_discriminant(p, -2.0, 30.0, 200, fine);
    const auto edges2 = find_band_edges(p, s2, fine.integration);
    REQUIRE(edges2.size() == edges.size());
    for (std::size_t j = 0; j < edges.size(); ++j) {
      CHECK(std::abs(edges2[j].energy - edges[j].energy) <= 1e-8);
      CHECK(edges2[j].sign == edges[j].sign);
    }
  }
}
