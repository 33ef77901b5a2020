#include <numbers>

#include "doctest.h"
#include "nhse/amoeba.hpp"
#include "nhse/band_topology.hpp"
#include "nhse/model_zoo.hpp"
#include "support.hpp"

using namespace nhse;
using namespace test_support;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int loop_band_count(const std::vector<BandLoop>& loops) {
  int n = 0;
  for (const BandLoop& l : loops) n += l.multiplicity;
  return n;
}

}  // namespace

TEST_CASE("Hatano-Nelson single loop") {
  const auto loops = track_bands(hatano_nelson(1.0, 2.0), 0, {}, {0.0}, 256);
  REQUIRE(loops.size() == 1);
  const BandLoop& l = loops[0];
  CHECK(l.multiplicity == 1);
  CHECK(l.samples.size() == 257);
  CHECK(l.samples.front() == l.samples.back());
  CHECK(l.at(3) == l.at(3 + 256));
  for (int n = 0; n < 256; n += 17) {
    const double k = kTwoPi * n / 256;
    CHECK(std::abs(l.at(n) - Complex(3 * std::cos(k), -std::sin(k))) < 1e-12);
  }
  // bounding-box diagonal of the 6 x 2 ellipse
  CHECK(l.diameter() == doctest::Approx(std::sqrt(40.0)).epsilon(1e-6));
  CHECK(band_winding(l, 0.0) == -1);
  CHECK(band_winding(l, Complex(5.0, 0.0)) == 0);
}

TEST_CASE("band winding on and off the loop") {
  BandLoop segment;
  segment.grid = 256;
  // folded real segment: k -> 2 cos k
  for (int n = 0; n <= 256; ++n) segment.samples.push_back(2.0 * std::cos(kTwoPi * n / 256));
  CHECK(band_winding(segment, 0.5) == 0);

  BandLoop circle;
  circle.grid = 256;
  for (int n = 0; n <= 256; ++n) circle.samples.push_back(std::polar(1.0, kTwoPi * n / 256));
  CHECK(band_winding(circle, 0.0) == 1);
  CHECK(band_winding(circle, 3.0) == 0);
  CHECK_FALSE(band_winding(circle, circle.samples[5]).has_value());

  BandLoop coarse;
  coarse.grid = 4;
  for (int n = 0; n <= 4; ++n) coarse.samples.push_back(std::polar(1.0, kTwoPi * n / 4));
  CHECK(error_code_of([&] { band_winding(coarse, Complex(0.0, 0.9)); }) == ErrorCode::NonIntegerPhase);
}

TEST_CASE("s47 loops follow the closed-form bands") {
  const ParameterMap params{{"gamma", 2.0}};
  const auto model = build("s47", params);
  const double ky = 0.7;
  const auto loops = track_bands(model, 0, {ky}, {0.0, 0.0}, 256);
  CHECK(loop_band_count(loops) == 2);
  for (const BandLoop& l : loops) {
    for (int n = 0; n < 256 * l.multiplicity; n += 13) {
      const auto [a, b] = analytic_bands_s47(kTwoPi * n / 256, ky, params);
      CHECK(std::min(std::abs(l.at(n) - a), std::abs(l.at(n) - b)) < 1e-9);
    }
  }
}

TEST_CASE("property: per-band windings sum to the total winding") {
  std::mt19937_64 rng(808);
  std::normal_distribution<double> g(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 40 && checked < 20; ++trial) {
    const auto model = random_model(rng, 1, 2);
    const Complex e(g(rng), g(rng));
    const WindingReport total = winding_number(model, e, {0.0}, 0, {}, 256);
    if (!total.defined()) continue;
    std::vector<BandLoop> loops;
    try {
      loops = track_bands(model, 0, {}, {0.0}, 256);
    } catch (const Error& err) {
      if (err.code() == ErrorCode::BranchAmbiguity) continue;
      throw;
    }
    int sum = 0;
    bool defined = true;
    for (const BandLoop& l : loops) {
      const auto w = band_winding(l, e);
      defined = defined && w.has_value();
      if (w) sum += *w;
    }
    if (!defined) continue;
    ++checked;
    CHECK(sum == *total.value);
  }
  CHECK(checked == 20);
}

TEST_CASE("TRS-dagger pairing in eq18") {
  const auto model = build("eq18", {{"gamma", 0.1}});
  const auto loops = track_bands(model, 0, {}, {0.0}, 256);
  const BandPairing p = pair_bands_trs_dagger(loops);
  CHECK(2 * p.pairs.size() + p.self_paired.size() == loops.size());
  // labels may swap at the exceptional points sin k = +-gamma
  for (double a : p.agreement) CHECK(a >= 0.5);
}

TEST_CASE("nu in the two-chain model") {
  const auto degenerate = build("eq18", {{"gamma", 0.0}});
  const NuReport a = nu_invariant(degenerate, 2.53, 0, {}, 256);
  REQUIRE(a.nu.has_value());
  CHECK(*a.nu == 1);
  const auto split = build("eq18", {{"gamma", 0.1}});
  const NuReport b = nu_invariant(split, Complex(1.87, 0.64), 0, {}, 256);
  REQUIRE(b.nu.has_value());
  CHECK(*b.nu == 1);
  // outside every loop
  CHECK(nu_invariant(split, Complex(10.0, 0.0), 0, {}, 256).nu == 0);
}

TEST_CASE("nu table in s47") {
  const auto model = build("s47");
  const auto extended = nu_table(model, -8.09, 0, 8, 256);
  REQUIRE(extended.size() == 8);
  CHECK(extended[0].k_transverse == doctest::Approx(-std::numbers::pi));
  for (const NuRow& row : extended) CHECK(row.report.nu == 0);
  const auto bidirectional = nu_table(model, Complex(2.65, 1.0), 1, 16, 256);
  int nonzero = 0;
  for (const NuRow& row : bidirectional) nonzero += row.report.nu.value_or(0) != 0;
  CHECK(nonzero > 0);
}

TEST_CASE("nu needs TRS-dagger") {
  CHECK(error_code_of([] { nu_invariant(hatano_nelson(1, 2), 0.0, 0, {}, 256); }) ==
        ErrorCode::PreconditionFailed);
  CHECK(error_code_of([] { nu_table(build("eq18"), 0.0, 0, 4, 256); }) == ErrorCode::DimensionError);
}

TEST_CASE("property: TRS-dagger kills the PBC winding") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (const char* id : {"eq18", "s47"}) {
    const auto model = build(id);
    for (int trial = 0; trial < 16; ++trial) {
      const Complex e(u(rng), u(rng));
      for (int axis = 0; axis < model.dimension(); ++axis) {
        const std::vector<double> transverse =
            model.dimension() == 2 ? std::vector<double>{0.5 * u(rng)} : std::vector<double>{};
        CHECK(pbc_winding_vanishes_trs_dagger(model, e, axis, transverse, 256));
      }
    }
  }
}
