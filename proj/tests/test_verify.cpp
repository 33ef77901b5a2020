#include "doctest.h"
#include "nhse/model_zoo.hpp"
#include "nhse/verify.hpp"
#include "support.hpp"

using namespace nhse;
using namespace test_support;

namespace {

LocalizationReport directional(std::vector<double> mu) {
  LocalizationReport r;
  r.mu_fit = std::move(mu);
  r.mu_stderr.assign(r.mu_fit.size(), 0.0);
  r.cls = LocalizationClass::Directional;
  for (double m : r.mu_fit) r.signs.push_back(std::abs(m) < 0.02 ? 0 : (m > 0 ? 1 : -1));
  return r;
}

LocalizationReport bidirectional(std::vector<double> mu, std::vector<int> axes) {
  LocalizationReport r = directional(std::move(mu));
  r.cls = LocalizationClass::Bidirectional;
  r.bidirectional_axes = std::move(axes);
  return r;
}

}  // namespace

TEST_CASE("localization comparison") {
  const double tol = 0.02;
  CHECK(compare_localization(directional({0.3, -0.2}), directional({0.25, -0.4}), tol) ==
        Verdict::SameBoundary);
  CHECK(compare_localization(directional({0.3, -0.2}), directional({-0.3, 0.2}), tol) ==
        Verdict::OppositeBoundary);
  CHECK(compare_localization(directional({0.3, -0.2}), directional({-0.3, -0.2}), tol) ==
        Verdict::Mismatch);
  // an axis where neither state is localized is ignored
  CHECK(compare_localization(directional({0.3, 0.001}), directional({-0.3, -0.005}), tol) ==
        Verdict::OppositeBoundary);
  CHECK(compare_localization(directional({0.001}), directional({0.0}), tol) == Verdict::Mismatch);
  // a state at both ends is its own opposite-boundary partner
  const auto both = bidirectional({0.0}, {0});
  CHECK(compare_localization(both, both, tol) == Verdict::OppositeBoundary);
  CHECK(compare_localization(both, directional({0.3}), tol) == Verdict::Mismatch);
  CHECK(error_code_of([&] { compare_localization(directional({0.1}), directional({0.1, 0.2}), tol); }) ==
        ErrorCode::DimensionError);
}

TEST_CASE("TRS partners in eq16 stay at the same corner") {
  const auto model = build("eq16");
  const SymmetryOperator op(SymmetryKind::TRS, CMatrix::Identity(2, 2));
  const auto results = table1_check(model, op, std::vector<int>{16, 16}, 60);
  CHECK(results.size() == 60);
  CHECK(agreement_rate(results) >= 0.9);
  for (const PartnerCheckResult& r : results) {
    CHECK(std::abs(r.partner_energy - std::conj(r.energy)) <= 1e-6);
    CHECK(r.expected == Verdict::SameBoundary);
  }
}

TEST_CASE("sampling is seeded") {
  const auto model = build("eq16");
  const SymmetryOperator op(SymmetryKind::TRS, CMatrix::Identity(2, 2));
  const SpectralResult spectrum = obc_spectrum(model, {12, 12});
  PartnerCheckOptions a, b;
  a.seed = b.seed = 7;
  const auto ra = table1_check(model, op, spectrum, 10, a);
  const auto rb = table1_check(model, op, spectrum, 10, b);
  REQUIRE(ra.size() == rb.size());
  for (std::size_t i = 0; i < ra.size(); ++i) CHECK(ra[i].energy == rb[i].energy);
  b.seed = 8;
  const auto rc = table1_check(model, op, spectrum, 10, b);
  bool differs = false;
  for (std::size_t i = 0; i < ra.size(); ++i) differs = differs || ra[i].energy != rc[i].energy;
  CHECK(differs);
}

TEST_CASE("TRS-dagger partners") {
  CMatrix sx(2, 2);
  sx << 0, 1, 1, 0;
  const SymmetryOperator op(SymmetryKind::TRSdag, sx);
  SUBCASE("degenerate pair at gamma = 0 splits to opposite ends") {
    const SpectralResult s = obc_spectrum(build("eq18", {{"gamma", 0.0}}), {40});
    const auto r = check_partner(s, op, nearest_eigenvalue(s, 2.53));
    CHECK(r.expected == Verdict::OppositeBoundary);
    CHECK(r.verdict == Verdict::OppositeBoundary);
    CHECK(r.report.mu_fit[0] * r.partner_report.mu_fit[0] < 0.0);
  }
  SUBCASE("bidirectional state is its own partner") {
    const SpectralResult s = obc_spectrum(build("eq18", {{"gamma", 0.1}}), {40});
    const auto r = check_partner(s, op, EigenSelector{Complex(1.87, 0.64)});
    CHECK(r.partner_energy == r.energy);
    CHECK(r.report.cls == LocalizationClass::Bidirectional);
    CHECK(r.verdict == Verdict::OppositeBoundary);
  }
}

TEST_CASE("partner errors") {
  SpectralResult s;
  s.shape = {8};
  s.orbitals = 1;
  s.eigenvalues = {Complex(1.0, 0.5)};
  s.eigenvectors = CMatrix::Constant(8, 1, 1.0 / std::sqrt(8.0));
  const SymmetryOperator trs(SymmetryKind::TRS, CMatrix::Identity(1, 1));
  CHECK(error_code_of([&] { check_partner(s, trs, 0); }) == ErrorCode::PartnerNotFound);
  CHECK(error_code_of([&] { check_partner(s, trs, 3); }) == ErrorCode::InvalidArgument);

  std::mt19937_64 rng(1);
  const auto random = random_model(rng, 1, 1);
  CHECK(error_code_of([&] { table1_check(random, trs, std::vector<int>{10}, 5); }) ==
        ErrorCode::PreconditionFailed);
}

TEST_CASE("agreement rate") {
  CHECK(agreement_rate({}) == 0.0);
  PartnerCheckResult good, bad;
  good.verdict = good.expected = Verdict::SameBoundary;
  bad.verdict = Verdict::Mismatch;
  CHECK(agreement_rate({good, bad, good, good}) == doctest::Approx(0.75));
}

TEST_CASE("bidirectional scan of the split two-chain model") {
  ScanOptions options;
  options.energies = {Complex(1.87, 0.64)};
  options.nu_samples = 12;
  const BidirectionalSummary s = bidirectional_scan(build("eq18"), {40}, options);
  CHECK(s.states.size() == 80);
  REQUIRE(s.nu_samples.size() == 13);
  const NuSample& quoted = s.nu_samples.front();
  CHECK(std::abs(quoted.energy - Complex(1.87, 0.64)) < 0.02);
  CHECK(quoted.bidirectional);
  CHECK(quoted.defined);
  CHECK(quoted.nonzero);
  // the real-axis tips are edge states and never drawn
  for (const NuSample& n : s.nu_samples) CHECK(std::abs(std::abs(n.energy.real()) - 3.0727) > 0.01);
}

TEST_CASE("property: classifier agrees with nu on bulk states") {
  ScanOptions options;
  options.nu_samples = 80;
  const BidirectionalSummary s = bidirectional_scan(build("eq18"), {40}, options);
  CAPTURE(s.disagreements.size());
  CHECK(s.agreement_rate >= 0.95);
}

TEST_CASE("bidirectional scan needs TRS-dagger") {
  CHECK(error_code_of([] { bidirectional_scan(build("eq16"), {8, 8}); }) == ErrorCode::PreconditionFailed);
}
