#include <numbers>

#include "doctest.h"
#include "nhse/symmetry.hpp"
#include "support.hpp"

using namespace nhse;
using namespace test_support;

namespace {

// Real symmetric orthogonal U (a Householder reflection): U = U^T = U^* = U^-1,
// so every symmetrization below is an involution.
CMatrix random_reflection(std::mt19937_64& rng, int s) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd v(s);
  for (int i = 0; i < s; ++i) v(i) = g(rng);
  v.normalize();
  return (Eigen::MatrixXd::Identity(s, s) - 2.0 * v * v.transpose()).cast<Complex>();
}

TightBindingModel symmetrize(SymmetryKind kind, const CMatrix& u, const TightBindingModel& model) {
  const auto target = symmetry_target(kind, model);
  std::vector<HoppingTerm> terms;
  for (const auto& [j, t] : target) {
    const CMatrix* own = model.hopping(j);
    const CMatrix mine = own ? *own : CMatrix::Zero(model.orbitals(), model.orbitals());
    const CMatrix sym = 0.5 * (mine + u.adjoint() * t * u);
    if (sym.cwiseAbs().maxCoeff() > 0.0) terms.push_back({j, sym});
  }
  return TightBindingModel("sym", model.dimension(), model.orbitals(), terms);
}

// Bloch-level form of each symmetry: U H(k) U^-1 expressed through H(+-k).
CMatrix bloch_relation(SymmetryKind kind, const TightBindingModel& m, const std::vector<double>& k) {
  std::vector<double> minus_k = k;
  for (double& x : minus_k) x = -x;
  const CMatrix h = bloch_hamiltonian(m, k);
  const CMatrix hm = bloch_hamiltonian(m, minus_k);
  switch (kind) {
    case SymmetryKind::TRS: return hm.conjugate();
    case SymmetryKind::PHS: return -hm.transpose();
    case SymmetryKind::CS: return -h.adjoint();
    case SymmetryKind::TRSdag: return hm.transpose();
    case SymmetryKind::PHSdag: return -hm.conjugate();
    case SymmetryKind::SLS: return -h;
    case SymmetryKind::PseudoHermitian: return h.adjoint();
  }
  return h;
}

}  // namespace

TEST_CASE("partner table") {
  struct Row {
    SymmetryKind kind;
    Complex partner;
    int mu_sign;
  };
  const Complex e(1.25, 0.5);
  const Row rows[] = {
      {SymmetryKind::TRS, std::conj(e), +1},       {SymmetryKind::PHS, -e, -1},
      {SymmetryKind::CS, -std::conj(e), -1},       {SymmetryKind::TRSdag, e, -1},
      {SymmetryKind::PHSdag, -std::conj(e), +1},   {SymmetryKind::SLS, -e, +1},
      {SymmetryKind::PseudoHermitian, std::conj(e), -1},
  };
  for (const Row& row : rows) {
    CAPTURE(to_string(row.kind));
    const PartnerPrediction p = partner_prediction(row.kind);
    CHECK(p.apply(e) == row.partner);
    CHECK(p.mu_sign == row.mu_sign);
  }
}

TEST_CASE("symmetry names round-trip") {
  for (SymmetryKind kind : kAllSymmetryKinds) CHECK(parse_symmetry_kind(to_string(kind)) == kind);
  CHECK(to_string(SymmetryKind::TRSdag) == "trs_dagger");
  CHECK(error_code_of([] { parse_symmetry_kind("bogus"); }) == ErrorCode::ParseError);
}

TEST_CASE("antiunitary and momentum flags") {
  // classification of the operator R, not of the hopping rule
  CHECK(is_antiunitary(SymmetryKind::TRS));
  CHECK(is_antiunitary(SymmetryKind::TRSdag));
  CHECK(is_antiunitary(SymmetryKind::CS));
  CHECK(is_antiunitary(SymmetryKind::SLS));
  CHECK_FALSE(is_antiunitary(SymmetryKind::PHS));
  CHECK_FALSE(is_antiunitary(SymmetryKind::PHSdag));
  CHECK_FALSE(is_antiunitary(SymmetryKind::PseudoHermitian));
  CHECK(reverses_momentum(SymmetryKind::TRS));
  CHECK(reverses_momentum(SymmetryKind::PHS));
  CHECK(reverses_momentum(SymmetryKind::TRSdag));
  CHECK(reverses_momentum(SymmetryKind::PHSdag));
  CHECK_FALSE(reverses_momentum(SymmetryKind::CS));
}

TEST_CASE("operators must be unitary") {
  CMatrix bad = CMatrix::Identity(2, 2);
  bad(0, 0) = 2.0;
  CHECK(error_code_of([&] { SymmetryOperator(SymmetryKind::TRS, bad); }) ==
        ErrorCode::InvariantViolation);
}

TEST_CASE("property: symmetrized models satisfy the Bloch relation") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  for (SymmetryKind kind : kAllSymmetryKinds) {
    for (int d = 1; d <= 2; ++d) {
      CAPTURE(to_string(kind));
      CAPTURE(d);
      const CMatrix u = random_reflection(rng, 3);
      const auto model = symmetrize(kind, u, random_model(rng, d, 3));
      const SymmetryOperator op(kind, u);
      CHECK(check_symmetry(op, model, 1e-10).holds);
      for (int trial = 0; trial < 4; ++trial) {
        std::vector<double> k(d);
        for (double& x : k) x = angle(rng);
        const CMatrix lhs = u * bloch_hamiltonian(model, k) * u.adjoint();
        CHECK(max_abs(lhs - bloch_relation(kind, model, k)) < 1e-10);
      }
    }
  }
}

TEST_CASE("random models break every symmetry") {
  std::mt19937_64 rng(12);
  const auto model = random_model(rng, 1, 2);
  for (SymmetryKind kind : kAllSymmetryKinds) {
    CAPTURE(to_string(kind));
    const SymmetryOperator op(kind, CMatrix::Identity(2, 2));
    const SymmetryCheck c = check_symmetry(op, model, 1e-10);
    CHECK_FALSE(c.holds);
    CHECK(c.max_residual > 1e-3);
    CHECK(error_code_of([&] { find_intertwiner(kind, model, 1e-8); }) == ErrorCode::NoIntertwiner);
  }
}

TEST_CASE("property: the intertwiner is recovered up to the null space") {
  std::mt19937_64 rng(44);
  for (SymmetryKind kind : kAllSymmetryKinds) {
    CAPTURE(to_string(kind));
    const CMatrix u = random_reflection(rng, 2);
    const auto model = symmetrize(kind, u, random_model(rng, 2, 2));
    const SymmetryOperator found = find_intertwiner(kind, model, 1e-8);
    CHECK(max_abs(found.u * found.u.adjoint() - CMatrix::Identity(2, 2)) < 1e-10);
    CHECK(check_symmetry(found, model, 1e-8).holds);
    // phase convention: first nonzero entry is real and positive
    for (int i = 0; i < 4; ++i) {
      const Complex z = found.u(i / 2, i % 2);
      if (std::abs(z) > 1e-12) {
        CHECK(std::abs(z.imag()) < 1e-12);
        CHECK(z.real() > 0.0);
        break;
      }
    }
  }
}

TEST_CASE("transform_hopping conjugates every term") {
  std::mt19937_64 rng(2);
  const auto model = random_model(rng, 1, 3);
  const CMatrix u = random_unitary(rng, 3);
  const auto moved = transform_hopping(SymmetryOperator(SymmetryKind::SLS, u), model);
  for (const auto& [j, t] : model.hoppings()) {
    CHECK(max_abs(*moved.hopping(j) - u * t * u.adjoint()) < 1e-12);
  }
}
