#include "nhse/symmetry.hpp"

#include <cmath>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "nhse/error.hpp"

namespace nhse {

namespace {

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

std::set<HopVector> key_union(const TightBindingModel& model) {
  std::set<HopVector> keys;
  for (const auto& [j, t] : model.hoppings()) {
    keys.insert(j);
    keys.insert(negate(j));
  }
  return keys;
}

CMatrix term_or_zero(const TightBindingModel& model, const HopVector& j) {
  const CMatrix* t = model.hopping(j);
  return t ? *t : CMatrix::Zero(model.orbitals(), model.orbitals());
}

void require_side(const CMatrix& u, const TightBindingModel& model) {
  if (u.rows() != model.orbitals()) {
    fail(ErrorCode::DimensionError, "operator is " + std::to_string(u.rows()) + "x" +
                                        std::to_string(u.cols()) + ", model has " +
                                        std::to_string(model.orbitals()) + " orbitals");
  }
}

// Closest unitary in Frobenius norm; empty when x is numerically singular.
std::optional<CMatrix> polar_unitary(const CMatrix& x, double tol) {
  Eigen::JacobiSVD<CMatrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(0) <= 0.0 || sv(sv.size() - 1) <= tol * sv(0)) return std::nullopt;
  return CMatrix(svd.matrixU() * svd.matrixV().adjoint());
}

void normalize_phase(CMatrix& u) {
  const double scale = max_abs(u);
  for (Eigen::Index r = 0; r < u.rows(); ++r) {
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
      if (std::abs(u(r, c)) > 1e-8 * scale) {
        u *= std::conj(u(r, c)) / std::abs(u(r, c));
        u(r, c) = std::abs(u(r, c));
        return;
      }
    }
  }
}

}  // namespace

std::string to_string(SymmetryKind kind) {
  switch (kind) {
    case SymmetryKind::TRS: return "trs";
    case SymmetryKind::PHS: return "phs";
    case SymmetryKind::CS: return "cs";
    case SymmetryKind::TRSdag: return "trs_dagger";
    case SymmetryKind::PHSdag: return "phs_dagger";
    case SymmetryKind::SLS: return "sls";
    case SymmetryKind::PseudoHermitian: return "pseudo_hermitian";
  }
  return "unknown";
}

SymmetryKind parse_symmetry_kind(std::string_view text) {
  for (SymmetryKind kind : kAllSymmetryKinds) {
    if (to_string(kind) == text) return kind;
  }
  fail(ErrorCode::ParseError, "unknown symmetry kind '" + std::string(text) + "'");
}

bool is_antiunitary(SymmetryKind kind) {
  switch (kind) {
    case SymmetryKind::TRS:
    case SymmetryKind::TRSdag:
    case SymmetryKind::CS:
    case SymmetryKind::SLS:
      return true;
    default:
      return false;
  }
}

bool reverses_momentum(SymmetryKind kind) {
  switch (kind) {
    case SymmetryKind::TRS:
    case SymmetryKind::PHS:
    case SymmetryKind::TRSdag:
    case SymmetryKind::PHSdag:
      return true;
    default:
      return false;
  }
}

SymmetryOperator::SymmetryOperator(SymmetryKind k, CMatrix matrix) : kind(k), u(std::move(matrix)) {
  if (u.rows() != u.cols() || u.rows() == 0) {
    fail(ErrorCode::InvariantViolation, "symmetry matrix must be square and non-empty");
  }
  const CMatrix defect = u * u.adjoint() - CMatrix::Identity(u.rows(), u.cols());
  if (max_abs(defect) > 1e-10) {
    fail(ErrorCode::InvariantViolation, "symmetry matrix is not unitary (defect " +
                                            std::to_string(max_abs(defect)) + ")");
  }
}

Complex PartnerPrediction::apply(Complex e) const {
  switch (energy_map) {
    case EnergyMap::Identity: return e;
    case EnergyMap::Negate: return -e;
    case EnergyMap::Conjugate: return std::conj(e);
    case EnergyMap::NegateConjugate: return -std::conj(e);
  }
  return e;
}

std::string to_string(EnergyMap map) {
  switch (map) {
    case EnergyMap::Identity: return "E";
    case EnergyMap::Negate: return "-E";
    case EnergyMap::Conjugate: return "E*";
    case EnergyMap::NegateConjugate: return "-E*";
  }
  return "?";
}

PartnerPrediction partner_prediction(SymmetryKind kind) {
  switch (kind) {
    case SymmetryKind::TRS: return {EnergyMap::Conjugate, +1};
    case SymmetryKind::PHS: return {EnergyMap::Negate, -1};
    case SymmetryKind::CS: return {EnergyMap::NegateConjugate, -1};
    case SymmetryKind::TRSdag: return {EnergyMap::Identity, -1};
    case SymmetryKind::PHSdag: return {EnergyMap::NegateConjugate, +1};
    case SymmetryKind::SLS: return {EnergyMap::Negate, +1};
    case SymmetryKind::PseudoHermitian: return {EnergyMap::Conjugate, -1};
  }
  fail(ErrorCode::InvalidArgument, "unknown symmetry kind");
}

TightBindingModel transform_hopping(const SymmetryOperator& op, const TightBindingModel& model) {
  require_side(op.u, model);
  const CMatrix inverse = op.u.adjoint();
  std::vector<HoppingTerm> terms;
  for (const auto& [j, t] : model.hoppings()) terms.push_back({j, op.u * t * inverse});
  return TightBindingModel(model.name(), model.dimension(), model.orbitals(), terms);
}

std::map<HopVector, CMatrix> symmetry_target(SymmetryKind kind, const TightBindingModel& model) {
  std::map<HopVector, CMatrix> target;
  for (const HopVector& j : key_union(model)) {
    const CMatrix same = term_or_zero(model, j);
    const CMatrix opposite = term_or_zero(model, negate(j));
    switch (kind) {
      case SymmetryKind::TRS: target[j] = same.conjugate(); break;
      case SymmetryKind::PHS: target[j] = -opposite.transpose(); break;
      case SymmetryKind::CS: target[j] = -opposite.adjoint(); break;
      case SymmetryKind::TRSdag: target[j] = opposite.transpose(); break;
      case SymmetryKind::PHSdag: target[j] = -same.conjugate(); break;
      case SymmetryKind::SLS: target[j] = -same; break;
      case SymmetryKind::PseudoHermitian: target[j] = opposite.adjoint(); break;
    }
  }
  return target;
}

SymmetryCheck check_symmetry(const SymmetryOperator& op, const TightBindingModel& model,
                             double tol) {
  if (!(tol > 0.0)) fail(ErrorCode::InvalidArgument, "tolerance must be positive");
  require_side(op.u, model);
  const CMatrix inverse = op.u.adjoint();
  double worst = 0.0;
  for (const auto& [j, target] : symmetry_target(op.kind, model)) {
    const CMatrix image = op.u * term_or_zero(model, j) * inverse;
    worst = std::max(worst, max_abs(image - target));
  }
  return {worst <= tol, worst};
}

SymmetryOperator find_intertwiner(SymmetryKind kind, const TightBindingModel& model, double tol) {
  if (!(tol > 0.0)) fail(ErrorCode::InvalidArgument, "tolerance must be positive");
  const int s = model.orbitals();
  const auto targets = symmetry_target(kind, model);

  // Column-major vec: vec(U t - T U) = (t^T kron I - I kron T) vec(U).
  const CMatrix id = CMatrix::Identity(s, s);
  CMatrix system(static_cast<Eigen::Index>(targets.size()) * s * s, s * s);
  Eigen::Index row = 0;
  for (const auto& [j, target] : targets) {
    const CMatrix t = term_or_zero(model, j);
    for (int a = 0; a < s; ++a) {
      for (int b = 0; b < s; ++b) {
        system.block(row, 0, s * s, s * s).block(a * s, b * s, s, s) =
            t(b, a) * id - (a == b ? target : CMatrix::Zero(s, s));
      }
    }
    row += s * s;
  }

  Eigen::JacobiSVD<CMatrix> svd(system, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double scale = std::max(1.0, sv.size() ? sv(0) : 0.0);
  int rank = 0;
  while (rank < sv.size() && sv(rank) > tol * scale) ++rank;
  const int nullity = s * s - rank;
  if (nullity == 0) {
    fail(ErrorCode::NoIntertwiner,
         "no nonzero solution of the " + to_string(kind) + " intertwining equations");
  }
  const CMatrix basis = svd.matrixV().rightCols(nullity);

  auto reshape = [s](const Eigen::VectorXcd& v) {
    return CMatrix(Eigen::Map<const CMatrix>(v.data(), s, s));
  };
  auto project = [&](const CMatrix& m) {
    const Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(m.data(), s * s);
    return reshape(basis * (basis.adjoint() * v));
  };

  // Candidates: the identity projected into the solution space first so the
  // trivial answer is preferred, then fixed pseudo-random combinations.
  std::vector<CMatrix> candidates{project(id)};
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> gauss;
  for (int c = 0; c < 8; ++c) {
    Eigen::VectorXcd coeffs(nullity);
    for (int i = 0; i < nullity; ++i) coeffs(i) = Complex(gauss(rng), gauss(rng));
    candidates.push_back(reshape(basis * coeffs));
  }
  for (int i = 0; i < nullity; ++i) candidates.push_back(reshape(basis.col(i)));

  for (const CMatrix& start : candidates) {
    auto unitary = polar_unitary(start, 1e-6);
    // Alternate between the solution space and the unitary group.
    for (int iter = 0; unitary && iter < 50; ++iter) {
      const CMatrix projected = project(*unitary);
      if (max_abs(projected - *unitary) <= tol) break;
      unitary = polar_unitary(projected, 1e-6);
    }
    if (!unitary) continue;
    CMatrix u = *unitary;
    normalize_phase(u);
    const CMatrix defect = u * u.adjoint() - id;
    if (max_abs(defect) > 1e-10) {
      Eigen::JacobiSVD<CMatrix> clean(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
      u = clean.matrixU() * clean.matrixV().adjoint();
    }
    SymmetryOperator op(kind, u);
    if (check_symmetry(op, model, 10.0 * tol).holds) return op;
  }
  fail(ErrorCode::NoIntertwiner,
       "solution space of dimension " + std::to_string(nullity) + " contains no unitary for " +
           to_string(kind));
}

}  // namespace nhse
