#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>

#include "nhse/lattice_model.hpp"

namespace nhse {

enum class SymmetryKind { TRS, PHS, CS, TRSdag, PHSdag, SLS, PseudoHermitian };

inline constexpr std::array<SymmetryKind, 7> kAllSymmetryKinds = {
    SymmetryKind::TRS,    SymmetryKind::PHS, SymmetryKind::CS,
    SymmetryKind::TRSdag, SymmetryKind::PHSdag, SymmetryKind::SLS,
    SymmetryKind::PseudoHermitian};

// Lowercase serial names: trs, phs, cs, trs_dagger, phs_dagger, sls,
// pseudo_hermitian.
std::string to_string(SymmetryKind kind);
SymmetryKind parse_symmetry_kind(std::string_view text);

// Whether the operator R carries complex conjugation.
bool is_antiunitary(SymmetryKind kind);

// Whether the Bloch relation pairs k with -k (otherwise k with itself).
bool reverses_momentum(SymmetryKind kind);

struct SymmetryOperator {
  SymmetryKind kind;
  CMatrix u;

  // Throws InvariantViolation unless ||U U^dagger - I||_max <= 1e-10.
  SymmetryOperator(SymmetryKind kind, CMatrix u);
};

enum class EnergyMap { Identity, Negate, Conjugate, NegateConjugate };

struct PartnerPrediction {
  EnergyMap energy_map;
  int mu_sign;

  Complex apply(Complex e) const;
};

std::string to_string(EnergyMap map);

PartnerPrediction partner_prediction(SymmetryKind kind);

// Hopping map j -> U t_j U^{-1}.
TightBindingModel transform_hopping(const SymmetryOperator& op, const TightBindingModel& model);

// Kind-specific right-hand side over the union of j and -j:
//   trs t_j*      phs -t_{-j}^T   cs -t_{-j}^dagger   trs_dagger t_{-j}^T
//   phs_dagger -t_j*   sls -t_j   pseudo_hermitian t_{-j}^dagger
// Missing terms count as zero.
std::map<HopVector, CMatrix> symmetry_target(SymmetryKind kind, const TightBindingModel& model);

struct SymmetryCheck {
  bool holds;
  double max_residual;
};

SymmetryCheck check_symmetry(const SymmetryOperator& op, const TightBindingModel& model,
                             double tol);

// Unitary U with U t_j U^{-1} = target_j for every j, found from the null
// space of the stacked linear system. Phase-normalized so the first nonzero
// entry (row-major) is real positive. Throws NoIntertwiner.
SymmetryOperator find_intertwiner(SymmetryKind kind, const TightBindingModel& model, double tol);

}  // namespace nhse
