#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nhse/band_topology.hpp"
#include "nhse/spectral.hpp"
#include "nhse/symmetry.hpp"

namespace nhse {

enum class Verdict { SameBoundary, OppositeBoundary, Mismatch };

const char* to_string(Verdict verdict);

struct PartnerCheckResult {
  Complex energy;
  Complex partner_energy;
  LocalizationReport report;
  LocalizationReport partner_report;
  Verdict verdict = Verdict::Mismatch;
  Verdict expected = Verdict::SameBoundary;
  // Some compared axis has both |mu| below twice mu_tol.
  bool weakly_localized = false;
};

struct PartnerCheckOptions {
  // Absolute distance between the predicted and the found partner.
  double match_tol = 1e-6;
  // Eigenvalues closer than this form one degenerate group; negative means
  // 1e-6 times the spectral radius.
  double degeneracy_tol = -1.0;
  // Fraction of the spectral diameter around the extremal eigenvalues that
  // is left out of sampling.
  double edge_exclusion = 0.02;
  std::uint64_t seed = 0;
  LocalizationOptions localization;
};

// Sign-pattern comparison on the axes where either state is localized.
// Bidirectional axes count as occupying both ends.
Verdict compare_localization(const LocalizationReport& a, const LocalizationReport& b,
                             double mu_tol);

// Partner check for one OBC eigenvalue. A TRS-dagger partner that is the
// eigenvalue itself is resolved by splitting its degenerate group, or by
// the state's own profile when it is not degenerate. Throws PartnerNotFound.
PartnerCheckResult check_partner(const SpectralResult& spectrum, const SymmetryOperator& op,
                                 std::size_t index, const PartnerCheckOptions& options = {});

// Same as above with the eigenvalue picked by selector.
PartnerCheckResult check_partner(const SpectralResult& spectrum, const SymmetryOperator& op,
                                 const EigenSelector& selector,
                                 const PartnerCheckOptions& options = {});

// Checks up to n_samples localized bulk modes, drawn in seeded random order.
// Throws PreconditionFailed when the model does not have the symmetry.
std::vector<PartnerCheckResult> table1_check(const TightBindingModel& model,
                                             const SymmetryOperator& op,
                                             const std::vector<int>& sizes, int n_samples,
                                             const PartnerCheckOptions& options = {});

// Variant on an already computed spectrum of `model`.
std::vector<PartnerCheckResult> table1_check(const TightBindingModel& model,
                                             const SymmetryOperator& op,
                                             const SpectralResult& spectrum, int n_samples,
                                             const PartnerCheckOptions& options = {});

// Fraction of results whose verdict equals the expected one.
double agreement_rate(const std::vector<PartnerCheckResult>& results);

struct ScanEntry {
  Complex energy;
  LocalizationReport report;
  // Classified as bidirectional, or a degenerate group whose split states
  // sit at opposite ends of some axis.
  bool bidirectional = false;
};

struct NuSample {
  Complex energy;
  bool bidirectional = false;
  // 1D: a single row. 2D: one table per axis, rows over the transverse momentum.
  std::vector<std::vector<NuRow>> tables;
  // Every nu in the tables is defined.
  bool defined = true;
  bool nonzero = false;
  bool agrees = true;
};

struct BidirectionalSummary {
  std::vector<ScanEntry> states;
  std::vector<NuSample> nu_samples;
  // Share of defined nu samples where (nu != 0) matches the classifier.
  double agreement_rate = 1.0;
  std::vector<Complex> disagreements;
};

struct ScanOptions {
  // Seeded draw of bulk states on top of `energies`; states within
  // partner.edge_exclusion of the spectral extremes are never drawn.
  int nu_samples = 8;
  int nu_grid = 256;
  // Transverse momenta per table in 2D.
  int nu_points = 16;
  std::uint64_t seed = 0;
  // Energies always included in the nu sample.
  std::vector<Complex> energies;
  PartnerCheckOptions partner;
};

BidirectionalSummary bidirectional_scan(const TightBindingModel& model,
                                        const std::vector<int>& sizes,
                                        const ScanOptions& options = {});

BidirectionalSummary bidirectional_scan(const TightBindingModel& model,
                                        const SpectralResult& spectrum,
                                        const ScanOptions& options = {});

}  // namespace nhse
