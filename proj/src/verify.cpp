#include "nhse/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "nhse/error.hpp"

namespace nhse {

namespace {

constexpr double kSymmetryTol = 1e-10;

double degeneracy_tol(const SpectralResult& spectrum, const PartnerCheckOptions& options) {
  return options.degeneracy_tol >= 0.0 ? options.degeneracy_tol
                                       : 1e-6 * std::max(1.0, spectrum.spectral_radius());
}

// Ends of each axis a state occupies: bit 0 the low end, bit 1 the high end.
int ends(const LocalizationReport& r, int axis, double mu_tol) {
  if (std::find(r.bidirectional_axes.begin(), r.bidirectional_axes.end(), axis) !=
      r.bidirectional_axes.end()) {
    return 3;
  }
  const double mu = r.mu_fit[axis];
  if (std::abs(mu) < mu_tol) return 0;
  return mu > 0.0 ? 2 : 1;
}

int flip(int e) { return ((e & 1) << 1) | ((e & 2) >> 1); }

LocalizationReport localize(const SpectralResult& spectrum, std::size_t index,
                            const LocalizationOptions& options) {
  return fit_decay_factor(density_profile(spectrum, index), spectrum.shape, options);
}

bool weak(const LocalizationReport& a, const LocalizationReport& b, double mu_tol) {
  for (std::size_t m = 0; m < a.mu_fit.size(); ++m) {
    const double biggest = std::max(std::abs(a.mu_fit[m]), std::abs(b.mu_fit[m]));
    if (biggest >= mu_tol && biggest < 2.0 * mu_tol) return true;
  }
  return false;
}

// Eigenvalues in sampling order: bulk only, seeded shuffle.
std::vector<std::size_t> sampling_order(const SpectralResult& spectrum, double edge_exclusion,
                                        std::uint64_t seed) {
  const auto& ev = spectrum.eigenvalues;
  std::vector<Complex> extremes;
  auto pick = [&](auto key) {
    extremes.push_back(*std::min_element(ev.begin(), ev.end(), [&](Complex a, Complex b) {
      return key(a) < key(b);
    }));
  };
  pick([](Complex e) { return e.real(); });
  pick([](Complex e) { return -e.real(); });
  pick([](Complex e) { return e.imag(); });
  pick([](Complex e) { return -e.imag(); });
  const double reach = edge_exclusion * spectrum.spectral_diameter();
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    bool edge = false;
    for (Complex x : extremes) edge = edge || std::abs(ev[i] - x) <= reach;
    if (!edge) order.push_back(i);
  }
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

std::vector<std::size_t> group_of(const SpectralResult& spectrum, Complex energy, double tol) {
  return eigenvalues_near(spectrum, energy, tol);
}

}  // namespace

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::SameBoundary:
      return "same_boundary";
    case Verdict::OppositeBoundary:
      return "opposite_boundary";
    case Verdict::Mismatch:
      return "mismatch";
  }
  return "mismatch";
}

Verdict compare_localization(const LocalizationReport& a, const LocalizationReport& b,
                             double mu_tol) {
  if (a.mu_fit.size() != b.mu_fit.size()) {
    fail(ErrorCode::DimensionError, "reports have different dimensions");
  }
  bool any = false;
  bool same = true;
  bool opposite = true;
  bool both_ends = false;
  for (int m = 0; m < static_cast<int>(a.mu_fit.size()); ++m) {
    const int ea = ends(a, m, mu_tol);
    const int eb = ends(b, m, mu_tol);
    if (ea == 0 && eb == 0) continue;
    any = true;
    same = same && ea == eb;
    opposite = opposite && ea == flip(eb);
    both_ends = both_ends || ea == 3 || eb == 3;
  }
  if (!any) return Verdict::Mismatch;
  if (opposite && (!same || both_ends)) return Verdict::OppositeBoundary;
  if (same) return Verdict::SameBoundary;
  return Verdict::Mismatch;
}

PartnerCheckResult check_partner(const SpectralResult& spectrum, const SymmetryOperator& op,
                                 std::size_t index, const PartnerCheckOptions& options) {
  if (!spectrum.eigenvectors) {
    fail(ErrorCode::PreconditionFailed, "partner checks need eigenvectors");
  }
  if (index >= spectrum.eigenvalues.size()) fail(ErrorCode::InvalidArgument, "index out of range");
  const PartnerPrediction prediction = partner_prediction(op.kind);
  PartnerCheckResult out;
  out.energy = spectrum.eigenvalues[index];
  out.expected = prediction.mu_sign > 0 ? Verdict::SameBoundary : Verdict::OppositeBoundary;
  const Complex predicted = prediction.apply(out.energy);
  const std::size_t partner = nearest_eigenvalue(spectrum, predicted);
  if (std::abs(spectrum.eigenvalues[partner] - predicted) > options.match_tol) {
    std::ostringstream msg;
    msg << "no eigenvalue within " << options.match_tol << " of the predicted partner "
        << predicted.real() << (predicted.imag() < 0 ? "" : "+") << predicted.imag() << "i";
    fail(ErrorCode::PartnerNotFound, msg.str());
  }
  out.partner_energy = spectrum.eigenvalues[partner];

  const double dtol = degeneracy_tol(spectrum, options);
  if (std::abs(out.partner_energy - out.energy) <= dtol) {
    const auto group = group_of(spectrum, out.energy, dtol);
    if (group.size() >= 2) {
      const auto split =
          degenerate_group_localize(spectrum, out.energy, dtol, options.localization);
      out.report = split.front();
      out.partner_report = split.back();
    } else {
      out.report = localize(spectrum, index, options.localization);
      out.partner_report = out.report;
    }
  } else {
    out.report = localize(spectrum, index, options.localization);
    out.partner_report = localize(spectrum, partner, options.localization);
  }
  out.verdict = compare_localization(out.report, out.partner_report, options.localization.mu_tol);
  out.weakly_localized = weak(out.report, out.partner_report, options.localization.mu_tol);
  return out;
}

PartnerCheckResult check_partner(const SpectralResult& spectrum, const SymmetryOperator& op,
                                 const EigenSelector& selector,
                                 const PartnerCheckOptions& options) {
  return check_partner(spectrum, op, select_eigenvalue(spectrum, selector), options);
}

std::vector<PartnerCheckResult> table1_check(const TightBindingModel& model,
                                             const SymmetryOperator& op,
                                             const std::vector<int>& sizes, int n_samples,
                                             const PartnerCheckOptions& options) {
  if (!check_symmetry(op, model, kSymmetryTol).holds) {
    fail(ErrorCode::PreconditionFailed,
         "model " + model.name() + " does not have " + to_string(op.kind) + " with this operator");
  }
  return table1_check(model, op, obc_spectrum(model, sizes), n_samples, options);
}

std::vector<PartnerCheckResult> table1_check(const TightBindingModel& model,
                                             const SymmetryOperator& op,
                                             const SpectralResult& spectrum, int n_samples,
                                             const PartnerCheckOptions& options) {
  if (!check_symmetry(op, model, kSymmetryTol).holds) {
    fail(ErrorCode::PreconditionFailed,
         "model " + model.name() + " does not have " + to_string(op.kind) + " with this operator");
  }
  if (n_samples < 1) fail(ErrorCode::InvalidArgument, "n_samples must be positive");
  std::vector<PartnerCheckResult> out;
  for (std::size_t index : sampling_order(spectrum, options.edge_exclusion, options.seed)) {
    if (static_cast<int>(out.size()) >= n_samples) break;
    try {
      const LocalizationReport own = localize(spectrum, index, options.localization);
      if (own.cls == LocalizationClass::Extended) continue;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DegenerateFit) continue;
      throw;
    }
    out.push_back(check_partner(spectrum, op, index, options));
  }
  return out;
}

double agreement_rate(const std::vector<PartnerCheckResult>& results) {
  if (results.empty()) return 0.0;
  const auto hits = std::count_if(results.begin(), results.end(),
                                  [](const PartnerCheckResult& r) { return r.verdict == r.expected; });
  return static_cast<double>(hits) / static_cast<double>(results.size());
}

BidirectionalSummary bidirectional_scan(const TightBindingModel& model,
                                        const std::vector<int>& sizes,
                                        const ScanOptions& options) {
  return bidirectional_scan(model, obc_spectrum(model, sizes), options);
}

BidirectionalSummary bidirectional_scan(const TightBindingModel& model,
                                        const SpectralResult& spectrum,
                                        const ScanOptions& options) {
  if (model.dimension() > 2) {
    fail(ErrorCode::DimensionError, "bidirectional scans support one or two dimensions");
  }
  const SymmetryOperator op = [&] {
    try {
      return find_intertwiner(SymmetryKind::TRSdag, model, kSymmetryTol);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoIntertwiner) throw;
      fail(ErrorCode::PreconditionFailed, "model " + model.name() + " has no TRS-dagger symmetry");
    }
  }();
  const LocalizationOptions& lopt = options.partner.localization;
  const double dtol = degeneracy_tol(spectrum, options.partner);

  BidirectionalSummary summary;
  std::set<std::size_t> done;
  for (std::size_t i = 0; i < spectrum.eigenvalues.size(); ++i) {
    if (done.count(i)) continue;
    const Complex e = spectrum.eigenvalues[i];
    const auto group = group_of(spectrum, e, dtol);
    if (group.size() >= 2) {
      const auto split = degenerate_group_localize(spectrum, e, dtol, lopt);
      const bool apart =
          compare_localization(split.front(), split.back(), lopt.mu_tol) == Verdict::OppositeBoundary;
      for (std::size_t g = 0; g < group.size(); ++g) {
        done.insert(group[g]);
        ScanEntry entry{spectrum.eigenvalues[group[g]], split[std::min(g, split.size() - 1)], apart};
        summary.states.push_back(std::move(entry));
      }
      continue;
    }
    done.insert(i);
    ScanEntry entry;
    entry.energy = e;
    try {
      entry.report = localize(spectrum, i, lopt);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::DegenerateFit) throw;
      entry.report.cls = LocalizationClass::Unknown;
    }
    entry.bidirectional = entry.report.cls == LocalizationClass::Bidirectional;
    summary.states.push_back(std::move(entry));
  }

  // nu sample: requested energies first, then a seeded draw of the rest.
  std::vector<std::size_t> picks;
  for (Complex e : options.energies) {
    const std::size_t best = nearest_eigenvalue(spectrum, e);
    std::size_t state = 0;
    for (std::size_t s = 0; s < summary.states.size(); ++s) {
      if (summary.states[s].energy == spectrum.eigenvalues[best]) state = s;
    }
    picks.push_back(state);
  }
  // Edge-of-spectrum states are left out, as in table1 sampling.
  std::vector<std::size_t> state_of(spectrum.eigenvalues.size());
  for (std::size_t s = 0; s < summary.states.size(); ++s) {
    for (std::size_t i = 0; i < spectrum.eigenvalues.size(); ++i) {
      if (spectrum.eigenvalues[i] == summary.states[s].energy) state_of[i] = s;
    }
  }
  const std::size_t wanted = static_cast<std::size_t>(options.nu_samples) + options.energies.size();
  for (std::size_t i : sampling_order(spectrum, options.partner.edge_exclusion, options.seed)) {
    if (picks.size() >= wanted) break;
    const std::size_t s = state_of[i];
    if (std::find(picks.begin(), picks.end(), s) == picks.end()) picks.push_back(s);
  }

  int defined = 0;
  int agreeing = 0;
  for (std::size_t s : picks) {
    const ScanEntry& state = summary.states[s];
    NuSample sample;
    sample.energy = state.energy;
    sample.bidirectional = state.bidirectional;
    auto absorb = [&](const std::vector<NuRow>& rows) {
      for (const NuRow& row : rows) {
        if (!row.report.nu) {
          sample.defined = false;
        } else if (*row.report.nu != 0) {
          sample.nonzero = true;
        }
      }
      sample.tables.push_back(rows);
    };
    try {
      if (model.dimension() == 1) {
        absorb({NuRow{0.0, nu_invariant(model, state.energy, 0, {}, options.nu_grid, op)}});
      } else {
        for (int axis = 0; axis < 2; ++axis) {
          absorb(nu_table(model, state.energy, axis, options.nu_points, options.nu_grid, op));
        }
      }
    } catch (const Error& err) {
      if (err.code() != ErrorCode::BranchAmbiguity && err.code() != ErrorCode::NonIntegerPhase &&
          err.code() != ErrorCode::PairingFailure) {
        throw;
      }
      sample.defined = false;
    }
    if (sample.defined) {
      ++defined;
      sample.agrees = sample.nonzero == sample.bidirectional;
      if (sample.agrees) {
        ++agreeing;
      } else {
        summary.disagreements.push_back(sample.energy);
      }
    }
    summary.nu_samples.push_back(std::move(sample));
  }
  summary.agreement_rate = defined > 0 ? static_cast<double>(agreeing) / defined : 0.0;
  return summary;
}

}  // namespace nhse
