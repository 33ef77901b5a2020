#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "nhse/amoeba.hpp"
#include "nhse/lattice_model.hpp"
#include "nhse/symmetry.hpp"

namespace nhse {

// One PBC band followed along `axis` until it closes. Samples sit at
// k = 2 pi n / grid for n = 0 .. multiplicity*grid; the final sample
// repeats the first.
struct BandLoop {
  std::vector<Complex> samples;
  int multiplicity = 1;
  int axis = 0;
  std::vector<double> transverse;
  int grid = 0;

  double diameter() const;
  // Sample at cycle position n, taken modulo multiplicity * grid.
  Complex at(long long n) const;
};

struct TrackOptions {
  double ambiguity_ratio = 10.0;  // alternative matching must cost this much more
  int max_bisections = 6;
  bool detour = true;             // step around exceptional points via Im k > 0
};

// Loops of the eigenvalues of H(e^{mu + i k}) along `axis`. Throws
// BranchAmbiguity when matching stays ambiguous at both grid and 4*grid.
std::vector<BandLoop> track_bands(const TightBindingModel& model, int axis,
                                  const std::vector<double>& transverse,
                                  const std::vector<double>& mu, int grid,
                                  const TrackOptions& options = {});

// Winding of the loop about E from unwrapped phase increments. Empty when a
// sample lies within ill_tol * max(1, diameter) of E; NonIntegerPhase when
// a single increment exceeds pi/2 (loop under-resolved near E).
std::optional<int> band_winding(const BandLoop& loop, Complex energy, double ill_tol = 1e-6);

struct BandPairing {
  // (index in loops, index in mirror); self pairs are excluded here.
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> self_paired;
  // Fraction of k-points where E_q(k) matches E_p(-k), per recorded pair.
  std::vector<double> agreement;
};

// Pairs loops at k_perp with loops of the mirror slice at -k_perp so that
// E_q(k) = E_p(-k) within pair_tol (negative: 1e-6 * spectral diameter).
// When the two slices coincide, pairs are unordered and a loop may be its
// own image. Throws PairingFailure.
BandPairing pair_bands_trs_dagger(const std::vector<BandLoop>& loops,
                                  const std::vector<BandLoop>& mirror, double pair_tol = -1.0);
BandPairing pair_bands_trs_dagger(const std::vector<BandLoop>& loops, double pair_tol = -1.0);

struct NuReport {
  std::optional<int> nu;  // empty: some band winding is ill defined at E
  std::vector<std::pair<int, int>> per_pair_windings;
  std::vector<std::pair<int, int>> pairing;
  std::vector<int> self_paired;
  std::vector<double> transverse;
};

// TRS-dagger winding number along `axis` at fixed transverse momenta.
// Bands at k_perp are paired with their images at -k_perp (the slice
// itself when k_perp = -k_perp), and nu = (1/2) sum_pairs |w_p - w_q| with
// each pair counted once.
// PreconditionFailed unless the model has a TRS-dagger intertwiner.
NuReport nu_invariant(const TightBindingModel& model, Complex energy, int axis,
                      const std::vector<double>& transverse, int grid,
                      const std::optional<SymmetryOperator>& op = std::nullopt);

struct NuRow {
  double k_transverse;
  NuReport report;
};

// d = 2 table over k_perp = -pi + 2 pi i / points, i = 0 .. points-1.
std::vector<NuRow> nu_table(const TightBindingModel& model, Complex energy, int axis, int points,
                            int grid, const std::optional<SymmetryOperator>& op = std::nullopt);

// True when the mu = 0 winding along `axis` at `transverse` is zero or ill
// defined. In d > 1 a slice winding that varies over the transverse torus
// marks mu = 0 as lying on the amoeba, so the winding counts as ill defined.
bool pbc_winding_vanishes_trs_dagger(const TightBindingModel& model, Complex energy, int axis,
                                     const std::vector<double>& transverse, int grid,
                                     const std::optional<SymmetryOperator>& op = std::nullopt);

}  // namespace nhse
