#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "nhse/lattice_model.hpp"

namespace nhse {

enum class BoundaryKind { PBC, OBC };

struct SpectralResult {
  BoundaryKind boundary = BoundaryKind::OBC;
  // Per-axis k-point counts (PBC) or lattice sizes (OBC).
  std::vector<int> shape;
  int orbitals = 0;
  std::vector<Complex> eigenvalues;
  // Unit-norm columns aligned with eigenvalues. For PBC the s columns of
  // k-point n occupy [n*s, (n+1)*s) and have s rows.
  std::optional<CMatrix> eigenvectors;
  // PBC only: momentum of each k-point, row-major over the grid.
  std::vector<std::vector<double>> momenta;

  double spectral_radius() const;
  double spectral_diameter() const;
};

// Eigenvalues of H(k) at k_m = 2 pi n_m / N_m.
SpectralResult pbc_spectrum(const TightBindingModel& model, const std::vector<int>& grid,
                            bool keep_vectors = false);

// Full dense eigendecomposition of the OBC matrix. Real matrices go through
// the real solver and have their conjugate-pair vectors expanded.
SpectralResult obc_spectrum(const TightBindingModel& model, const std::vector<int>& sizes);

// Index of the eigenvalue closest to `energy` (lowest index on ties).
std::size_t nearest_eigenvalue(const SpectralResult& result, Complex energy);

// Indices of eigenvalues within `tol` of `energy`, nearest first.
std::vector<std::size_t> eigenvalues_near(const SpectralResult& result, Complex energy,
                                          double tol);

struct EigenSelector {
  Complex energy;
  double match_tol = 0.02;
  // Candidates closer than this to each other count as one degenerate
  // group; negative selects 1e-6 times the spectral radius.
  double degeneracy_tol = -1.0;
};

// Nearest eigenvalue within match_tol. Throws NoMatch when none is in
// range and AmbiguousSelector when the candidates are not one degenerate group.
std::size_t select_eigenvalue(const SpectralResult& result, const EigenSelector& selector);

// Per-site probability sum_o |psi|^2 over lattice sites (row-major).
std::vector<double> density_profile(const SpectralResult& result, std::size_t index);
std::vector<double> density_profile(const SpectralResult& result, const EigenSelector& selector);
std::vector<double> density_of(const Eigen::Ref<const Eigen::VectorXcd>& psi, int orbitals);

enum class LocalizationClass { Extended, Directional, Bidirectional, DegenerateSubspace, Unknown };

const char* to_string(LocalizationClass cls);

struct LocalizationOptions {
  double mu_tol = 0.02;
  double extended_mass = 0.25;
  double bidirectional_slope = 0.05;
  double bidirectional_mass = 0.15;
  double boundary_fraction = 0.1;
};

struct LocalizationReport {
  std::vector<double> mu_fit;
  std::vector<double> mu_stderr;
  LocalizationClass cls = LocalizationClass::Unknown;
  // Directional: sign of mu per axis, 0 where |mu| < mu_tol.
  std::vector<int> signs;
  // Bidirectional: axes on which the density decays away from both ends.
  std::vector<int> bidirectional_axes;
  // DegenerateSubspace: dimension of the group the state came from.
  int subspace_dim = 0;
  // Probability in the first and last boundary_fraction of each axis.
  std::vector<std::pair<double, double>> boundary_mass;
  // Slopes of log p_m over [0, L/2) and [L/2, L).
  std::vector<std::pair<double, double>> half_slopes;
};

// Marginalizes onto each axis and fits log p_m(x) = c + 2 mu_m x on the
// window [floor(0.2 L), L - floor(0.2 L)). Throws DegenerateFit when the
// window contains zero density.
LocalizationReport fit_decay_factor(const std::vector<double>& profile, const std::vector<int>& sizes,
                                    const LocalizationOptions& options = {});

// Splits a degenerate eigenspace with the position operator and localizes
// each resulting basis vector. In d > 1 the operator is the axis sum
// sum_m +-x_m with the widest spread. Throws NotDegenerate.
std::vector<LocalizationReport> degenerate_group_localize(const SpectralResult& result,
                                                          Complex energy, double tol,
                                                          const LocalizationOptions& options = {});

// Per-axis marginal of a site profile.
std::vector<double> marginal(const std::vector<double>& profile, const std::vector<int>& sizes,
                             int axis);

}  // namespace nhse
