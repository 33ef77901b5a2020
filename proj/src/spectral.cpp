#include "nhse/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "nhse/error.hpp"
#include "nhse/kernels.hpp"
#include "nhse/parallel.hpp"

namespace nhse {

namespace {

void normalize_columns(CMatrix& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    const double norm = vectors.col(c).norm();
    if (norm > 0.0) vectors.col(c) /= norm;
  }
}

bool is_real(const CMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (m.data()[i].imag() != 0.0) return false;
  }
  return true;
}

void solve_complex(CMatrix h, std::vector<Complex>& values, CMatrix& vectors) {
  const lapack_int n = static_cast<lapack_int>(h.rows());
  std::vector<Complex> w(n);
  vectors.resize(n, n);
  const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n, h.data(), n, w.data(),
                                        nullptr, 1, vectors.data(), n);
  if (info != 0) {
    fail(ErrorCode::SolverError, "zgeev failed with info " + std::to_string(info));
  }
  values = std::move(w);
}

void solve_real(const CMatrix& h, std::vector<Complex>& values, CMatrix& vectors) {
  const lapack_int n = static_cast<lapack_int>(h.rows());
  Eigen::MatrixXd a = h.real();
  std::vector<double> wr(n), wi(n);
  Eigen::MatrixXd vr(n, n);
  const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'V', n, a.data(), n, wr.data(),
                                        wi.data(), nullptr, 1, vr.data(), n);
  if (info != 0) {
    fail(ErrorCode::SolverError, "dgeev failed with info " + std::to_string(info));
  }
  values.resize(n);
  vectors.resize(n, n);
  for (lapack_int j = 0; j < n; ++j) {
    values[j] = Complex(wr[j], wi[j]);
    if (wi[j] == 0.0) {
      vectors.col(j) = vr.col(j).cast<Complex>();
    } else if (wi[j] > 0.0 && j + 1 < n) {
      // Pair (j, j+1): v = vr_j +- i vr_{j+1}.
      vectors.col(j) = vr.col(j).cast<Complex>() + Complex(0, 1) * vr.col(j + 1).cast<Complex>();
      vectors.col(j + 1) =
          vr.col(j).cast<Complex>() - Complex(0, 1) * vr.col(j + 1).cast<Complex>();
      values[j + 1] = Complex(wr[j + 1], wi[j + 1]);
      ++j;
    }
  }
}

// Osborne balancing run to convergence on the nonzero pattern: returns
// log d with D^-1 H D having matching off-diagonal row and column 2-norms.
// LAPACK's own radix-2 pass stops far from this point for skin-effect
// matrices, whose optimal scaling spans many decades. |log d| is clamped so
// that one-way (triangular) hopping, which has no balanced point, stays finite.
std::vector<double> balance_scaling(const CMatrix& h) {
  constexpr int kMaxSweeps = 20000;
  constexpr double kTol = 1e-6;
  constexpr double kClamp = 100.0;
  const Eigen::Index n = h.rows();
  std::vector<std::vector<std::pair<Eigen::Index, double>>> rows(n), cols(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == j || h(i, j) == 0.0) continue;
      const double a2 = std::norm(h(i, j));
      rows[i].emplace_back(j, a2);
      cols[j].emplace_back(i, a2);
    }
  }
  std::vector<double> log_d(n, 0.0), sq(n, 1.0);  // sq = d^2
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (const auto& [j, a2] : rows[i]) r += a2 * sq[j];
      for (const auto& [k, a2] : cols[i]) c += a2 / sq[k];
      if (r == 0.0 || c == 0.0) continue;
      // row i of D^-1 H D scales as 1/d_i, column i as d_i
      const double target = std::clamp(0.25 * std::log(r / c), -kClamp, kClamp);
      const double step = target - log_d[i];
      log_d[i] = target;
      sq[i] = std::exp(2.0 * target);
      worst = std::max(worst, std::abs(step));
    }
    if (worst < kTol) break;
  }
  return log_d;
}

std::vector<int> axis_window(int length) {
  const int lo = (2 * length) / 10;
  return {lo, length - lo};
}

struct LineFit {
  double slope = 0.0;
  double stderr_ = 0.0;
};

LineFit fit_line(const std::vector<double>& y, int begin, int end) {
  const int n = end - begin;
  double sx = 0.0, sy = 0.0;
  for (int x = begin; x < end; ++x) {
    sx += x;
    sy += y[x];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (int x = begin; x < end; ++x) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y[x] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  if (n > 2) {
    double ssr = 0.0;
    for (int x = begin; x < end; ++x) {
      const double r = y[x] - my - fit.slope * (x - mx);
      ssr += r * r;
    }
    fit.stderr_ = std::sqrt(ssr / (n - 2) / sxx);
  }
  return fit;
}

bool positive_range(const std::vector<double>& p, int begin, int end) {
  for (int x = begin; x < end; ++x) {
    if (!(p[x] > 0.0) || !std::isfinite(std::log(p[x]))) return false;
  }
  return true;
}

}  // namespace

double SpectralResult::spectral_radius() const {
  double r = 0.0;
  for (const Complex& e : eigenvalues) r = std::max(r, std::abs(e));
  return r;
}

double SpectralResult::spectral_diameter() const {
  if (eigenvalues.empty()) return 0.0;
  // Bounding-box diagonal: cheap and within sqrt(2) of the true diameter.
  double re_lo = eigenvalues[0].real(), re_hi = re_lo;
  double im_lo = eigenvalues[0].imag(), im_hi = im_lo;
  for (const Complex& e : eigenvalues) {
    re_lo = std::min(re_lo, e.real());
    re_hi = std::max(re_hi, e.real());
    im_lo = std::min(im_lo, e.imag());
    im_hi = std::max(im_hi, e.imag());
  }
  return std::hypot(re_hi - re_lo, im_hi - im_lo);
}

SpectralResult pbc_spectrum(const TightBindingModel& model, const std::vector<int>& grid,
                            bool keep_vectors) {
  if (grid.size() != static_cast<std::size_t>(model.dimension())) {
    fail(ErrorCode::DimensionError, "grid has " + std::to_string(grid.size()) +
                                        " axes, model dimension is " +
                                        std::to_string(model.dimension()));
  }
  for (int n : grid) {
    if (n < 1) fail(ErrorCode::InvalidArgument, "grid counts must be >= 1");
  }
  const int s = model.orbitals();
  const std::size_t points = site_count(grid);
  SpectralResult result;
  result.boundary = BoundaryKind::PBC;
  result.shape = grid;
  result.orbitals = s;
  result.eigenvalues.resize(points * s);
  result.momenta.resize(points);
  if (keep_vectors) result.eigenvectors = CMatrix(s, static_cast<Eigen::Index>(points * s));

  parallel_for(points, [&](std::size_t p) {
    const std::vector<int> n = site_coords(p, grid);
    std::vector<double> k(grid.size());
    for (std::size_t m = 0; m < grid.size(); ++m) {
      k[m] = 2.0 * std::numbers::pi * n[m] / grid[m];
    }
    const CMatrix h = bloch_hamiltonian(model, k);
    Eigen::ComplexEigenSolver<CMatrix> solver(h, keep_vectors);
    if (solver.info() != Eigen::Success) {
      std::ostringstream msg;
      msg << "eigensolver did not converge at k = (";
      for (std::size_t m = 0; m < k.size(); ++m) msg << (m ? "," : "") << k[m];
      msg << ")";
      fail(ErrorCode::SolverError, msg.str());
    }
    for (int i = 0; i < s; ++i) result.eigenvalues[p * s + i] = solver.eigenvalues()(i);
    if (keep_vectors) {
      CMatrix v = solver.eigenvectors();
      normalize_columns(v);
      result.eigenvectors->middleCols(static_cast<Eigen::Index>(p * s), s) = v;
    }
    result.momenta[p] = std::move(k);
  });
  return result;
}

SpectralResult obc_spectrum(const TightBindingModel& model, const std::vector<int>& sizes) {
  CMatrix h = obc_hamiltonian(model, sizes);
  SpectralResult result;
  result.boundary = BoundaryKind::OBC;
  result.shape = sizes;
  result.orbitals = model.orbitals();
  const std::vector<double> log_d = balance_scaling(h);
  for (Eigen::Index j = 0; j < h.cols(); ++j) {
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
      if (h(i, j) != 0.0) h(i, j) *= std::exp(log_d[j] - log_d[i]);
    }
  }
  CMatrix vectors;
  if (is_real(h)) {
    solve_real(h, result.eigenvalues, vectors);
  } else {
    solve_complex(std::move(h), result.eigenvalues, vectors);
  }
  // eigenvectors of H are D times those of D^-1 H D
  for (Eigen::Index i = 0; i < vectors.rows(); ++i) vectors.row(i) *= std::exp(log_d[i]);
  for (const Complex& e : result.eigenvalues) {
    if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) {
      fail(ErrorCode::SolverError, "eigensolver returned a non-finite eigenvalue");
    }
  }
  normalize_columns(vectors);
  result.eigenvectors = std::move(vectors);
  return result;
}

std::size_t nearest_eigenvalue(const SpectralResult& result, Complex energy) {
  if (result.eigenvalues.empty()) fail(ErrorCode::NoMatch, "spectrum is empty");
  std::size_t best = 0;
  double best_dist = std::abs(result.eigenvalues[0] - energy);
  for (std::size_t i = 1; i < result.eigenvalues.size(); ++i) {
    const double d = std::abs(result.eigenvalues[i] - energy);
    if (d < best_dist) {
      best = i;
      best_dist = d;
    }
  }
  return best;
}

std::vector<std::size_t> eigenvalues_near(const SpectralResult& result, Complex energy,
                                          double tol) {
  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < result.eigenvalues.size(); ++i) {
    if (std::abs(result.eigenvalues[i] - energy) <= tol) hits.push_back(i);
  }
  std::stable_sort(hits.begin(), hits.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(result.eigenvalues[a] - energy) < std::abs(result.eigenvalues[b] - energy);
  });
  return hits;
}

std::size_t select_eigenvalue(const SpectralResult& result, const EigenSelector& selector) {
  const auto hits = eigenvalues_near(result, selector.energy, selector.match_tol);
  if (hits.empty()) {
    std::ostringstream msg;
    msg << "no eigenvalue within " << selector.match_tol << " of " << selector.energy.real()
        << (selector.energy.imag() < 0 ? "" : "+") << selector.energy.imag() << "i";
    fail(ErrorCode::NoMatch, msg.str());
  }
  const double degeneracy = selector.degeneracy_tol >= 0.0
                                ? selector.degeneracy_tol
                                : 1e-6 * std::max(result.spectral_radius(), 1e-300);
  const Complex anchor = result.eigenvalues[hits.front()];
  for (std::size_t i : hits) {
    if (std::abs(result.eigenvalues[i] - anchor) > degeneracy) {
      std::ostringstream msg;
      msg << hits.size() << " distinct eigenvalues lie within " << selector.match_tol
          << " of the selector";
      fail(ErrorCode::AmbiguousSelector, msg.str());
    }
  }
  return hits.front();
}

std::vector<double> density_of(const Eigen::Ref<const Eigen::VectorXcd>& psi, int orbitals) {
  const std::size_t sites = static_cast<std::size_t>(psi.size()) / orbitals;
  std::vector<double> density(sites);
  Eigen::VectorXcd contiguous = psi;
  kernels::active().site_density(sites, orbitals, contiguous.data(), density.data());
  double total = 0.0;
  for (double p : density) total += p;
  if (total > 0.0) {
    for (double& p : density) p /= total;
  }
  return density;
}

std::vector<double> density_profile(const SpectralResult& result, std::size_t index) {
  if (!result.eigenvectors) fail(ErrorCode::PreconditionFailed, "spectrum has no eigenvectors");
  if (result.boundary != BoundaryKind::OBC) {
    fail(ErrorCode::PreconditionFailed, "density profiles need an OBC spectrum");
  }
  if (index >= result.eigenvalues.size()) fail(ErrorCode::InvalidArgument, "index out of range");
  return density_of(result.eigenvectors->col(static_cast<Eigen::Index>(index)), result.orbitals);
}

std::vector<double> density_profile(const SpectralResult& result, const EigenSelector& selector) {
  return density_profile(result, select_eigenvalue(result, selector));
}

const char* to_string(LocalizationClass cls) {
  switch (cls) {
    case LocalizationClass::Extended: return "extended";
    case LocalizationClass::Directional: return "directional";
    case LocalizationClass::Bidirectional: return "bidirectional";
    case LocalizationClass::DegenerateSubspace: return "degenerate_subspace";
    case LocalizationClass::Unknown: return "unknown";
  }
  return "unknown";
}

std::vector<double> marginal(const std::vector<double>& profile, const std::vector<int>& sizes,
                             int axis) {
  std::vector<double> out(sizes[axis], 0.0);
  for (std::size_t i = 0; i < profile.size(); ++i) {
    out[site_coords(i, sizes)[axis]] += profile[i];
  }
  return out;
}

LocalizationReport fit_decay_factor(const std::vector<double>& profile,
                                    const std::vector<int>& sizes,
                                    const LocalizationOptions& options) {
  if (profile.size() != site_count(sizes)) {
    fail(ErrorCode::DimensionError, "profile length does not match the lattice");
  }
  for (int l : sizes) {
    if (l < 8) fail(ErrorCode::InvalidArgument, "each axis needs at least 8 sites to fit");
  }
  double total = 0.0;
  for (double p : profile) total += p;
  if (std::abs(total - 1.0) > 1e-8) {
    fail(ErrorCode::PreconditionFailed, "profile does not sum to 1");
  }
  const int d = static_cast<int>(sizes.size());
  LocalizationReport report;
  report.mu_fit.resize(d);
  report.mu_stderr.resize(d);
  report.signs.resize(d);
  report.boundary_mass.resize(d);
  report.half_slopes.resize(d);
  for (int m = 0; m < d; ++m) {
    const int length = sizes[m];
    const std::vector<double> p = marginal(profile, sizes, m);
    const auto window = axis_window(length);
    if (!positive_range(p, window[0], window[1])) {
      fail(ErrorCode::DegenerateFit, "marginal along axis " + std::to_string(m) +
                                         " vanishes inside the fit window");
    }
    std::vector<double> logp(length, 0.0);
    for (int x = 0; x < length; ++x) logp[x] = p[x] > 0.0 ? std::log(p[x]) : -745.0;
    const LineFit fit = fit_line(logp, window[0], window[1]);
    report.mu_fit[m] = 0.5 * fit.slope;
    report.mu_stderr[m] = 0.5 * fit.stderr_;

    const int edge = std::max(1, static_cast<int>(std::lround(options.boundary_fraction * length)));
    double left = 0.0, right = 0.0;
    for (int x = 0; x < edge; ++x) {
      left += p[x];
      right += p[length - 1 - x];
    }
    report.boundary_mass[m] = {left, right};

    const int half = length / 2;
    if (positive_range(p, 0, length)) {
      report.half_slopes[m] = {fit_line(logp, 0, half).slope, fit_line(logp, half, length).slope};
    } else {
      report.half_slopes[m] = {0.0, 0.0};
    }
  }

  for (int m = 0; m < d; ++m) {
    const auto [lo, hi] = report.half_slopes[m];
    const auto [left, right] = report.boundary_mass[m];
    if (lo <= -options.bidirectional_slope && hi >= options.bidirectional_slope &&
        left > options.bidirectional_mass && right > options.bidirectional_mass) {
      report.bidirectional_axes.push_back(m);
    }
    report.signs[m] = std::abs(report.mu_fit[m]) < options.mu_tol ? 0 : (report.mu_fit[m] > 0 ? 1 : -1);
  }
  if (!report.bidirectional_axes.empty()) {
    report.cls = LocalizationClass::Bidirectional;
    return report;
  }
  bool extended = true;
  for (int m = 0; m < d; ++m) {
    extended = extended && std::abs(report.mu_fit[m]) < options.mu_tol &&
               report.boundary_mass[m].first < options.extended_mass &&
               report.boundary_mass[m].second < options.extended_mass;
  }
  report.cls = extended ? LocalizationClass::Extended : LocalizationClass::Directional;
  return report;
}

std::vector<LocalizationReport> degenerate_group_localize(const SpectralResult& result,
                                                          Complex energy, double tol,
                                                          const LocalizationOptions& options) {
  if (!result.eigenvectors) fail(ErrorCode::PreconditionFailed, "spectrum has no eigenvectors");
  const auto hits = eigenvalues_near(result, energy, tol);
  if (hits.size() < 2) {
    fail(ErrorCode::NotDegenerate, std::to_string(hits.size()) + " eigenvalue(s) within tolerance");
  }
  const auto& sizes = result.shape;
  const int d = static_cast<int>(sizes.size());
  const int s = result.orbitals;
  const Eigen::Index n = result.eigenvectors->rows();

  CMatrix group(n, static_cast<Eigen::Index>(hits.size()));
  for (std::size_t c = 0; c < hits.size(); ++c) {
    group.col(static_cast<Eigen::Index>(c)) = result.eigenvectors->col(static_cast<Eigen::Index>(hits[c]));
  }
  // Orthonormal basis of the span; drop numerically dependent directions.
  Eigen::JacobiSVD<CMatrix> svd(group, Eigen::ComputeThinU);
  Eigen::Index rank = 0;
  while (rank < svd.singularValues().size() &&
         svd.singularValues()(rank) > 1e-8 * svd.singularValues()(0)) {
    ++rank;
  }
  const CMatrix basis = svd.matrixU().leftCols(rank);

  // Candidate position operators: sum_m sign_m x_m with sign_0 = +1.
  std::vector<double> coords(static_cast<std::size_t>(n / s) * d);
  for (Eigen::Index site = 0; site < n / s; ++site) {
    const auto x = site_coords(static_cast<std::size_t>(site), sizes);
    for (int m = 0; m < d; ++m) coords[site * d + m] = x[m] - 0.5 * (sizes[m] - 1);
  }
  CMatrix best_vectors;
  double best_spread = -1.0;
  for (int mask = 0; mask < (1 << d); ++mask) {
    if (mask & 1) continue;
    for (int axis_pick = -1; axis_pick < (d > 1 ? d : 0); ++axis_pick) {
      // axis_pick < 0: signed sum over all axes; otherwise one axis only.
      if (axis_pick >= 0 && mask != 0) continue;
      Eigen::VectorXd diag(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index site = i / s;
        double x = 0.0;
        for (int m = 0; m < d; ++m) {
          if (axis_pick >= 0 && m != axis_pick) continue;
          x += ((mask >> m) & 1 ? -1.0 : 1.0) * coords[site * d + m];
        }
        diag(i) = axis_pick >= 0 ? x : x / d;
      }
      const CMatrix projected = basis.adjoint() * diag.asDiagonal() * basis;
      Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (projected + projected.adjoint()));
      const double spread = eig.eigenvalues().maxCoeff() - eig.eigenvalues().minCoeff();
      if (spread > best_spread + 1e-12) {
        best_spread = spread;
        best_vectors = basis * eig.eigenvectors();
      }
    }
  }

  // A rank-one group (coalesced vectors) cannot be split; report each member.
  if (rank == 1) best_vectors = group;

  std::vector<LocalizationReport> reports;
  for (Eigen::Index c = 0; c < best_vectors.cols(); ++c) {
    LocalizationReport report;
    try {
      report = fit_decay_factor(density_of(best_vectors.col(c), s), sizes, options);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateFit) throw;
      report.cls = LocalizationClass::Unknown;
    }
    report.subspace_dim = static_cast<int>(rank);
    reports.push_back(std::move(report));
  }
  return reports;
}

}  // namespace nhse
