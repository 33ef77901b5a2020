#include "nhse/amoeba.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "nhse/kernels.hpp"
#include "nhse/parallel.hpp"

namespace nhse {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSingularDet = 1e-14;

// H along one axis as sum_q C_q e^{i q k}, with e^{j.mu} and the transverse
// phases folded into C_q.
std::map<int, CMatrix> axis_coefficients(const TightBindingModel& model,
                                         const std::vector<double>& mu, int axis,
                                         const std::vector<double>& transverse) {
  std::map<int, CMatrix> coeffs;
  for (const auto& [j, t] : model.hoppings()) {
    double growth = 0.0;
    double phase = 0.0;
    int other = 0;
    for (int m = 0; m < model.dimension(); ++m) {
      growth += mu[m] * j[m];
      if (m != axis) phase += transverse[other++] * j[m];
    }
    auto [it, fresh] = coeffs.try_emplace(j[axis], CMatrix::Zero(t.rows(), t.cols()));
    it->second += t * std::polar(std::exp(growth), phase);
  }
  return coeffs;
}

struct LoopSamples {
  std::vector<Complex> det;
  std::vector<Complex> ddet;  // d det / dk
};

LoopSamples sample_loop(const std::map<int, CMatrix>& coeffs, int s, Complex energy, int n) {
  const auto& kern = kernels::active();
  std::vector<Complex> base(n);
  for (int r = 0; r < n; ++r) base[r] = std::polar(1.0, kTwoPi * r / n);

  const std::size_t entries = static_cast<std::size_t>(s) * s;
  std::vector<std::vector<Complex>> h(entries, std::vector<Complex>(n));
  std::vector<std::vector<Complex>> dh(entries, std::vector<Complex>(n));
  std::vector<Complex> phase(n);
  for (const auto& [q, c] : coeffs) {
    const long long qm = ((static_cast<long long>(q) % n) + n) % n;
    for (int r = 0; r < n; ++r) phase[r] = base[(qm * r) % n];
    for (int a = 0; a < s; ++a) {
      for (int b = 0; b < s; ++b) {
        const Complex value = c(a, b);
        if (value == Complex(0.0)) continue;
        kern.caxpy(n, value, phase.data(), h[a * s + b].data());
        if (q != 0) kern.caxpy(n, Complex(0.0, q) * value, phase.data(), dh[a * s + b].data());
      }
    }
  }

  LoopSamples out{std::vector<Complex>(n), std::vector<Complex>(n)};
  if (s == 1) {
    for (int r = 0; r < n; ++r) {
      out.det[r] = energy - h[0][r];
      out.ddet[r] = -dh[0][r];
    }
  } else if (s == 2) {
    kern.det2(n, energy, h[0].data(), h[1].data(), h[2].data(), h[3].data(), dh[0].data(),
              dh[1].data(), dh[2].data(), dh[3].data(), out.det.data(), out.ddet.data());
  } else {
    CMatrix a(s, s), da(s, s);
    for (int r = 0; r < n; ++r) {
      for (int i = 0; i < s; ++i) {
        for (int k = 0; k < s; ++k) {
          a(i, k) = (i == k ? energy : Complex(0.0)) - h[i * s + k][r];
          da(i, k) = -dh[i * s + k][r];
        }
      }
      Eigen::PartialPivLU<CMatrix> lu(a);
      const Complex det = lu.determinant();
      out.det[r] = det;
      out.ddet[r] = det == Complex(0.0) ? Complex(0.0) : det * lu.solve(da).trace();
    }
  }
  return out;
}

struct LoopStats {
  double raw = 0.0;       // trapezoid sum of Im(D'/D) / N over non-singular nodes
  double unwrapped = 0.0; // sum of arg increments / 2pi
  double min_abs = 0.0;
  double median_abs = 0.0;
  double log_sum = 0.0;   // sum of ln|D| over non-singular nodes
  int excluded = 0;
};

LoopStats loop_stats(const LoopSamples& samples) {
  const auto& kern = kernels::active();
  const std::size_t n = samples.det.size();
  std::vector<double> abs2(n), ratio(n);
  kern.abs2(n, samples.det.data(), abs2.data());
  kern.im_ratio(n, samples.ddet.data(), samples.det.data(), ratio.data());
  LoopStats stats;
  std::vector<double> magnitude(n);
  for (std::size_t r = 0; r < n; ++r) {
    magnitude[r] = std::sqrt(abs2[r]);
    if (magnitude[r] < kSingularDet || !std::isfinite(ratio[r])) {
      ++stats.excluded;
      continue;
    }
    stats.raw += ratio[r];
    stats.log_sum += std::log(magnitude[r]);
  }
  stats.raw /= static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r) {
    stats.unwrapped += std::arg(samples.det[(r + 1) % n] * std::conj(samples.det[r]));
  }
  stats.unwrapped /= kTwoPi;
  stats.min_abs = *std::min_element(magnitude.begin(), magnitude.end());
  std::nth_element(magnitude.begin(), magnitude.begin() + n / 2, magnitude.end());
  stats.median_abs = magnitude[n / 2];
  return stats;
}

void require_mu(const TightBindingModel& model, const std::vector<double>& mu) {
  if (mu.size() != static_cast<std::size_t>(model.dimension())) {
    fail(ErrorCode::DimensionError, "mu has " + std::to_string(mu.size()) +
                                        " components, model dimension is " +
                                        std::to_string(model.dimension()));
  }
  for (double m : mu) {
    if (!std::isfinite(m)) fail(ErrorCode::InvalidArgument, "mu is not finite");
  }
}

void require_grid(const TightBindingModel& model, const std::vector<int>& grid) {
  if (grid.size() != static_cast<std::size_t>(model.dimension())) {
    fail(ErrorCode::DimensionError, "grid has " + std::to_string(grid.size()) +
                                        " axes, model dimension is " +
                                        std::to_string(model.dimension()));
  }
  for (int n : grid) {
    if (n < 64) fail(ErrorCode::InvalidArgument, "grid counts must be >= 64");
  }
}

// Every slice of the torus grid along every axis.
struct TorusScan {
  double value = 0.0;
  std::vector<double> gradient;
  int excluded = 0;
  bool all_axes_ill = true;
  bool interior = true;
};

TorusScan scan_torus(const TightBindingModel& model, Complex energy, const std::vector<double>& mu,
                     const std::vector<int>& grid, bool with_gradient, double ill_tol) {
  const int d = model.dimension();
  const int s = model.orbitals();
  TorusScan scan;
  scan.gradient.assign(d, 0.0);
  const std::size_t nodes = site_count(grid);
  const int axes = with_gradient ? d : 1;
  for (int axis = 0; axis < axes; ++axis) {
    std::vector<int> others;
    for (int m = 0; m < d; ++m) {
      if (m != axis) others.push_back(grid[m]);
    }
    const std::size_t slices = others.empty() ? 1 : site_count(others);
    std::vector<LoopStats> stats(slices);
    parallel_for(slices, [&](std::size_t t) {
      std::vector<double> transverse;
      if (!others.empty()) {
        const auto idx = site_coords(t, others);
        for (std::size_t m = 0; m < others.size(); ++m) {
          transverse.push_back(kTwoPi * idx[m] / others[m]);
        }
      }
      stats[t] = loop_stats(
          sample_loop(axis_coefficients(model, mu, axis, transverse), s, energy, grid[axis]));
    });
    double log_sum = 0.0;
    double raw_sum = 0.0;
    int excluded = 0;
    bool axis_ill = false;
    for (const LoopStats& st : stats) {
      log_sum += st.log_sum;
      raw_sum += st.raw * grid[axis];
      excluded += st.excluded;
      const bool ill = st.min_abs < ill_tol * st.median_abs;
      axis_ill = axis_ill || ill;
      if (ill || std::abs(st.raw) > 0.05) scan.interior = false;
    }
    scan.all_axes_ill = scan.all_axes_ill && axis_ill;
    const double kept = static_cast<double>(nodes) - excluded;
    if (axis == 0) {
      scan.excluded = excluded;
      if (excluded > 0.01 * static_cast<double>(nodes)) {
        std::ostringstream msg;
        msg << excluded << " of " << nodes << " quadrature nodes are singular";
        fail(ErrorCode::TooSingular, msg.str());
      }
      scan.value = log_sum / kept;
    }
    scan.gradient[axis] = kept > 0 ? raw_sum / kept : 0.0;
  }
  return scan;
}

// One slice integrated exactly along its axis: det(E - H) is a Laurent
// polynomial in z = e^{mu + ik}, so Jensen's formula gives the average of
// ln|det| over k from its roots, and the winding is a root count.
struct LineSlice {
  double value = 0.0;
  int winding = 0;
  double gap = std::numeric_limits<double>::infinity();  // min |ln|root|| over the roots
};

LineSlice line_slice(const std::map<int, CMatrix>& coeffs, int s, int reach, Complex energy) {
  const int degree = 2 * s * reach;
  const int n = degree + 1;
  const LoopSamples samples = sample_loop(coeffs, s, energy, n);
  // Coefficient of zeta^(p - s*reach) of det, p = 0..degree.
  std::vector<Complex> c(n);
  double largest = 0.0;
  for (int p = 0; p < n; ++p) {
    Complex sum = 0.0;
    const long long shift = p - static_cast<long long>(s) * reach;
    for (int r = 0; r < n; ++r) {
      const long long e = ((-shift * r) % n + n) % n;
      sum += samples.det[r] * std::polar(1.0, kTwoPi * static_cast<double>(e) / n);
    }
    c[p] = sum / static_cast<double>(n);
    largest = std::max(largest, std::abs(c[p]));
  }
  LineSlice out;
  if (largest == 0.0) {
    out.value = -std::numeric_limits<double>::infinity();
    out.gap = 0.0;
    return out;
  }
  const double floor = 1e-12 * largest;
  int top = degree;
  while (std::abs(c[top]) <= floor) --top;
  int bottom = 0;
  while (std::abs(c[bottom]) <= floor) ++bottom;
  out.value = std::log(std::abs(c[top]));
  int inside = bottom;
  const int m = top - bottom;
  if (m > 0) {
    CMatrix companion = CMatrix::Zero(m, m);
    for (int i = 1; i < m; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < m; ++i) companion(i, m - 1) = -c[bottom + i] / c[top];
    Eigen::ComplexEigenSolver<CMatrix> solver(companion, false);
    if (solver.info() != Eigen::Success) fail(ErrorCode::SolverError, "root finding failed");
    for (Eigen::Index i = 0; i < m; ++i) {
      const double lr = std::log(std::abs(solver.eigenvalues()(i)));
      out.value += std::max(0.0, lr);
      out.gap = std::min(out.gap, std::abs(lr));
      if (lr < 0.0) ++inside;
    }
  }
  out.winding = inside - s * reach;
  return out;
}

struct LineScan {
  double value = 0.0;
  std::vector<double> gradient;
  bool all_axes_ill = true;
  bool interior = true;
};

// Ronkin function integrated exactly along axis 0 and by the trapezoid rule
// across; the gradient is the transverse average of exact slice windings.
LineScan scan_lines(const TightBindingModel& model, Complex energy, const std::vector<double>& mu,
                    const std::vector<int>& grid, double ill_tol) {
  const int d = model.dimension();
  const int s = model.orbitals();
  LineScan scan;
  scan.gradient.assign(d, 0.0);
  for (int axis = 0; axis < d; ++axis) {
    std::vector<int> others;
    for (int m = 0; m < d; ++m) {
      if (m != axis) others.push_back(grid[m]);
    }
    const std::size_t slices = others.empty() ? 1 : site_count(others);
    std::vector<LineSlice> lines(slices);
    const int reach = model.range(axis);
    parallel_for(slices, [&](std::size_t t) {
      std::vector<double> transverse;
      if (!others.empty()) {
        const auto idx = site_coords(t, others);
        for (std::size_t m = 0; m < others.size(); ++m) {
          transverse.push_back(kTwoPi * idx[m] / others[m]);
        }
      }
      lines[t] = line_slice(axis_coefficients(model, mu, axis, transverse), s, reach, energy);
    });
    double value = 0.0;
    double winding = 0.0;
    bool axis_ill = false;
    for (const LineSlice& line : lines) {
      value += line.value;
      winding += line.winding;
      const bool ill = line.gap <= ill_tol;
      axis_ill = axis_ill || ill;
      if (ill || line.winding != 0) scan.interior = false;
    }
    scan.all_axes_ill = scan.all_axes_ill && axis_ill;
    if (axis == 0) scan.value = value / static_cast<double>(slices);
    scan.gradient[axis] = winding / static_cast<double>(slices);
  }
  if (!std::isfinite(scan.value)) {
    fail(ErrorCode::TooSingular, "det vanishes identically on a slice");
  }
  return scan;
}

}  // namespace

WindingReport winding_number(const TightBindingModel& model, Complex energy,
                             const std::vector<double>& mu, int axis,
                             const std::vector<double>& transverse, int grid,
                             const WindingOptions& options) {
  require_mu(model, mu);
  if (axis < 0 || axis >= model.dimension()) fail(ErrorCode::DimensionError, "axis out of range");
  if (transverse.size() != static_cast<std::size_t>(model.dimension() - 1)) {
    fail(ErrorCode::DimensionError, "transverse momentum needs " +
                                        std::to_string(model.dimension() - 1) + " components");
  }
  if (grid < 64) fail(ErrorCode::InvalidArgument, "winding grid must have at least 64 points");
  const auto coeffs = axis_coefficients(model, mu, axis, transverse);
  WindingReport report;
  for (int n = grid;; n *= 2) {
    const LoopStats stats = loop_stats(sample_loop(coeffs, model.orbitals(), energy, n));
    report.raw = stats.raw;
    report.min_abs_det = stats.min_abs;
    report.median_abs_det = stats.median_abs;
    report.k_points = n;
    if (stats.min_abs < options.ill_tol * stats.median_abs || stats.excluded > 0) {
      report.value.reset();
      return report;
    }
    const double nearest = std::round(stats.raw);
    if (std::abs(stats.raw - nearest) <= options.integer_tol &&
        std::lround(stats.unwrapped) == std::lround(nearest)) {
      report.value = static_cast<int>(nearest);
      return report;
    }
    if (2 * n > options.max_grid) {
      std::ostringstream msg;
      msg << "phase sum " << stats.raw << " is not an integer at " << n << " k-points";
      fail(ErrorCode::NonIntegerPhase, msg.str());
    }
  }
}

RonkinEvaluation ronkin_value(const TightBindingModel& model, Complex energy,
                              const std::vector<double>& mu, const std::vector<int>& grid) {
  require_mu(model, mu);
  require_grid(model, grid);
  const TorusScan scan = scan_torus(model, energy, mu, grid, false, 1e-6);
  RonkinEvaluation out;
  out.value = scan.value;
  out.energy = energy;
  out.mu = mu;
  out.grid = grid;
  out.excluded_nodes = scan.excluded;
  return out;
}

RonkinEvaluation ronkin_evaluate(const TightBindingModel& model, Complex energy,
                                 const std::vector<double>& mu, const std::vector<int>& grid) {
  require_mu(model, mu);
  require_grid(model, grid);
  const TorusScan scan = scan_torus(model, energy, mu, grid, true, 1e-6);
  RonkinEvaluation out;
  out.value = scan.value;
  out.energy = energy;
  out.mu = mu;
  out.grid = grid;
  out.gradient = scan.gradient;
  out.excluded_nodes = scan.excluded;
  return out;
}

std::vector<double> ronkin_gradient(const TightBindingModel& model, Complex energy,
                                    const std::vector<double>& mu, const std::vector<int>& grid) {
  return *ronkin_evaluate(model, energy, mu, grid).gradient;
}

const char* to_string(AmoebaReport report) {
  return report == AmoebaReport::Interior ? "interior" : "boundary_of_amoeba";
}

MaxIterationsError::MaxIterationsError(const std::string& message, std::vector<double> best_mu,
                                       double best_value)
    : Error(ErrorCode::MaxIterations, message),
      best_mu_(std::move(best_mu)),
      best_value_(best_value) {}

RonkinMinimum ronkin_minimize(const TightBindingModel& model, Complex energy,
                              const std::vector<double>& mu_init, const std::vector<int>& grid,
                              double gtol, const MinimizeOptions& options) {
  require_mu(model, mu_init);
  require_grid(model, grid);
  if (!(gtol > 0.0)) fail(ErrorCode::InvalidArgument, "gtol must be positive");
  const int d = model.dimension();
  auto clamp = [&](std::vector<double> mu) {
    for (double& m : mu) m = std::clamp(m, -options.mu_max, options.mu_max);
    return mu;
  };

  std::vector<double> mu = clamp(mu_init);
  LineScan scan = scan_lines(model, energy, mu, grid, options.ill_tol);
  double step = options.initial_step;
  RonkinMinimum out;
  // Interior points sit in a complement component with zero winding. Zeros
  // touching the torus between transverse nodes are caught by checking the
  // neighbourhood too, two quadrature steps out along each axis.
  auto interior_at = [&](bool kink) {
    if (kink || !scan.interior) return false;
    for (int m = 0; m < d; ++m) {
      for (double sign : {-1.0, 1.0}) {
        std::vector<double> probe = mu;
        probe[m] += sign * 2.0 * kTwoPi / grid[m];
        if (!scan_lines(model, energy, probe, grid, options.ill_tol).interior) return false;
      }
    }
    return true;
  };
  auto finish = [&](int iterations, bool kink) {
    out.mu_star = mu;
    out.value = scan.value;
    out.gradient = scan.gradient;
    out.iterations = iterations;
    out.report = interior_at(kink) ? AmoebaReport::Interior : AmoebaReport::BoundaryOfAmoeba;
    return out;
  };

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    double gmax = 0.0;
    for (double g : scan.gradient) gmax = std::max(gmax, std::abs(g));
    if (gmax <= gtol || scan.all_axes_ill) return finish(iter, false);

    bool accepted = false;
    bool boxed = true;
    for (double trial = step; trial >= options.min_step; trial *= options.shrink) {
      std::vector<double> next(d);
      for (int m = 0; m < d; ++m) next[m] = mu[m] - trial * scan.gradient[m];
      next = clamp(next);
      double decrease = 0.0;
      for (int m = 0; m < d; ++m) decrease += scan.gradient[m] * (mu[m] - next[m]);
      if (decrease <= 0.0) break;
      boxed = false;
      LineScan candidate = scan_lines(model, energy, next, grid, options.ill_tol);
      if (candidate.value <= scan.value - options.armijo * decrease) {
        mu = std::move(next);
        scan = std::move(candidate);
        step = std::min(options.initial_step, 2.0 * trial);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (boxed) {
        throw MaxIterationsError("descent leaves the box |mu| <= " + std::to_string(options.mu_max),
                                 mu, scan.value);
      }
      // No decrease at any step length: a kink of the Ronkin function.
      return finish(iter + 1, true);
    }
  }
  throw MaxIterationsError("no convergence after " + std::to_string(options.max_iterations) +
                               " iterations",
                           mu, scan.value);
}

AmoebaTest amoeba_obc_test(const TightBindingModel& model, Complex energy,
                           const std::vector<int>& grid, double gtol,
                           const MinimizeOptions& options) {
  AmoebaTest test;
  test.minimum = ronkin_minimize(model, energy, std::vector<double>(model.dimension(), 0.0), grid,
                                 gtol, options);
  test.in_obc_spectrum = test.minimum.report == AmoebaReport::BoundaryOfAmoeba;
  return test;
}

}  // namespace nhse
