#include "nhse/band_topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nhse/error.hpp"

namespace nhse {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Minimum-cost perfect assignment (Hungarian method); row i -> column result[i].
std::vector<int> assign_min_cost(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> result(n);
  for (int j = 1; j <= n; ++j) result[p[j] - 1] = j - 1;
  return result;
}

// Greedy nearest-target matching, falling back to the optimal assignment
// when two predictions want the same target.
std::vector<int> match(const std::vector<Complex>& from, const std::vector<Complex>& to) {
  const int n = static_cast<int>(from.size());
  std::vector<int> greedy(n, -1);
  std::vector<char> taken(n, 0);
  bool clash = false;
  for (int i = 0; i < n; ++i) {
    int best = 0;
    for (int j = 1; j < n; ++j) {
      if (std::abs(from[i] - to[j]) < std::abs(from[i] - to[best])) best = j;
    }
    if (taken[best]) clash = true;
    taken[best] = 1;
    greedy[i] = best;
  }
  if (!clash) return greedy;
  std::vector<std::vector<double>> cost(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) cost[i][j] = std::abs(from[i] - to[j]);
  }
  return assign_min_cost(cost);
}

struct TrackPoint {
  Complex k;
  std::vector<Complex> values;
};

struct TrackState {
  TrackPoint prev;
  TrackPoint cur;
};

class Tracker {
 public:
  Tracker(const TightBindingModel& model, int axis, const std::vector<double>& transverse,
          const std::vector<double>& mu, const TrackOptions& options)
      : model_(model), axis_(axis), transverse_(transverse), mu_(mu), options_(options) {}

  // Eigenvalues of H(e^{mu + i k}) at complex momentum k on the tracked axis.
  std::vector<Complex> eigenvalues(Complex k) const {
    ComplexMomentum z;
    z.mu = mu_;
    z.k.assign(model_.dimension(), 0.0);
    int other = 0;
    for (int m = 0; m < model_.dimension(); ++m) {
      if (m == axis_) {
        z.k[m] = k.real();
        z.mu[m] -= k.imag();
      } else {
        z.k[m] = transverse_[other++];
      }
    }
    const CMatrix h = generalized_bloch(model_, z);
    if (h.rows() == 1) return {h(0, 0)};
    Eigen::ComplexEigenSolver<CMatrix> solver(h, false);
    if (solver.info() != Eigen::Success) {
      fail(ErrorCode::SolverError, "eigensolver failed while tracking bands");
    }
    std::vector<Complex> out(h.rows());
    for (Eigen::Index i = 0; i < h.rows(); ++i) out[i] = solver.eigenvalues()(i);
    return out;
  }

  TrackState start(Complex k0, double delta) const {
    TrackState state;
    state.cur = {k0, eigenvalues(k0)};
    const std::vector<Complex> before = eigenvalues(k0 - delta);
    const std::vector<int> order = match(state.cur.values, before);
    state.prev = {k0 - delta, std::vector<Complex>(before.size())};
    for (std::size_t p = 0; p < order.size(); ++p) state.prev.values[p] = before[order[p]];
    return state;
  }

  // Moves the state to kb, bisecting while the matching is ambiguous. With
  // `force` the last bisection level keeps the optimal matching anyway.
  bool step(TrackState& state, Complex kb, int depth, bool force) const {
    const std::vector<Complex> targets = eigenvalues(kb);
    const Complex ratio = (kb - state.cur.k) / (state.cur.k - state.prev.k);
    const std::size_t n = targets.size();
    std::vector<Complex> predicted(n);
    for (std::size_t p = 0; p < n; ++p) {
      predicted[p] = state.cur.values[p] + (state.cur.values[p] - state.prev.values[p]) * ratio;
    }
    const std::vector<int> order = match(predicted, targets);
    const bool last = depth >= options_.max_bisections;
    if (!ambiguous(predicted, targets, order) || (last && force)) {
      state.prev = std::move(state.cur);
      state.cur.k = kb;
      state.cur.values.resize(n);
      for (std::size_t p = 0; p < n; ++p) state.cur.values[p] = targets[order[p]];
      return true;
    }
    if (last) return false;
    const Complex mid = 0.5 * (state.cur.k + kb);
    return step(state, mid, depth + 1, force) && step(state, kb, depth + 1, force);
  }

 private:
  bool ambiguous(const std::vector<Complex>& predicted, const std::vector<Complex>& targets,
                 const std::vector<int>& order) const {
    double scale = 1.0;
    for (const Complex& t : targets) scale = std::max(scale, std::abs(t));
    const double distinct = 1e-9 * scale;
    const std::size_t n = predicted.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const Complex ti = targets[order[i]];
        const Complex tj = targets[order[j]];
        if (std::abs(ti - tj) <= distinct || std::abs(predicted[i] - predicted[j]) <= distinct) {
          continue;
        }
        const double kept = std::abs(predicted[i] - ti) + std::abs(predicted[j] - tj);
        const double swapped = std::abs(predicted[i] - tj) + std::abs(predicted[j] - ti);
        if (swapped < options_.ambiguity_ratio * std::max(kept, 1e-14 * scale)) return true;
      }
    }
    return false;
  }

  const TightBindingModel& model_;
  int axis_;
  std::vector<double> transverse_;
  std::vector<double> mu_;
  TrackOptions options_;
};

// Bands are continued along the lifted line k + i*eta (eta = one grid step,
// so exceptional points on the real axis are passed on the same side every
// time) and read off at the real grid points by a vertical drop.
std::optional<std::vector<BandLoop>> track_once(const TightBindingModel& model, int axis,
                                                const std::vector<double>& transverse,
                                                const std::vector<double>& mu, int grid,
                                                const TrackOptions& options) {
  const double delta = kTwoPi / grid;
  const Complex lift(0.0, options.detour ? delta : 0.0);
  Tracker tracker(model, axis, transverse, mu, options);
  TrackState main = tracker.start(lift, delta);
  const std::size_t s = main.cur.values.size();
  std::vector<std::vector<Complex>> paths(s, std::vector<Complex>(grid));
  std::vector<std::vector<Complex>> lifted;  // main-path values at n = 0, 1, grid, grid + 1
  for (int n = 0; n <= grid + 1; ++n) {
    if (n > 0 && !tracker.step(main, Complex(n * delta) + lift, 0, false)) return std::nullopt;
    if (n <= 1 || n >= grid) lifted.push_back(main.cur.values);
    if (n >= grid) continue;
    if (options.detour) {
      TrackState drop = main;
      tracker.step(drop, Complex(n * delta), 0, true);
      for (std::size_t p = 0; p < s; ++p) paths[p][n] = drop.cur.values[p];
    } else {
      for (std::size_t p = 0; p < s; ++p) paths[p][n] = main.cur.values[p];
    }
  }

  // Where each path lands after one period, judged by position and by the
  // direction it continues in.
  std::vector<std::vector<double>> cost(s, std::vector<double>(s));
  for (std::size_t p = 0; p < s; ++p) {
    for (std::size_t q = 0; q < s; ++q) {
      cost[p][q] = std::abs(lifted[2][p] - lifted[0][q]) + std::abs(lifted[3][p] - lifted[1][q]);
    }
  }
  const std::vector<int> next = assign_min_cost(cost);

  std::vector<BandLoop> loops;
  std::vector<char> seen(s, 0);
  for (std::size_t p = 0; p < s; ++p) {
    if (seen[p]) continue;
    BandLoop loop;
    loop.axis = axis;
    loop.transverse = transverse;
    loop.grid = grid;
    loop.multiplicity = 0;
    std::size_t q = p;
    while (!seen[q]) {
      seen[q] = 1;
      loop.samples.insert(loop.samples.end(), paths[q].begin(), paths[q].end());
      ++loop.multiplicity;
      q = static_cast<std::size_t>(next[q]);
    }
    loop.samples.push_back(paths[p][0]);
    loops.push_back(std::move(loop));
  }
  return loops;
}

double segment_distance(const std::vector<Complex>& pts, Complex e) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Complex a = pts[i];
    const Complex d = pts[i + 1] - a;
    const double len2 = std::norm(d);
    double t = len2 > 0.0 ? ((e - a) * std::conj(d)).real() / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    best = std::min(best, std::abs(e - (a + t * d)));
  }
  return best;
}

int polyline_winding(const std::vector<Complex>& pts, Complex e) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    total += std::arg((e - pts[i + 1]) * std::conj(e - pts[i]));
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

bool same_slice(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = std::remainder(a[i] - b[i], kTwoPi);
    if (std::abs(diff) > 1e-12) return false;
  }
  return true;
}

double pair_agreement(const BandLoop& q, const BandLoop& p, double tol) {
  if (q.multiplicity != p.multiplicity) return 0.0;
  const int g = std::min(q.grid, p.grid);
  const long long period = static_cast<long long>(q.multiplicity) * g;
  const long long sq = q.grid / g;
  const long long sp = p.grid / g;
  double best = 0.0;
  for (int a = 0; a < q.multiplicity; ++a) {
    long long hits = 0;
    for (long long n = 0; n < period; ++n) {
      const Complex eq = q.at(n * sq);
      const Complex ep = p.at(((-n + static_cast<long long>(a) * g) % period + period) % period * sp);
      if (std::abs(eq - ep) <= tol) ++hits;
    }
    best = std::max(best, static_cast<double>(hits) / static_cast<double>(period));
  }
  return best;
}

double combined_diameter(const std::vector<BandLoop>& a, const std::vector<BandLoop>& b) {
  double re_lo = std::numeric_limits<double>::infinity(), re_hi = -re_lo;
  double im_lo = re_lo, im_hi = -re_lo;
  for (const auto* set : {&a, &b}) {
    for (const BandLoop& loop : *set) {
      for (const Complex& e : loop.samples) {
        re_lo = std::min(re_lo, e.real());
        re_hi = std::max(re_hi, e.real());
        im_lo = std::min(im_lo, e.imag());
        im_hi = std::max(im_hi, e.imag());
      }
    }
  }
  return std::hypot(re_hi - re_lo, im_hi - im_lo);
}

void best_involution(const std::vector<std::vector<double>>& agree, std::vector<int>& current,
                     double score, std::vector<int>& best, double& best_score) {
  const int n = static_cast<int>(agree.size());
  int first = -1;
  for (int i = 0; i < n; ++i) {
    if (current[i] < 0) {
      first = i;
      break;
    }
  }
  if (first < 0) {
    if (score > best_score) {
      best_score = score;
      best = current;
    }
    return;
  }
  current[first] = first;
  best_involution(agree, current, score + agree[first][first], best, best_score);
  for (int j = first + 1; j < n; ++j) {
    if (current[j] >= 0) continue;
    current[first] = j;
    current[j] = first;
    best_involution(agree, current, score + 2.0 * agree[first][j], best, best_score);
    current[j] = -1;
  }
  current[first] = -1;
}

SymmetryOperator require_trs_dagger(const TightBindingModel& model,
                                    const std::optional<SymmetryOperator>& op) {
  if (op) {
    if (op->kind != SymmetryKind::TRSdag) {
      fail(ErrorCode::PreconditionFailed, "operator is not a TRS-dagger operator");
    }
    const SymmetryCheck check = check_symmetry(*op, model, 1e-8);
    if (!check.holds) {
      fail(ErrorCode::PreconditionFailed, "model fails the TRS-dagger check (residual " +
                                              std::to_string(check.max_residual) + ")");
    }
    return *op;
  }
  try {
    return find_intertwiner(SymmetryKind::TRSdag, model, 1e-10);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoIntertwiner) throw;
    fail(ErrorCode::PreconditionFailed, "model " + model.name() + " has no TRS-dagger symmetry");
  }
}

std::vector<double> mirrored(const std::vector<double>& transverse) {
  std::vector<double> out(transverse.size());
  for (std::size_t i = 0; i < transverse.size(); ++i) out[i] = -transverse[i];
  return out;
}

NuReport nu_at_grid(const TightBindingModel& model, Complex energy, int axis,
                    const std::vector<double>& transverse, int grid) {
  const std::vector<double> mu(model.dimension(), 0.0);
  const std::vector<double> mirror_k = mirrored(transverse);
  const bool same = same_slice(transverse, mirror_k);
  const auto loops = track_bands(model, axis, transverse, mu, grid);
  const auto mirror = same ? loops : track_bands(model, axis, mirror_k, mu, grid);
  const BandPairing pairing = pair_bands_trs_dagger(loops, mirror);

  NuReport report;
  report.transverse = transverse;
  report.pairing = pairing.pairs;
  report.self_paired = pairing.self_paired;
  bool defined = true;
  int total = 0;
  for (const auto& [q, p] : pairing.pairs) {
    const auto wq = band_winding(loops[q], energy);
    const auto wp = band_winding(mirror[p], energy);
    if (!wq || !wp) {
      defined = false;
      continue;
    }
    report.per_pair_windings.emplace_back(*wq, *wp);
    total += std::abs(*wq - *wp);
  }
  if (defined) {
    // Pairs are counted once over the TRS-dagger closed set of bands: the
    // slice itself, or the slice together with its mirror.
    if (total % 2 != 0) {
      std::ostringstream msg;
      msg << "TRS-dagger winding sum " << total << " is odd";
      fail(ErrorCode::PairingFailure, msg.str());
    }
    report.nu = total / 2;
  }
  return report;
}

}  // namespace

double BandLoop::diameter() const {
  double best = 0.0;
  if (samples.empty()) return 0.0;
  double re_lo = samples[0].real(), re_hi = re_lo, im_lo = samples[0].imag(), im_hi = im_lo;
  for (const Complex& e : samples) {
    re_lo = std::min(re_lo, e.real());
    re_hi = std::max(re_hi, e.real());
    im_lo = std::min(im_lo, e.imag());
    im_hi = std::max(im_hi, e.imag());
  }
  best = std::hypot(re_hi - re_lo, im_hi - im_lo);
  return best;
}

Complex BandLoop::at(long long n) const {
  const long long period = static_cast<long long>(multiplicity) * grid;
  return samples[static_cast<std::size_t>(((n % period) + period) % period)];
}

std::vector<BandLoop> track_bands(const TightBindingModel& model, int axis,
                                  const std::vector<double>& transverse,
                                  const std::vector<double>& mu, int grid,
                                  const TrackOptions& options) {
  if (axis < 0 || axis >= model.dimension()) fail(ErrorCode::DimensionError, "axis out of range");
  if (transverse.size() != static_cast<std::size_t>(model.dimension() - 1)) {
    fail(ErrorCode::DimensionError, "transverse momentum needs " +
                                        std::to_string(model.dimension() - 1) + " components");
  }
  std::vector<double> shift = mu;
  if (shift.empty()) shift.assign(model.dimension(), 0.0);
  if (shift.size() != static_cast<std::size_t>(model.dimension())) {
    fail(ErrorCode::DimensionError, "mu has the wrong length");
  }
  if (grid < 256) fail(ErrorCode::InvalidArgument, "band tracking needs at least 256 k-points");
  for (int attempt : {grid, 4 * grid}) {
    if (auto loops = track_once(model, axis, transverse, shift, attempt, options)) return *loops;
  }
  std::ostringstream msg;
  msg << "band matching stays ambiguous at " << 4 * grid << " k-points";
  fail(ErrorCode::BranchAmbiguity, msg.str());
}

std::optional<int> band_winding(const BandLoop& loop, Complex energy, double ill_tol) {
  const double reach = ill_tol * std::max(1.0, loop.diameter());
  const auto& pts = loop.samples;
  if (segment_distance(pts, energy) <= reach) {
    // E sits on the sampled loop. Folded segments enclose nothing, so the
    // winding is kept when every nearby point agrees.
    std::optional<int> common;
    for (int j = 0; j < 4; ++j) {
      const Complex probe = energy + 4.0 * reach * std::polar(1.0, std::numbers::pi * (0.25 + 0.5 * j));
      if (segment_distance(pts, probe) <= reach) return std::nullopt;
      const int w = polyline_winding(pts, probe);
      if (common && *common != w) return std::nullopt;
      common = w;
    }
    return common;
  }
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double step = std::arg((energy - pts[i + 1]) * std::conj(energy - pts[i]));
    if (std::abs(step) > 0.5 * std::numbers::pi) {
      fail(ErrorCode::NonIntegerPhase, "loop is under-resolved near the reference energy");
    }
  }
  return polyline_winding(pts, energy);
}

BandPairing pair_bands_trs_dagger(const std::vector<BandLoop>& loops,
                                  const std::vector<BandLoop>& mirror, double pair_tol) {
  if (loops.size() != mirror.size()) {
    fail(ErrorCode::PairingFailure, "slices carry different numbers of loops");
  }
  const int n = static_cast<int>(loops.size());
  const bool same = &loops == &mirror || [&] {
    for (int i = 0; i < n; ++i) {
      if (loops[i].samples != mirror[i].samples) return false;
    }
    return true;
  }();
  const double tol = pair_tol >= 0.0 ? pair_tol : 1e-6 * combined_diameter(loops, mirror);
  std::vector<std::vector<double>> agree(n, std::vector<double>(n));
  for (int q = 0; q < n; ++q) {
    for (int p = 0; p < n; ++p) agree[q][p] = pair_agreement(loops[q], mirror[p], tol);
  }

  std::vector<int> partner;
  if (same) {
    std::vector<int> current(n, -1);
    double best_score = -1.0;
    best_involution(agree, current, 0.0, partner, best_score);
  } else {
    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (int q = 0; q < n; ++q) {
      for (int p = 0; p < n; ++p) cost[q][p] = -agree[q][p];
    }
    partner = assign_min_cost(cost);
  }

  BandPairing out;
  for (int q = 0; q < n; ++q) {
    const int p = partner[q];
    if (agree[q][p] < 0.5) {
      std::ostringstream msg;
      msg << "loop " << q << " matches its best image on only " << agree[q][p] * 100.0
          << "% of k-points";
      fail(ErrorCode::PairingFailure, msg.str());
    }
    if (same && p == q) {
      out.self_paired.push_back(q);
    } else if (!same || q < p) {
      out.pairs.emplace_back(q, p);
      out.agreement.push_back(agree[q][p]);
    }
  }
  return out;
}

BandPairing pair_bands_trs_dagger(const std::vector<BandLoop>& loops, double pair_tol) {
  return pair_bands_trs_dagger(loops, loops, pair_tol);
}

NuReport nu_invariant(const TightBindingModel& model, Complex energy, int axis,
                      const std::vector<double>& transverse, int grid,
                      const std::optional<SymmetryOperator>& op) {
  require_trs_dagger(model, op);
  for (int g = grid;; g *= 4) {
    try {
      return nu_at_grid(model, energy, axis, transverse, g);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NonIntegerPhase || 4 * g > 16384) throw;
    }
  }
}

std::vector<NuRow> nu_table(const TightBindingModel& model, Complex energy, int axis, int points,
                            int grid, const std::optional<SymmetryOperator>& op) {
  if (model.dimension() != 2) {
    fail(ErrorCode::DimensionError, "transverse tables need a two-dimensional model");
  }
  if (points < 1) fail(ErrorCode::InvalidArgument, "table needs at least one point");
  const SymmetryOperator checked = require_trs_dagger(model, op);
  std::vector<NuRow> rows;
  for (int i = 0; i < points; ++i) {
    const double k = -std::numbers::pi + kTwoPi * i / points;
    rows.push_back({k, nu_invariant(model, energy, axis, {k}, grid, checked)});
  }
  return rows;
}

bool pbc_winding_vanishes_trs_dagger(const TightBindingModel& model, Complex energy, int axis,
                                     const std::vector<double>& transverse, int grid,
                                     const std::optional<SymmetryOperator>& op) {
  require_trs_dagger(model, op);
  const std::vector<double> mu(model.dimension(), 0.0);
  const WindingReport slice = winding_number(model, energy, mu, axis, transverse, grid);
  if (!slice.defined() || *slice.value == 0) return true;
  if (model.dimension() == 1) return false;
  // Scan the transverse torus: a slice winding that changes means det has
  // zeros on the mu = 0 torus.
  std::vector<int> others(model.dimension() - 1, 64);
  for (std::size_t t = 0; t < site_count(others); ++t) {
    const auto idx = site_coords(t, others);
    std::vector<double> k(idx.size());
    for (std::size_t m = 0; m < idx.size(); ++m) k[m] = kTwoPi * idx[m] / others[m];
    const WindingReport other = winding_number(model, energy, mu, axis, k, grid);
    if (!other.defined() || *other.value != *slice.value) return true;
  }
  return false;
}

}  // namespace nhse
