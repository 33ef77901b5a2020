#include "nhse/lattice_model.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "nhse/error.hpp"

namespace nhse {

namespace {

std::string format_vector(const HopVector& j) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < j.size(); ++i) out << (i ? "," : "") << j[i];
  out << ')';
  return out.str();
}

void require_dimension(const TightBindingModel& model, std::size_t n, const char* what) {
  if (n != static_cast<std::size_t>(model.dimension())) {
    std::ostringstream msg;
    msg << what << " has " << n << " components, model dimension is " << model.dimension();
    fail(ErrorCode::DimensionError, msg.str());
  }
}

}  // namespace

TightBindingModel::TightBindingModel(std::string name, int dimension, int orbitals,
                                     const std::vector<HoppingTerm>& hoppings)
    : name_(std::move(name)), dimension_(dimension), orbitals_(orbitals) {
  if (dimension <= 0) fail(ErrorCode::InvariantViolation, "dimension must be positive");
  if (orbitals <= 0) fail(ErrorCode::InvariantViolation, "orbital count must be positive");
  bool any_nonzero = false;
  for (const auto& term : hoppings) {
    if (term.vector.size() != static_cast<std::size_t>(dimension)) {
      fail(ErrorCode::InvariantViolation,
           "hopping vector " + format_vector(term.vector) + " does not match dimension " +
               std::to_string(dimension));
    }
    if (term.matrix.rows() != orbitals || term.matrix.cols() != orbitals) {
      fail(ErrorCode::InvariantViolation, "hopping matrix at " + format_vector(term.vector) +
                                              " is not " + std::to_string(orbitals) + "x" +
                                              std::to_string(orbitals));
    }
    if (!term.matrix.allFinite()) {
      fail(ErrorCode::InvariantViolation,
           "hopping matrix at " + format_vector(term.vector) + " has non-finite entries");
    }
    if (!hoppings_.emplace(term.vector, term.matrix).second) {
      fail(ErrorCode::InvariantViolation, "duplicate vector " + format_vector(term.vector));
    }
    any_nonzero = any_nonzero || term.matrix.cwiseAbs().maxCoeff() > 0.0;
  }
  if (!any_nonzero) fail(ErrorCode::InvariantViolation, "model has no nonzero hopping matrix");
}

const CMatrix* TightBindingModel::hopping(const HopVector& j) const {
  auto it = hoppings_.find(j);
  return it == hoppings_.end() ? nullptr : &it->second;
}

int TightBindingModel::range(int axis) const {
  int r = 0;
  for (const auto& [j, t] : hoppings_) r = std::max(r, std::abs(j[axis]));
  return r;
}

TightBindingModel TightBindingModel::adjoint() const {
  std::vector<HoppingTerm> terms;
  terms.reserve(hoppings_.size());
  for (const auto& [j, t] : hoppings_) terms.push_back({negate(j), t.adjoint()});
  return TightBindingModel(name_ + "_adjoint", dimension_, orbitals_, terms);
}

std::vector<HoppingTerm> TightBindingModel::terms() const {
  std::vector<HoppingTerm> out;
  out.reserve(hoppings_.size());
  for (const auto& [j, t] : hoppings_) out.push_back({j, t});
  return out;
}

HopVector negate(const HopVector& j) {
  HopVector out(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out[i] = -j[i];
  return out;
}

CMatrix bloch_hamiltonian(const TightBindingModel& model, std::span<const double> k) {
  require_dimension(model, k.size(), "momentum");
  for (double km : k) {
    if (!std::isfinite(km)) fail(ErrorCode::InvalidArgument, "momentum is not finite");
  }
  const int s = model.orbitals();
  CMatrix h = CMatrix::Zero(s, s);
  for (const auto& [j, t] : model.hoppings()) {
    double phase = 0.0;
    for (std::size_t m = 0; m < k.size(); ++m) phase += k[m] * j[m];
    h += t * std::polar(1.0, phase);
  }
  return h;
}

CMatrix generalized_bloch(const TightBindingModel& model, const ComplexMomentum& z) {
  require_dimension(model, z.mu.size(), "mu");
  require_dimension(model, z.k.size(), "momentum");
  const int s = model.orbitals();
  CMatrix h = CMatrix::Zero(s, s);
  for (const auto& [j, t] : model.hoppings()) {
    double growth = 0.0;
    double phase = 0.0;
    for (std::size_t m = 0; m < z.k.size(); ++m) {
      growth += z.mu[m] * j[m];
      phase += z.k[m] * j[m];
    }
    h += t * std::polar(std::exp(growth), phase);
  }
  return h;
}

CMatrix generalized_bloch_mu_derivative(const TightBindingModel& model, const ComplexMomentum& z,
                                        int axis) {
  require_dimension(model, z.mu.size(), "mu");
  require_dimension(model, z.k.size(), "momentum");
  if (axis < 0 || axis >= model.dimension()) fail(ErrorCode::DimensionError, "axis out of range");
  const int s = model.orbitals();
  CMatrix h = CMatrix::Zero(s, s);
  for (const auto& [j, t] : model.hoppings()) {
    if (j[axis] == 0) continue;
    double growth = 0.0;
    double phase = 0.0;
    for (std::size_t m = 0; m < z.k.size(); ++m) {
      growth += z.mu[m] * j[m];
      phase += z.k[m] * j[m];
    }
    h += (static_cast<double>(j[axis]) * t) * std::polar(std::exp(growth), phase);
  }
  return h;
}

std::size_t site_count(std::span<const int> sizes) {
  std::size_t n = 1;
  for (int l : sizes) n *= static_cast<std::size_t>(l);
  return n;
}

std::size_t site_index(std::span<const int> coords, std::span<const int> sizes) {
  std::size_t index = 0;
  for (std::size_t m = 0; m < sizes.size(); ++m) index = index * sizes[m] + coords[m];
  return index;
}

std::vector<int> site_coords(std::size_t index, std::span<const int> sizes) {
  std::vector<int> coords(sizes.size());
  for (std::size_t m = sizes.size(); m-- > 0;) {
    coords[m] = static_cast<int>(index % sizes[m]);
    index /= sizes[m];
  }
  return coords;
}

CMatrix obc_hamiltonian(const TightBindingModel& model, std::span<const int> sizes) {
  require_dimension(model, sizes.size(), "lattice size");
  for (std::size_t m = 0; m < sizes.size(); ++m) {
    if (sizes[m] <= 0) fail(ErrorCode::InvalidArgument, "lattice sizes must be positive");
    if (model.range(static_cast<int>(m)) >= sizes[m]) {
      fail(ErrorCode::LatticeTooSmall, "hopping range " +
                                           std::to_string(model.range(static_cast<int>(m))) +
                                           " does not fit axis " + std::to_string(m) +
                                           " of length " + std::to_string(sizes[m]));
    }
  }
  const int s = model.orbitals();
  const std::size_t sites = site_count(sizes);
  const auto dim = static_cast<Eigen::Index>(sites * s);
  CMatrix h = CMatrix::Zero(dim, dim);
  std::vector<int> target(sizes.size());
  for (std::size_t site = 0; site < sites; ++site) {
    const std::vector<int> x = site_coords(site, sizes);
    for (const auto& [j, t] : model.hoppings()) {
      bool inside = true;
      for (std::size_t m = 0; m < sizes.size(); ++m) {
        target[m] = x[m] + j[m];
        inside = inside && target[m] >= 0 && target[m] < sizes[m];
      }
      if (!inside) continue;
      const auto col = static_cast<Eigen::Index>(site_index(target, sizes) * s);
      h.block(static_cast<Eigen::Index>(site * s), col, s, s) += t;
    }
  }
  return h;
}

}  // namespace nhse
