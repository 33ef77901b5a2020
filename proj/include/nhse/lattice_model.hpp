#pragma once

#include <complex>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nhse {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using HopVector = std::vector<int>;

struct HoppingTerm {
  HopVector vector;
  CMatrix matrix;
};

// A point e^{mu + i k} of the complexified Brillouin zone, one entry per axis.
struct ComplexMomentum {
  std::vector<double> mu;
  std::vector<double> k;
};

// Translation-invariant tight-binding model
//
//   H(k) = sum_j t_j e^{i k.j}
//
// with s x s hopping matrices t_j on a d-dimensional hypercubic lattice of
// unit lattice constant. Hopping vectors are unique; the model is immutable.
class TightBindingModel {
 public:
  TightBindingModel(std::string name, int dimension, int orbitals,
                    const std::vector<HoppingTerm>& hoppings);

  const std::string& name() const { return name_; }
  int dimension() const { return dimension_; }
  int orbitals() const { return orbitals_; }
  const std::map<HopVector, CMatrix>& hoppings() const { return hoppings_; }

  // Matrix at `j`, or nullptr when the model has no such term.
  const CMatrix* hopping(const HopVector& j) const;

  // Longest |j_axis| over all terms.
  int range(int axis) const;

  // The model with t_j -> t_{-j}^dagger, whose Bloch matrix is H(k)^dagger.
  TightBindingModel adjoint() const;

  std::vector<HoppingTerm> terms() const;

 private:
  std::string name_;
  int dimension_;
  int orbitals_;
  std::map<HopVector, CMatrix> hoppings_;
};

HopVector negate(const HopVector& j);

CMatrix bloch_hamiltonian(const TightBindingModel& model, std::span<const double> k);

// sum_j t_j e^{j.(mu + i k)}; reduces to bloch_hamiltonian at mu = 0.
CMatrix generalized_bloch(const TightBindingModel& model, const ComplexMomentum& z);

// d/dmu_axis of generalized_bloch: sum_j j_axis t_j e^{j.(mu + i k)}.
CMatrix generalized_bloch_mu_derivative(const TightBindingModel& model,
                                        const ComplexMomentum& z, int axis);

// Dense real-space Hamiltonian on an open L_1 x ... x L_d block.
// Block (x, x + j) holds t_j; sites are row-major over (x_1, ..., x_d) with
// the orbital index fastest.
CMatrix obc_hamiltonian(const TightBindingModel& model, std::span<const int> sizes);

// Row-major site index of a lattice coordinate.
std::size_t site_index(std::span<const int> coords, std::span<const int> sizes);
std::vector<int> site_coords(std::size_t index, std::span<const int> sizes);
std::size_t site_count(std::span<const int> sizes);

}  // namespace nhse
