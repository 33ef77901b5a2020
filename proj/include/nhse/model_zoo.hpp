#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nhse/lattice_model.hpp"
#include "nhse/symmetry.hpp"

namespace nhse {

using ParameterMap = std::map<std::string, double>;

struct DeclaredSymmetry {
  SymmetryKind kind;
  CMatrix u;
};

// Eigenvalues quoted for one parameter set; `overrides` are applied on top
// of the defaults.
struct ReferenceCase {
  ParameterMap overrides;
  std::vector<Complex> energies;
  std::string note;
};

struct ZooEntry {
  std::string id;
  std::string description;
  int dimension;
  int orbitals;
  std::vector<std::pair<std::string, double>> defaults;  // declaration order
  std::vector<DeclaredSymmetry> symmetries;
  std::vector<ReferenceCase> references;
};

const std::vector<ZooEntry>& zoo_entries();
const ZooEntry& zoo_entry(std::string_view id);  // UnknownId

// Throws UnknownId or UnknownParameter.
TightBindingModel build(std::string_view id, const ParameterMap& overrides = {});

ParameterMap resolved_parameters(std::string_view id, const ParameterMap& overrides = {});

std::vector<SymmetryOperator> declared_operators(std::string_view id);

// Closed-form bands of the s47 model:
//   E = (t1 + tm1) cos kx + (w1 + wm1) cos ky
//       +- sqrt(gamma^2 - [(t1 - tm1) sin kx + (w1 - wm1) sin ky]^2)
// with the principal square root; first element takes +.
std::pair<Complex, Complex> analytic_bands_s47(double kx, double ky,
                                               const ParameterMap& overrides = {});

}  // namespace nhse
