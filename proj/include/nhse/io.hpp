#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "nhse/band_topology.hpp"
#include "nhse/lattice_model.hpp"
#include "nhse/spectral.hpp"
#include "nhse/symmetry.hpp"
#include "nhse/verify.hpp"

namespace nhse {

struct ModelFile {
  TightBindingModel model;
  std::vector<SymmetryOperator> symmetries;
  // One line per declared symmetry that failed re-verification at load.
  std::vector<std::string> warnings;
};

// Model file schema:
//   {"name": str, "dimension": d, "orbitals": s,
//    "hoppings": [{"vector": [int...], "re": [[..]], "im": [[..]]}],
//    "symmetries": [{"kind": str, "u_re": [[..]], "u_im": [[..]]}]}
// "im" and "u_im" may be omitted (zero). Throws ParseError with line or
// field context and InvariantViolation for model invariants.
ModelFile parse_model_json(std::string_view text);
ModelFile parse_model_file(const std::string& path);

std::string model_to_json(const TightBindingModel& model,
                          const std::vector<SymmetryOperator>& symmetries = {});

// Accepts a, a+bi, a-bi, bi (also i, -i) with no spaces.
Complex parse_complex(std::string_view text);
std::string format_complex(Complex value);

// Comma-separated reals, e.g. "0.1,-0.2".
std::vector<double> parse_real_list(std::string_view text);

// Header "re,im" then one row per eigenvalue in stored order.
void write_spectrum_csv(std::ostream& out, const SpectralResult& spectrum);

// Header "x_1,...,x_d,prob" then one row per site in site order.
void write_density_csv(std::ostream& out, const std::vector<double>& profile,
                       const std::vector<int>& sizes);

// Header "k_transverse,nu"; undefined entries are written as "ill_defined".
void write_nu_csv(std::ostream& out, const std::vector<NuRow>& rows);

// Scatter of eigenvalues in the complex plane; `marks` are drawn on top.
std::string spectrum_svg(const std::vector<Complex>& eigenvalues,
                         const std::vector<Complex>& marks = {}, const std::string& title = "");

// Heat map of a 2D site profile, or a bar profile in 1D.
std::string density_svg(const std::vector<double>& profile, const std::vector<int>& sizes,
                        const std::string& title = "");

}  // namespace nhse
