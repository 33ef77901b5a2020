#include "nhse/model_zoo.hpp"

#include <cmath>

#include "nhse/error.hpp"

namespace nhse {

namespace {

const Complex I(0.0, 1.0);

CMatrix m2(Complex a, Complex b, Complex c, Complex d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

CMatrix sigma_x() { return m2(0, 1, 1, 0); }
CMatrix sigma_z() { return m2(1, 0, 0, -1); }
CMatrix identity2() { return m2(1, 0, 0, 1); }
CMatrix eps() { return m2(0, 1, -1, 0); }

std::vector<ZooEntry> make_entries() {
  std::vector<ZooEntry> zoo;
  zoo.push_back({"eq16",
                 "2D two-orbital model with time-reversal symmetry (U = I)",
                 2,
                 2,
                 {{"t1", 2.0}, {"tm1", 1.0}, {"w1", 1.5}, {"wm1", 3.3}, {"p1", 1.8}, {"pm1", 2.6},
                  {"c", 0.5}},
                 {{SymmetryKind::TRS, identity2()}},
                 {{{}, {Complex(-1.5, -0.195), Complex(-1.5, 0.195)}, "TRS partner pair"}}});
  zoo.push_back({"eq18",
                 "1D two-chain model with TRS-dagger (U = sigma_x)",
                 1,
                 2,
                 {{"tp", 1.0}, {"tm", 2.0}, {"gamma", 0.1}},
                 {{SymmetryKind::TRSdag, sigma_x()}},
                 {{{{"gamma", 0.0}}, {Complex(2.53, 0.0)}, "degenerate opposite-end pair"},
                  {{{"gamma", 0.1}}, {Complex(1.87, 0.64)}, "bidirectional mode"}}});
  zoo.push_back({"s37",
                 "2D two-orbital model with particle-hole symmetry",
                 2,
                 2,
                 {{"m", 1.5}, {"gamma", 1.0}, {"tx", 3.0}, {"ty", 2.5}, {"t", 1.0}, {"t_tilde", 2.0}},
                 {{SymmetryKind::PHS, eps()}},
                 {{{}, {Complex(2.24, 5.05), Complex(-2.24, -5.05)}, "PHS partner pair"}}});
  zoo.push_back({"s39",
                 "2D two-orbital model with chiral symmetry",
                 2,
                 2,
                 {{"m", 1.5}, {"tx", 3.0}, {"ty", 2.5}, {"t", 1.0}, {"t_tilde", 2.0}},
                 {{SymmetryKind::CS, eps()}},
                 {{{}, {Complex(4.36, 3.21), Complex(-4.36, 3.21)}, "CS partner pair"}}});
  zoo.push_back({"s41",
                 "2D two-orbital model with PHS-dagger (U = sigma_z)",
                 2,
                 2,
                 {{"t0_tilde", -1.0}, {"t0", 3.0}, {"tx", 2.0}, {"ty", 2.3}, {"gamma", 2.0}},
                 {{SymmetryKind::PHSdag, sigma_z()}},
                 {{{}, {Complex(1.37, -3.33), Complex(-1.37, -3.33)}, "PHS-dagger partner pair"}}});
  zoo.push_back({"s43",
                 "2D two-orbital model with sublattice symmetry (U = sigma_z)",
                 2,
                 2,
                 {{"t0", 3.0}, {"m", 1.5}, {"gamma1", 1.0}, {"gamma2", -2.0}, {"t1", 2.0},
                  {"tm1", 3.0}, {"w1", 2.3}, {"wm1", 4.0}},
                 {{SymmetryKind::SLS, sigma_z()}},
                 {{{}, {Complex(-4.87, 0.70), Complex(4.87, -0.70)}, "SLS partner pair"}}});
  zoo.push_back({"s45",
                 "2D two-orbital model with pseudo-Hermiticity (U = sigma_x)",
                 2,
                 2,
                 {{"t0", 3.0}, {"gamma", 2.0}, {"m1", 1.5}, {"m2", -3.0}, {"t1", 2.0}, {"tm1", 3.0},
                  {"w", 2.3}},
                 {{SymmetryKind::PseudoHermitian, sigma_x()}},
                 {{{}, {Complex(3.19, 0.80), Complex(3.19, -0.80)}, "pseudo-Hermitian partner pair"}}});
  zoo.push_back({"s47",
                 "2D two-chain model with TRS-dagger (U = sigma_x)",
                 2,
                 2,
                 {{"t1", 1.0}, {"tm1", 3.0}, {"w1", 1.0}, {"wm1", 2.0}, {"gamma", 2.0}},
                 {{SymmetryKind::TRSdag, sigma_x()}},
                 {{{{"gamma", 0.0}}, {Complex(2.29, 0.0)}, "degenerate opposite-corner pair"},
                  {{{"gamma", 0.1}}, {Complex(2.35, 1.68)}, "bidirectional mode"},
                  {{{"gamma", 2.0}}, {Complex(2.65, 1.0), Complex(-8.09, 0.0)},
                   "bidirectional and extended modes"}}});
  CMatrix one(1, 1);
  one << 1.0;
  zoo.push_back({"hatano_nelson",
                 "1D single-band chain with asymmetric hopping",
                 1,
                 1,
                 {{"tp", 1.0}, {"tm", 2.0}},
                 {{SymmetryKind::TRS, one}},
                 {}});
  return zoo;
}

std::vector<HoppingTerm> hoppings(const std::string& id, const ParameterMap& p) {
  auto v = [&](const char* name) { return p.at(name); };
  if (id == "eq16") {
    return {{{1, 0}, m2(v("t1"), 0, 0, v("w1"))},
            {{-1, 0}, m2(v("tm1"), 0, 0, v("wm1"))},
            {{0, 0}, m2(0, v("c"), v("c"), 0)},
            {{0, -1}, m2(0, v("pm1"), 0, 0)},
            {{0, 1}, m2(0, 0, v("p1"), 0)}};
  }
  if (id == "eq18") {
    return {{{1}, m2(v("tp"), 0, 0, v("tm"))},
            {{-1}, m2(v("tm"), 0, 0, v("tp"))},
            {{0}, v("gamma") * sigma_x()}};
  }
  if (id == "s37" || id == "s39") {
    const double gamma = id == "s37" ? v("gamma") : 0.0;
    const Complex onsite = v("m") + I * gamma;
    return {{{0, 0}, m2(onsite, v("t"), v("t_tilde"), -onsite)},
            {{1, 0}, v("tx") * sigma_z()},
            {{0, 1}, v("ty") * sigma_z()}};
  }
  if (id == "s41") {
    return {{{0, 0}, m2(I * v("gamma"), v("t0"), v("t0_tilde"), -2.0 * I * v("gamma"))},
            {{-1, 0}, v("tx") * sigma_x()},
            {{0, -1}, v("ty") * sigma_x()}};
  }
  if (id == "s43") {
    return {{{0, 0}, m2(0, v("t0") + v("m") + I * v("gamma1"), v("t0") - v("m") + I * v("gamma2"), 0)},
            {{-1, 0}, m2(0, v("tm1"), 0, 0)},
            {{0, -1}, m2(0, v("wm1"), 0, 0)},
            {{1, 0}, m2(0, 0, v("t1"), 0)},
            {{0, 1}, m2(0, 0, v("w1"), 0)}};
  }
  if (id == "s45") {
    return {{{0, 0}, m2(v("t0") + I * v("gamma"), v("m1"), v("m2"), v("t0") - I * v("gamma"))},
            {{1, 0}, m2(v("t1"), 0, 0, v("tm1"))},
            {{-1, 0}, m2(v("tm1"), 0, 0, v("t1"))},
            {{0, 1}, v("w") * sigma_x()},
            {{0, -1}, v("w") * sigma_x()}};
  }
  if (id == "s47") {
    std::vector<HoppingTerm> terms{{{1, 0}, m2(v("t1"), 0, 0, v("tm1"))},
                                   {{-1, 0}, m2(v("tm1"), 0, 0, v("t1"))},
                                   {{0, 1}, m2(v("w1"), 0, 0, v("wm1"))},
                                   {{0, -1}, m2(v("wm1"), 0, 0, v("w1"))}};
    terms.push_back({{0, 0}, v("gamma") * sigma_x()});
    return terms;
  }
  if (id == "hatano_nelson") {
    CMatrix right(1, 1), left(1, 1);
    right << v("tp");
    left << v("tm");
    return {{{1}, right}, {{-1}, left}};
  }
  fail(ErrorCode::UnknownId, "unknown model id '" + id + "'");
}

}  // namespace

const std::vector<ZooEntry>& zoo_entries() {
  static const std::vector<ZooEntry> entries = make_entries();
  return entries;
}

const ZooEntry& zoo_entry(std::string_view id) {
  for (const ZooEntry& entry : zoo_entries()) {
    if (entry.id == id) return entry;
  }
  fail(ErrorCode::UnknownId, "unknown model id '" + std::string(id) + "'");
}

ParameterMap resolved_parameters(std::string_view id, const ParameterMap& overrides) {
  const ZooEntry& entry = zoo_entry(id);
  ParameterMap params(entry.defaults.begin(), entry.defaults.end());
  for (const auto& [name, value] : overrides) {
    auto it = params.find(name);
    if (it == params.end()) {
      fail(ErrorCode::UnknownParameter,
           "model '" + entry.id + "' has no parameter '" + name + "'");
    }
    if (!std::isfinite(value)) {
      fail(ErrorCode::InvalidArgument, "parameter '" + name + "' is not finite");
    }
    it->second = value;
  }
  return params;
}

TightBindingModel build(std::string_view id, const ParameterMap& overrides) {
  const ZooEntry& entry = zoo_entry(id);
  const ParameterMap params = resolved_parameters(id, overrides);
  return TightBindingModel(entry.id, entry.dimension, entry.orbitals, hoppings(entry.id, params));
}

std::vector<SymmetryOperator> declared_operators(std::string_view id) {
  std::vector<SymmetryOperator> ops;
  for (const DeclaredSymmetry& sym : zoo_entry(id).symmetries) ops.emplace_back(sym.kind, sym.u);
  return ops;
}

std::pair<Complex, Complex> analytic_bands_s47(double kx, double ky, const ParameterMap& overrides) {
  const ParameterMap p = resolved_parameters("s47", overrides);
  const double t1 = p.at("t1"), tm1 = p.at("tm1"), w1 = p.at("w1"), wm1 = p.at("wm1");
  const double gamma = p.at("gamma");
  const double center = (t1 + tm1) * std::cos(kx) + (w1 + wm1) * std::cos(ky);
  const double shear = (t1 - tm1) * std::sin(kx) + (w1 - wm1) * std::sin(ky);
  const Complex root = std::sqrt(Complex(gamma * gamma - shear * shear, 0.0));
  return {center + root, center - root};
}

}  // namespace nhse
