#include "nhse/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "nhse/error.hpp"

namespace nhse {

namespace {

using json = nlohmann::json;

constexpr double kSymmetryTol = 1e-10;

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  fail(ErrorCode::ParseError, field + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) field_error(where, std::string("missing field '") + key + "'");
  return *it;
}

int read_int(const json& v, const std::string& field) {
  if (!v.is_number_integer()) field_error(field, "expected an integer");
  return v.get<int>();
}

double read_real(const json& v, const std::string& field) {
  if (!v.is_number()) field_error(field, "expected a number");
  return v.get<double>();
}

Eigen::MatrixXd read_matrix(const json& v, int side, const std::string& field) {
  if (!v.is_array() || static_cast<int>(v.size()) != side) {
    field_error(field, "expected " + std::to_string(side) + " rows");
  }
  Eigen::MatrixXd m(side, side);
  for (int r = 0; r < side; ++r) {
    const json& row = v[r];
    const std::string rf = field + "[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<int>(row.size()) != side) {
      field_error(rf, "expected " + std::to_string(side) + " entries");
    }
    for (int c = 0; c < side; ++c) m(r, c) = read_real(row[c], rf + "[" + std::to_string(c) + "]");
  }
  return m;
}

CMatrix read_complex(const json& obj, const char* re, const char* im, int side,
                     const std::string& where) {
  CMatrix m = read_matrix(require(obj, re, where), side, where + "." + re).cast<Complex>();
  if (auto it = obj.find(im); it != obj.end()) {
    m += Complex(0.0, 1.0) * read_matrix(*it, side, where + "." + im).cast<Complex>();
  }
  return m;
}

json matrix_json(const CMatrix& m, bool imaginary) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v = imaginary ? m(r, c).imag() : m(r, c).real();
      row.push_back(v == 0.0 ? 0.0 : v);  // no -0.0, import would not keep it
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

bool parse_double(std::string_view text, double& out) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::string fixed(double v, int digits = 2) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << (std::abs(v) < 0.5 * std::pow(10.0, -digits) ? 0.0 : v);
  return s.str();
}

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string escape_xml(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Blue-to-yellow ramp for t in [0, 1].
std::string ramp(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(68 + t * (253 - 68)));
  const int g = static_cast<int>(std::lround(1 + t * (231 - 1)));
  const int b = static_cast<int>(std::lround(84 + t * (37 - 84)));
  std::ostringstream s;
  s << '#' << std::hex << std::setfill('0') << std::setw(2) << r << std::setw(2) << g << std::setw(2) << b;
  return s.str();
}

}  // namespace

ModelFile parse_model_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(byte > 0 ? byte - 1 : 0), '\n');
    fail(ErrorCode::ParseError, "line " + std::to_string(line) + ": malformed JSON");
  }
  if (!doc.is_object()) field_error("$", "expected an object");
  const json& name_v = require(doc, "name", "$");
  if (!name_v.is_string()) field_error("name", "expected a string");
  const int dimension = read_int(require(doc, "dimension", "$"), "dimension");
  const int orbitals = read_int(require(doc, "orbitals", "$"), "orbitals");
  if (dimension <= 0) fail(ErrorCode::InvariantViolation, "dimension must be positive");
  if (orbitals <= 0) fail(ErrorCode::InvariantViolation, "orbital count must be positive");

  const json& hops = require(doc, "hoppings", "$");
  if (!hops.is_array()) field_error("hoppings", "expected an array");
  std::vector<HoppingTerm> terms;
  for (std::size_t i = 0; i < hops.size(); ++i) {
    const std::string where = "hoppings[" + std::to_string(i) + "]";
    const json& h = hops[i];
    if (!h.is_object()) field_error(where, "expected an object");
    const json& vec = require(h, "vector", where);
    if (!vec.is_array()) field_error(where + ".vector", "expected an array");
    if (static_cast<int>(vec.size()) != dimension) {
      fail(ErrorCode::InvariantViolation, where + ".vector has length " +
                                              std::to_string(vec.size()) + ", dimension is " +
                                              std::to_string(dimension));
    }
    HoppingTerm term;
    for (std::size_t m = 0; m < vec.size(); ++m) {
      term.vector.push_back(read_int(vec[m], where + ".vector[" + std::to_string(m) + "]"));
    }
    term.matrix = read_complex(h, "re", "im", orbitals, where);
    terms.push_back(std::move(term));
  }

  ModelFile out{TightBindingModel(name_v.get<std::string>(), dimension, orbitals, terms), {}, {}};
  if (auto it = doc.find("symmetries"); it != doc.end()) {
    if (!it->is_array()) field_error("symmetries", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string where = "symmetries[" + std::to_string(i) + "]";
      const json& s = (*it)[i];
      if (!s.is_object()) field_error(where, "expected an object");
      const json& kind_v = require(s, "kind", where);
      if (!kind_v.is_string()) field_error(where + ".kind", "expected a string");
      SymmetryKind kind;
      try {
        kind = parse_symmetry_kind(kind_v.get<std::string>());
      } catch (const Error& e) {
        field_error(where + ".kind", e.what());
      }
      SymmetryOperator op(kind, read_complex(s, "u_re", "u_im", orbitals, where));
      const SymmetryCheck check = check_symmetry(op, out.model, kSymmetryTol);
      if (!check.holds) {
        std::ostringstream msg;
        msg << "declared " << to_string(kind) << " fails verification (residual "
            << check.max_residual << ")";
        out.warnings.push_back(msg.str());
      }
      out.symmetries.push_back(std::move(op));
    }
  }
  return out;
}

ModelFile parse_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ParseError, path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_model_json(buf.str());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) fail(e.code(), path + ": " + e.what());
    throw;
  }
}

std::string model_to_json(const TightBindingModel& model,
                          const std::vector<SymmetryOperator>& symmetries) {
  json doc = json::object();
  doc["name"] = model.name();
  doc["dimension"] = model.dimension();
  doc["orbitals"] = model.orbitals();
  json hops = json::array();
  for (const auto& [j, t] : model.hoppings()) {
    json h = json::object();
    h["vector"] = j;
    h["re"] = matrix_json(t, false);
    h["im"] = matrix_json(t, true);
    hops.push_back(std::move(h));
  }
  doc["hoppings"] = std::move(hops);
  if (!symmetries.empty()) {
    json syms = json::array();
    for (const SymmetryOperator& op : symmetries) {
      json s = json::object();
      s["kind"] = to_string(op.kind);
      s["u_re"] = matrix_json(op.u, false);
      s["u_im"] = matrix_json(op.u, true);
      syms.push_back(std::move(s));
    }
    doc["symmetries"] = std::move(syms);
  }
  return doc.dump(2) + "\n";
}

Complex parse_complex(std::string_view text) {
  auto bad = [&]() -> Complex {
    fail(ErrorCode::ParseError, "malformed complex literal '" + std::string(text) + "'");
  };
  if (text.empty()) return bad();
  if (text.back() != 'i') {
    double re;
    if (!parse_double(text, re)) return bad();
    return {re, 0.0};
  }
  const std::string_view body = text.substr(0, text.size() - 1);
  // Split at the last sign that is not leading and not part of an exponent.
  std::size_t split = std::string_view::npos;
  for (std::size_t p = body.size(); p-- > 1;) {
    if ((body[p] == '+' || body[p] == '-') && body[p - 1] != 'e' && body[p - 1] != 'E') {
      split = p;
      break;
    }
  }
  auto imag_part = [&](std::string_view s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    double v;
    if (!parse_double(s, v)) bad();
    return v;
  };
  if (split == std::string_view::npos) return {0.0, imag_part(body)};
  double re;
  if (!parse_double(body.substr(0, split), re)) return bad();
  return {re, imag_part(body.substr(split))};
}

std::string format_complex(Complex value) {
  std::string out = shortest(value.real());
  if (!std::signbit(value.imag())) out += "+";
  out += shortest(value.imag()) + "i";
  return out;
}

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    const std::string_view item = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    double v;
    if (!parse_double(item, v)) {
      fail(ErrorCode::ParseError, "malformed real list '" + std::string(text) + "'");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

void write_spectrum_csv(std::ostream& out, const SpectralResult& spectrum) {
  out << "re,im\n";
  for (Complex e : spectrum.eigenvalues) out << shortest(e.real()) << ',' << shortest(e.imag()) << '\n';
}

void write_density_csv(std::ostream& out, const std::vector<double>& profile,
                       const std::vector<int>& sizes) {
  for (std::size_t m = 0; m < sizes.size(); ++m) out << "x_" << m + 1 << ',';
  out << "prob\n";
  for (std::size_t i = 0; i < profile.size(); ++i) {
    for (int c : site_coords(i, sizes)) out << c << ',';
    out << shortest(profile[i]) << '\n';
  }
}

void write_nu_csv(std::ostream& out, const std::vector<NuRow>& rows) {
  out << "k_transverse,nu\n";
  for (const NuRow& row : rows) {
    out << shortest(row.k_transverse) << ',';
    if (row.report.nu) {
      out << *row.report.nu;
    } else {
      out << "ill_defined";
    }
    out << '\n';
  }
}

std::string spectrum_svg(const std::vector<Complex>& eigenvalues, const std::vector<Complex>& marks,
                         const std::string& title) {
  constexpr double size = 480.0;
  constexpr double pad = 40.0;
  double re_lo = 0.0, re_hi = 0.0, im_lo = 0.0, im_hi = 0.0;
  bool first = true;
  for (const auto* set : {&eigenvalues, &marks}) {
    for (Complex e : *set) {
      if (first) {
        re_lo = re_hi = e.real();
        im_lo = im_hi = e.imag();
        first = false;
      }
      re_lo = std::min(re_lo, e.real());
      re_hi = std::max(re_hi, e.real());
      im_lo = std::min(im_lo, e.imag());
      im_hi = std::max(im_hi, e.imag());
    }
  }
  const double span = std::max({re_hi - re_lo, im_hi - im_lo, 1e-9}) * 1.1;
  const double re_mid = 0.5 * (re_lo + re_hi);
  const double im_mid = 0.5 * (im_lo + im_hi);
  auto px = [&](double re) { return pad + (re - re_mid + 0.5 * span) / span * (size - 2 * pad); };
  auto py = [&](double im) { return size - pad - (im - im_mid + 0.5 * span) / span * (size - 2 * pad); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
      << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << size - 2 * pad << "\" height=\""
      << size - 2 * pad << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (!title.empty()) {
    svg << "<text x=\"" << size / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"14\">" << escape_xml(title) << "</text>\n";
  }
  svg << "<text x=\"" << pad << "\" y=\"" << size - 12 << "\" font-family=\"sans-serif\" font-size=\"11\">Re ["
      << fixed(re_mid - 0.5 * span) << ", " << fixed(re_mid + 0.5 * span) << "]  Im ["
      << fixed(im_mid - 0.5 * span) << ", " << fixed(im_mid + 0.5 * span) << "]</text>\n";
  for (Complex e : eigenvalues) {
    svg << "<circle cx=\"" << fixed(px(e.real())) << "\" cy=\"" << fixed(py(e.imag()))
        << "\" r=\"1.6\" fill=\"#1f4e9c\"/>\n";
  }
  for (Complex e : marks) {
    svg << "<circle cx=\"" << fixed(px(e.real())) << "\" cy=\"" << fixed(py(e.imag()))
        << "\" r=\"4\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string density_svg(const std::vector<double>& profile, const std::vector<int>& sizes,
                        const std::string& title) {
  if (sizes.empty() || sizes.size() > 2) {
    fail(ErrorCode::DimensionError, "density plots support one or two dimensions");
  }
  if (profile.size() != site_count(sizes)) fail(ErrorCode::DimensionError, "profile size mismatch");
  constexpr double size = 480.0;
  constexpr double pad = 40.0;
  const double peak = std::max(*std::max_element(profile.begin(), profile.end()), 1e-300);
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
      << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    svg << "<text x=\"" << size / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"14\">" << escape_xml(title) << "</text>\n";
  }
  const double inner = size - 2 * pad;
  if (sizes.size() == 1) {
    const double w = inner / sizes[0];
    for (int x = 0; x < sizes[0]; ++x) {
      const double h = profile[x] / peak * inner;
      svg << "<rect x=\"" << fixed(pad + x * w) << "\" y=\"" << fixed(size - pad - h) << "\" width=\""
          << fixed(w) << "\" height=\"" << fixed(h) << "\" fill=\"#1f4e9c\"/>\n";
    }
  } else {
    // x runs left to right, y bottom to top.
    const double w = inner / sizes[0];
    const double h = inner / sizes[1];
    for (std::size_t i = 0; i < profile.size(); ++i) {
      const auto c = site_coords(i, sizes);
      svg << "<rect x=\"" << fixed(pad + c[0] * w) << "\" y=\"" << fixed(size - pad - (c[1] + 1) * h)
          << "\" width=\"" << fixed(w) << "\" height=\"" << fixed(h) << "\" fill=\""
          << ramp(profile[i] / peak) << "\"/>\n";
    }
  }
  svg << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << inner << "\" height=\"" << inner
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace nhse
