#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "nhse/io.hpp"
#include "nhse/model_zoo.hpp"
#include "support.hpp"

using namespace nhse;
using namespace test_support;
using json = nlohmann::json;

namespace {

int count(const std::string& text, const std::string& needle) {
  int n = 0;
  for (std::size_t p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("complex literals") {
  CHECK(parse_complex("1") == Complex(1, 0));
  CHECK(parse_complex("-2.5") == Complex(-2.5, 0));
  CHECK(parse_complex("-8.09") == Complex(-8.09, 0));
  CHECK(parse_complex("1+2i") == Complex(1, 2));
  CHECK(parse_complex("1-2i") == Complex(1, -2));
  CHECK(parse_complex("-1.5-0.195i") == Complex(-1.5, -0.195));
  CHECK(parse_complex("3i") == Complex(0, 3));
  CHECK(parse_complex("-3i") == Complex(0, -3));
  CHECK(parse_complex("i") == Complex(0, 1));
  CHECK(parse_complex("-i") == Complex(0, -1));
  CHECK(parse_complex("2.65+i") == Complex(2.65, 1));
  CHECK(parse_complex("1e-3+2e+1i") == Complex(1e-3, 20));
  CHECK(parse_complex("-1E2-1e-2i") == Complex(-100, -0.01));
  for (const char* bad : {"", "1+", "abc", "1 + 2i", "1+2j", "ii", "1+2i3", "nan", "inf"}) {
    CAPTURE(bad);
    CHECK(error_code_of([&] { parse_complex(bad); }) == ErrorCode::ParseError);
  }
}

TEST_CASE("complex formatting round-trips") {
  for (Complex z : {Complex(0.1, -0.2), Complex(-8.09, 0.0), Complex(1e-300, 3e10), Complex(0, -0.0)}) {
    CHECK(parse_complex(format_complex(z)) == z);
  }
  CHECK(format_complex(Complex(1.5, -2.0)) == "1.5-2i");
  CHECK(format_complex(Complex(1.5, 2.0)) == "1.5+2i");
}

TEST_CASE("real lists") {
  CHECK(parse_real_list("0.1,-0.2") == std::vector<double>{0.1, -0.2});
  CHECK(parse_real_list("3") == std::vector<double>{3.0});
  CHECK(error_code_of([] { parse_real_list("1,,2"); }) == ErrorCode::ParseError);
  CHECK(error_code_of([] { parse_real_list(""); }) == ErrorCode::ParseError);
}

TEST_CASE("zoo export round-trips") {
  for (const ZooEntry& entry : zoo_entries()) {
    const auto model = build(entry.id);
    const std::string text = model_to_json(model, declared_operators(entry.id));
    const ModelFile back = parse_model_json(text);
    CAPTURE(entry.id);
    CHECK(back.model.name() == model.name());
    CHECK(back.model.dimension() == model.dimension());
    CHECK(back.model.orbitals() == model.orbitals());
    REQUIRE(back.model.hoppings().size() == model.hoppings().size());
    for (const auto& [j, t] : model.hoppings()) CHECK(max_abs(*back.model.hopping(j) - t) == 0.0);
    REQUIRE(back.symmetries.size() == entry.symmetries.size());
    CHECK(back.symmetries[0].kind == entry.symmetries[0].kind);
    // export is a fixed point
    CHECK(model_to_json(back.model, back.symmetries) == text);
  }
}

TEST_CASE("declared symmetry that fails is a warning") {
  json doc = json::parse(model_to_json(build("eq16"), declared_operators("eq16")));
  CHECK(parse_model_json(doc.dump()).warnings.empty());
  doc["hoppings"][0]["im"][0][0] = 1e-3;
  const ModelFile m = parse_model_json(doc.dump());
  REQUIRE(m.warnings.size() == 1);
  CHECK(m.warnings[0].find("trs") != std::string::npos);
  CHECK(m.symmetries.size() == 1);
}

TEST_CASE("schema errors name the field") {
  const std::string base = R"({"name": "x", "dimension": 1, "orbitals": 1,
    "hoppings": [{"vector": [1], "re": [[1.0]]}, {"vector": [-1], "re": [[2.0]]}]})";
  CHECK(parse_model_json(base).model.hoppings().size() == 2);

  json doc = json::parse(base);
  doc["hoppings"][1]["vector"] = {1};
  CHECK(error_code_of([&] { parse_model_json(doc.dump()); }) == ErrorCode::InvariantViolation);
  CHECK(message_of([&] { parse_model_json(doc.dump()); }).find("duplicate vector") != std::string::npos);

  doc = json::parse(base);
  doc["hoppings"][1]["vector"] = {1, 0};
  CHECK(error_code_of([&] { parse_model_json(doc.dump()); }) == ErrorCode::InvariantViolation);

  doc = json::parse(base);
  doc["hoppings"][1]["re"] = {{"a"}};
  CHECK(error_code_of([&] { parse_model_json(doc.dump()); }) == ErrorCode::ParseError);
  CHECK(message_of([&] { parse_model_json(doc.dump()); }).find("hoppings[1].re[0][0]") != std::string::npos);

  doc = json::parse(base);
  doc.erase("orbitals");
  CHECK(message_of([&] { parse_model_json(doc.dump()); }).find("orbitals") != std::string::npos);

  doc = json::parse(base);
  doc["symmetries"] = {{{"kind", "bogus"}, {"u_re", {{1.0}}}}};
  CHECK(message_of([&] { parse_model_json(doc.dump()); }).find("symmetries[0].kind") != std::string::npos);
}

TEST_CASE("malformed JSON reports the line") {
  const std::string text = "{\n  \"name\": \"x\",\n  \"dimension\": 1,\n  oops\n}";
  CHECK(error_code_of([&] { parse_model_json(text); }) == ErrorCode::ParseError);
  CHECK(message_of([&] { parse_model_json(text); }).find("line 4") != std::string::npos);
  CHECK(error_code_of([] { parse_model_file("/nonexistent/model.json"); }) == ErrorCode::ParseError);
}

TEST_CASE("CSV writers") {
  const SpectralResult r = obc_spectrum(build("eq18"), {40});
  std::ostringstream spectrum;
  write_spectrum_csv(spectrum, r);
  const std::string s = spectrum.str();
  CHECK(s.rfind("re,im\n", 0) == 0);
  CHECK(count(s, "\n") == 81);

  std::ostringstream density;
  const std::vector<int> sizes{3, 4};
  write_density_csv(density, std::vector<double>(12, 1.0 / 12), sizes);
  std::istringstream lines(density.str());
  std::string header, first, last, line;
  std::getline(lines, header);
  std::getline(lines, first);
  while (std::getline(lines, line)) last = line;
  CHECK(header == "x_1,x_2,prob");
  CHECK(first.rfind("0,0,", 0) == 0);
  CHECK(last.rfind("2,3,", 0) == 0);

  std::vector<NuRow> rows(2);
  rows[0].k_transverse = -3.0;
  rows[0].report.nu = 1;
  rows[1].k_transverse = 0.5;
  std::ostringstream nu;
  write_nu_csv(nu, rows);
  CHECK(nu.str() == "k_transverse,nu\n-3,1\n0.5,ill_defined\n");
}

TEST_CASE("SVG output") {
  const std::string s = spectrum_svg({Complex(0, 0), Complex(1, 1), Complex(-1, 2)}, {Complex(1, 1)}, "a<b");
  CHECK(s.rfind("<svg", 0) == 0);
  CHECK(count(s, "<circle") == 4);
  CHECK(s.find("a&lt;b") != std::string::npos);
  const std::string d = density_svg(std::vector<double>(12, 1.0 / 12), {3, 4});
  CHECK(count(d, "<rect") == 12 + 2);
  CHECK(error_code_of([] { density_svg(std::vector<double>(8, 0.125), {2, 2, 2}); }) ==
        ErrorCode::DimensionError);
}
