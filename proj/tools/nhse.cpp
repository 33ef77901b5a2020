// Command-line front end: spectra, localization, windings, Ronkin data,
// TRS-dagger invariants, partner verification and the model zoo.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "nhse/amoeba.hpp"
#include "nhse/band_topology.hpp"
#include "nhse/error.hpp"
#include "nhse/io.hpp"
#include "nhse/model_zoo.hpp"
#include "nhse/parallel.hpp"
#include "nhse/spectral.hpp"
#include "nhse/verify.hpp"

using namespace nhse;
using json = nlohmann::json;

namespace {

// verify exits 1 below this share of sampled modes matching Table I.
constexpr double kVerifyThreshold = 0.9;

struct ModelArgs {
  std::string file;
  std::string zoo;
  std::vector<std::string> sets;
};

void add_model_options(CLI::App* cmd, ModelArgs& args) {
  auto* file = cmd->add_option("--model", args.file, "model JSON file");
  auto* zoo = cmd->add_option("--zoo", args.zoo, "zoo model id");
  file->excludes(zoo);
  cmd->add_option("--set", args.sets, "zoo parameter override k=v (repeatable)");
}

ParameterMap parse_sets(const std::vector<std::string>& sets) {
  ParameterMap out;
  for (const std::string& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      fail(ErrorCode::ParseError, "--set expects k=v, got '" + s + "'");
    }
    const auto values = parse_real_list(s.substr(eq + 1));
    if (values.size() != 1) fail(ErrorCode::ParseError, "--set expects one value in '" + s + "'");
    out[s.substr(0, eq)] = values[0];
  }
  return out;
}

ModelFile load_model(const ModelArgs& args) {
  if (!args.file.empty()) {
    if (!args.sets.empty()) fail(ErrorCode::InvalidArgument, "--set applies to --zoo models only");
    ModelFile loaded = parse_model_file(args.file);
    for (const std::string& w : loaded.warnings) std::cerr << "WARNING: " << w << "\n";
    return loaded;
  }
  if (args.zoo.empty()) fail(ErrorCode::InvalidArgument, "one of --model or --zoo is required");
  const ParameterMap overrides = parse_sets(args.sets);
  return ModelFile{build(args.zoo, overrides), declared_operators(args.zoo), {}};
}

std::vector<int> parse_sizes(const std::string& text, int dimension, const char* flag) {
  std::vector<int> out;
  for (double v : parse_real_list(text)) {
    if (v != static_cast<int>(v) || v <= 0) {
      fail(ErrorCode::InvalidArgument, std::string(flag) + " expects positive integers");
    }
    out.push_back(static_cast<int>(v));
  }
  if (out.size() == 1) out.assign(dimension, out[0]);
  if (static_cast<int>(out.size()) != dimension) {
    fail(ErrorCode::DimensionError, std::string(flag) + " needs 1 or " + std::to_string(dimension) +
                                        " values");
  }
  return out;
}

std::vector<double> parse_vector(const std::string& text, int count, const char* flag) {
  if (count == 0 && text.empty()) return {};
  std::vector<double> out = text.empty() ? std::vector<double>(count, 0.0) : parse_real_list(text);
  if (out.size() == 1 && count > 1) out.assign(count, out[0]);
  if (static_cast<int>(out.size()) != count) {
    fail(ErrorCode::DimensionError, std::string(flag) + " needs " + std::to_string(count) + " values");
  }
  return out;
}

int parse_axis(const std::string& text, int dimension) {
  int axis = -1;
  if (text == "x") axis = 0;
  else if (text == "y") axis = 1;
  else if (text == "z") axis = 2;
  else if (text.size() == 1 && text[0] >= '0' && text[0] <= '9') axis = text[0] - '0';
  if (axis < 0 || axis >= dimension) {
    fail(ErrorCode::InvalidArgument, "axis '" + text + "' is not valid in dimension " +
                                         std::to_string(dimension));
  }
  return axis;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::InvalidArgument, "cannot write " + path);
  out << text;
}

json complex_json(Complex e) { return format_complex(e); }

json report_json(const LocalizationReport& r) {
  json j = json::object();
  j["class"] = to_string(r.cls);
  j["mu_fit"] = r.mu_fit;
  j["mu_stderr"] = r.mu_stderr;
  j["signs"] = r.signs;
  j["bidirectional_axes"] = r.bidirectional_axes;
  if (r.subspace_dim > 0) j["subspace_dim"] = r.subspace_dim;
  json mass = json::array();
  for (const auto& [lo, hi] : r.boundary_mass) mass.push_back({lo, hi});
  j["boundary_mass"] = mass;
  return j;
}

json nu_json(const NuReport& r) {
  json j = json::object();
  j["transverse"] = r.transverse;
  j["nu"] = r.nu ? json(*r.nu) : json("ill_defined");
  json pairs = json::array();
  for (const auto& [q, p] : r.pairing) pairs.push_back({q, p});
  j["pairing"] = pairs;
  json windings = json::array();
  for (const auto& [a, b] : r.per_pair_windings) windings.push_back({a, b});
  j["per_pair_windings"] = windings;
  j["self_paired"] = r.self_paired;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-Hermitian skin effect toolkit"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker thread cap (default NHSE_THREADS or all cores)")
      ->check(CLI::PositiveNumber);

  // spectrum
  ModelArgs spec_model;
  std::string spec_bc = "obc", spec_size = "40", spec_out, spec_svg;
  int spec_kpoints = 64;
  auto* spectrum = app.add_subcommand("spectrum", "OBC or PBC eigenvalues as CSV");
  add_model_options(spectrum, spec_model);
  spectrum->add_option("--bc", spec_bc, "boundary condition")->check(CLI::IsMember({"obc", "pbc"}));
  spectrum->add_option("--size", spec_size, "OBC lattice size per axis (L or L1,L2)");
  spectrum->add_option("--kpoints", spec_kpoints, "PBC k-points per axis")->check(CLI::PositiveNumber);
  spectrum->add_option("--out", spec_out, "CSV output (default stdout)");
  spectrum->add_option("--svg", spec_svg, "SVG scatter output");

  // localize
  ModelArgs loc_model;
  std::string loc_size = "40", loc_energy, loc_out, loc_csv, loc_svg;
  double loc_match = 0.02;
  auto* localize = app.add_subcommand("localize", "fit the decay factor of one OBC eigenstate");
  add_model_options(localize, loc_model);
  localize->add_option("--size", loc_size, "OBC lattice size per axis");
  localize->add_option("--energy", loc_energy, "target eigenvalue, e.g. 1.87+0.64i")->required();
  localize->add_option("--match-tol", loc_match, "selector tolerance");
  localize->add_option("--out", loc_out, "JSON report (default stdout)");
  localize->add_option("--csv", loc_csv, "density CSV output");
  localize->add_option("--svg", loc_svg, "density SVG output");

  // winding
  ModelArgs wind_model;
  std::string wind_energy, wind_mu, wind_axis = "x", wind_transverse, wind_out;
  int wind_grid = 256;
  auto* winding = app.add_subcommand("winding", "winding number of det(E - H) along one axis");
  add_model_options(winding, wind_model);
  winding->add_option("--energy", wind_energy, "reference energy")->required();
  winding->add_option("--mu", wind_mu, "decay factor, comma-separated");
  winding->add_option("--axis", wind_axis, "x, y, z or index");
  winding->add_option("--transverse", wind_transverse, "transverse momenta, comma-separated");
  winding->add_option("--grid,--kpoints", wind_grid, "k-points along the axis")->check(CLI::Range(64, 1 << 20));
  winding->add_option("--out", wind_out, "JSON output (default stdout)");

  // ronkin
  ModelArgs ron_model;
  std::string ron_energy, ron_mu, ron_grid = "128", ron_out;
  double ron_gtol = 1e-3;
  bool ron_minimize = false;
  auto* ronkin = app.add_subcommand("ronkin", "Ronkin function value, gradient or minimum");
  add_model_options(ronkin, ron_model);
  ronkin->add_option("--energy", ron_energy, "reference energy")->required();
  ronkin->add_option("--mu", ron_mu, "decay factor (evaluation point or start)");
  ronkin->add_option("--grid", ron_grid, "quadrature nodes per axis (N or N1,N2)");
  ronkin->add_option("--gtol", ron_gtol, "gradient tolerance")->check(CLI::PositiveNumber);
  ronkin->add_flag("--minimize", ron_minimize, "minimize instead of evaluating");
  ronkin->add_option("--out", ron_out, "JSON output (default stdout)");

  // nu
  ModelArgs nu_model;
  std::string nu_energy, nu_axis = "x", nu_out, nu_pairs;
  int nu_grid = 64, nu_kpoints = 256;
  auto* nu = app.add_subcommand("nu", "TRS-dagger winding numbers as CSV");
  add_model_options(nu, nu_model);
  nu->add_option("--energy", nu_energy, "reference energy")->required();
  nu->add_option("--axis", nu_axis, "x, y, z or index");
  nu->add_option("--grid", nu_grid, "transverse momenta in 2D")->check(CLI::PositiveNumber);
  nu->add_option("--kpoints", nu_kpoints, "k-points for band tracking")->check(CLI::Range(256, 1 << 20));
  nu->add_option("--out", nu_out, "CSV output (default stdout)");
  nu->add_option("--pairs", nu_pairs, "JSON dump of band pairings and windings");

  // verify
  ModelArgs ver_model;
  std::string ver_symmetry, ver_size = "40", ver_out;
  std::vector<std::string> ver_energies;
  int ver_samples = 0;
  std::uint64_t ver_seed = 0;
  double ver_match = 1e-6;
  auto* verify = app.add_subcommand("verify", "skin-mode partner check for one symmetry");
  add_model_options(verify, ver_model);
  verify->add_option("--symmetry", ver_symmetry, "symmetry kind")->required();
  verify->add_option("--size", ver_size, "OBC lattice size per axis");
  verify->add_option("--samples", ver_samples, "bulk modes to check (0: all)")->check(CLI::NonNegativeNumber);
  verify->add_option("--seed", ver_seed, "sampling seed");
  verify->add_option("--energy", ver_energies, "additional eigenvalue to check (repeatable)");
  verify->add_option("--match-tol", ver_match, "partner tolerance");
  verify->add_option("--out", ver_out, "JSON report");

  // zoo
  auto* zoo = app.add_subcommand("zoo", "built-in models");
  zoo->require_subcommand(1);
  auto* zoo_list = zoo->add_subcommand("list", "list model ids");
  std::string export_id, export_out;
  std::vector<std::string> export_sets;
  auto* zoo_export = zoo->add_subcommand("export", "write a model file");
  zoo_export->add_option("id", export_id, "model id")->required();
  zoo_export->add_option("--set", export_sets, "parameter override k=v (repeatable)");
  zoo_export->add_option("--out", export_out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    std::cout.flush();
    std::fprintf(stderr, "ERROR %s: %s\n", to_string(ErrorCode::InvalidArgument), e.what());
    return 2;
  }

  try {
    if (threads > 0) set_thread_count(threads);

    if (*spectrum) {
      const ModelFile m = load_model(spec_model);
      SpectralResult result;
      if (spec_bc == "obc") {
        result = obc_spectrum(m.model, parse_sizes(spec_size, m.model.dimension(), "--size"));
      } else {
        result = pbc_spectrum(m.model, std::vector<int>(m.model.dimension(), spec_kpoints));
      }
      std::ostringstream csv;
      write_spectrum_csv(csv, result);
      write_text(spec_out, csv.str());
      if (!spec_svg.empty()) write_text(spec_svg, spectrum_svg(result.eigenvalues, {}, m.model.name()));
    } else if (*localize) {
      const ModelFile m = load_model(loc_model);
      const auto sizes = parse_sizes(loc_size, m.model.dimension(), "--size");
      EigenSelector selector{parse_complex(loc_energy), loc_match};
      const SpectralResult result = obc_spectrum(m.model, sizes);
      const std::size_t index = select_eigenvalue(result, selector);
      const auto profile = density_profile(result, index);
      json out = json::object();
      out["energy"] = complex_json(result.eigenvalues[index]);
      out["sizes"] = sizes;
      out["report"] = report_json(fit_decay_factor(profile, sizes));
      write_text(loc_out, out.dump(2) + "\n");
      if (!loc_csv.empty()) {
        std::ostringstream csv;
        write_density_csv(csv, profile, sizes);
        write_text(loc_csv, csv.str());
      }
      if (!loc_svg.empty()) {
        write_text(loc_svg, density_svg(profile, sizes, format_complex(result.eigenvalues[index])));
      }
    } else if (*winding) {
      const ModelFile m = load_model(wind_model);
      const int d = m.model.dimension();
      const WindingReport r = winding_number(
          m.model, parse_complex(wind_energy), parse_vector(wind_mu, d, "--mu"),
          parse_axis(wind_axis, d), parse_vector(wind_transverse, d - 1, "--transverse"), wind_grid);
      json out = json::object();
      out["value"] = r.value ? json(*r.value) : json("ill_defined");
      out["min_abs_det"] = r.min_abs_det;
      out["grid"] = r.k_points;
      write_text(wind_out, out.dump(2) + "\n");
    } else if (*ronkin) {
      const ModelFile m = load_model(ron_model);
      const int d = m.model.dimension();
      const Complex e = parse_complex(ron_energy);
      const auto mu = parse_vector(ron_mu, d, "--mu");
      const auto grid = parse_sizes(ron_grid, d, "--grid");
      json out = json::object();
      out["energy"] = complex_json(e);
      out["grid"] = grid;
      if (ron_minimize) {
        const RonkinMinimum r = ronkin_minimize(m.model, e, mu, grid, ron_gtol);
        out["mu_star"] = r.mu_star;
        out["report"] = to_string(r.report);
        out["value"] = r.value;
        out["gradient"] = r.gradient;
        out["iterations"] = r.iterations;
      } else {
        const RonkinEvaluation r = ronkin_evaluate(m.model, e, mu, grid);
        out["mu"] = mu;
        out["value"] = r.value;
        out["gradient"] = *r.gradient;
        out["excluded_nodes"] = r.excluded_nodes;
      }
      write_text(ron_out, out.dump(2) + "\n");
    } else if (*nu) {
      const ModelFile m = load_model(nu_model);
      const int d = m.model.dimension();
      const Complex e = parse_complex(nu_energy);
      const int axis = parse_axis(nu_axis, d);
      std::vector<NuRow> rows;
      if (d == 1) {
        rows.push_back({0.0, nu_invariant(m.model, e, axis, {}, nu_kpoints)});
      } else if (d == 2) {
        rows = nu_table(m.model, e, axis, nu_grid, nu_kpoints);
      } else {
        fail(ErrorCode::DimensionError, "nu tables support one or two dimensions");
      }
      std::ostringstream csv;
      write_nu_csv(csv, rows);
      write_text(nu_out, csv.str());
      if (!nu_pairs.empty()) {
        json dump = json::array();
        for (const NuRow& row : rows) dump.push_back(nu_json(row.report));
        write_text(nu_pairs, dump.dump(2) + "\n");
      }
    } else if (*verify) {
      const ModelFile m = load_model(ver_model);
      const SymmetryKind kind = parse_symmetry_kind(ver_symmetry);
      std::optional<SymmetryOperator> op;
      for (const SymmetryOperator& s : m.symmetries) {
        if (s.kind == kind) op = s;
      }
      if (!op) op = find_intertwiner(kind, m.model, 1e-10);
      const auto sizes = parse_sizes(ver_size, m.model.dimension(), "--size");
      PartnerCheckOptions options;
      options.seed = ver_seed;
      options.match_tol = ver_match;
      const SpectralResult result = obc_spectrum(m.model, sizes);
      const int n = ver_samples > 0 ? ver_samples : static_cast<int>(result.eigenvalues.size());
      std::vector<PartnerCheckResult> results;
      for (const std::string& text : ver_energies) {
        results.push_back(check_partner(result, *op, EigenSelector{parse_complex(text)}, options));
      }
      const std::size_t requested = results.size();
      const auto sampled = table1_check(m.model, *op, result, n, options);
      results.insert(results.end(), sampled.begin(), sampled.end());

      auto cell = [](Complex z) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.4f%+.4fi", z.real() == 0.0 ? 0.0 : z.real(),
                      z.imag() == 0.0 ? 0.0 : z.imag());
        return std::string(buf);
      };
      std::printf("%-22s %-22s %-17s %-17s %s\n", "energy", "partner", "verdict", "expected", "weak");
      json list = json::array();
      bool requested_ok = true;
      for (std::size_t i = 0; i < results.size(); ++i) {
        const PartnerCheckResult& r = results[i];
        if (i < requested) requested_ok = requested_ok && r.verdict == r.expected;
        std::printf("%-22s %-22s %-17s %-17s %s\n", cell(r.energy).c_str(), cell(r.partner_energy).c_str(),
                    to_string(r.verdict), to_string(r.expected), r.weakly_localized ? "yes" : "no");
        json j = json::object();
        j["energy"] = complex_json(r.energy);
        j["partner_energy"] = complex_json(r.partner_energy);
        j["verdict"] = to_string(r.verdict);
        j["expected"] = to_string(r.expected);
        j["weakly_localized"] = r.weakly_localized;
        j["requested"] = i < requested;
        j["report"] = report_json(r.report);
        j["partner_report"] = report_json(r.partner_report);
        list.push_back(std::move(j));
      }
      const double rate = agreement_rate(sampled);
      std::printf("checked %zu sampled modes, agreement %.4f (threshold %.2f)\n", sampled.size(), rate,
                  kVerifyThreshold);
      if (!ver_out.empty()) {
        json out = json::object();
        out["model"] = m.model.name();
        out["symmetry"] = to_string(kind);
        out["sizes"] = sizes;
        out["agreement"] = rate;
        out["threshold"] = kVerifyThreshold;
        out["results"] = std::move(list);
        write_text(ver_out, out.dump(2) + "\n");
      }
      return requested_ok && rate >= kVerifyThreshold ? 0 : 1;
    } else if (*zoo) {
      if (*zoo_list) {
        for (const ZooEntry& entry : zoo_entries()) {
          std::printf("%-14s %s\n", entry.id.c_str(), entry.description.c_str());
        }
      } else if (*zoo_export) {
        const TightBindingModel model = build(export_id, parse_sets(export_sets));
        write_text(export_out, model_to_json(model, declared_operators(export_id)));
      }
    }
  } catch (const Error& e) {
    std::cout.flush();
    std::fprintf(stderr, "ERROR %s: %s\n", to_string(e.code()), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::cout.flush();
    std::fprintf(stderr, "ERROR %s: %s\n", to_string(ErrorCode::SolverError), e.what());
    return 2;
  }
  return 0;
}
