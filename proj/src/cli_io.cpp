#include "piezoband/cli_io.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "piezoband/errors.hpp"
#include "piezoband/kernels.hpp"
#include "piezoband/material_file.hpp"
#include "piezoband/quasistatic.hpp"

#ifndef PIEZOBAND_VERSION
#define PIEZOBAND_VERSION "0.0.0"
#endif

namespace piezoband::cli {
namespace {

using json = nlohmann::ordered_json;

constexpr double kMicro = 1e-6;

std::string fmt(double v) { return format_double(v); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'", path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'", "--out");
  out << text;
  if (!out) throw InputError("write failed for '" + path.string() + "'", "--out");
}

json grid_json(const ScanOptions& scan) {
  json g;
  g["base_points"] = scan.base_points;
  g["refine_factor"] = scan.refine_factor;
  g["geometric_levels"] = scan.geometric_levels;
  g["pole_rel_tol"] = scan.pole_rel_tol;
  return g;
}

std::vector<int> flat_indices(const std::vector<Branch>& branches, std::size_t k_points,
                              double tol) {
  std::vector<int> idx;
  for (const auto& br : branches)
    if (spans_zone(br, k_points) && relative_spread(br) < tol) idx.push_back(br.index);
  return idx;
}

}  // namespace

std::vector<double> default_sweep_values() {
  return {0.0, -1.0 * kMicro, -5.0 * kMicro, -10.67 * kMicro, -11.0 * kMicro,
          -12.0 * kMicro, -13.3 * kMicro, -14.0 * kMicro, -40.0 * kMicro};
}

std::string effective_report_csv(const ShuntedCell& cell) {
  const auto m = effective_model(cell);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::ostringstream out;
  out << "quantity,value,unit\n";
  out << "c_over_s," << fmt(cell.c_over_s) << ",F/m^2\n";
  out << "c_eff," << fmt(m.c_eff) << ",Pa\n";
  out << "rho_eff," << fmt(m.rho_eff) << ",kg/m^3\n";
  out << "v_eff," << fmt(m.v_eff.value_or(nan)) << ",m/s\n";
  out << "regime," << to_string(m.regime) << ",-\n";
  out << "c_inf_over_s," << fmt(m.special ? m.special->pole : nan) << ",F/m^2\n";
  out << "c0_over_s," << fmt(m.special ? m.special->zero : nan) << ",F/m^2\n";
  return out.str();
}

std::string effective_sweep_csv(const ShuntedCell& cell, double from, double to,
                                std::size_t points) {
  if (points < 2) throw InputError("sweep needs at least 2 points", "--sweep-points");
  if (!std::isfinite(from) || !std::isfinite(to) || !(to > from))
    throw InputError("sweep range must be finite with from < to", "--sweep-from");

  std::vector<double> values(points);
  for (std::size_t i = 0; i < points; ++i)
    values[i] = i + 1 == points ? to
                                : from + (to - from) * static_cast<double>(i) /
                                             static_cast<double>(points - 1);
  if (cell.piezo.e != 0.0) {
    const auto sc = special_capacitances(cell);
    for (double c : {sc.pole, sc.zero})
      if (c > from && c < to) values.push_back(c);
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());

  std::ostringstream out;
  out << "c_over_s_F_per_m2,c_over_s_uF_per_m2,c_eff_Pa,regime\n";
  for (double c : values) {
    const auto m = effective_model(with_c_over_s(cell, c));
    out << fmt(c) << ',' << fmt(c / kMicro) << ',' << fmt(m.c_eff) << ',' << to_string(m.regime)
        << '\n';
  }
  return out.str();
}

std::string bands_csv(const std::vector<Branch>& branches) {
  std::ostringstream out;
  out << "branch_index,KT_over_pi,omega_rad_per_s,f_Hz,group_velocity_m_per_s\n";
  for (const auto& br : branches) {
    const bool has_velocity = br.samples.size() >= 5;
    for (const auto& s : br.samples) {
      const double vg =
          has_velocity ? group_velocity(br, s.k) : std::numeric_limits<double>::quiet_NaN();
      out << br.index << ',' << fmt(s.k * br.period / std::numbers::pi) << ',' << fmt(s.omega)
          << ',' << fmt(s.omega / (2.0 * std::numbers::pi)) << ',' << fmt(vg) << '\n';
    }
  }
  return out.str();
}

std::string stopbands_csv(const std::vector<StopbandInterval>& bands) {
  std::ostringstream out;
  out << "omega_lo_rad_per_s,omega_hi_rad_per_s,f_lo_Hz,f_hi_Hz,quasistatic\n";
  for (const auto& b : bands) {
    out << fmt(b.omega_lo) << ',' << fmt(b.omega_hi) << ','
        << fmt(b.omega_lo / (2.0 * std::numbers::pi)) << ','
        << fmt(b.omega_hi / (2.0 * std::numbers::pi)) << ',' << (b.quasistatic ? "true" : "false")
        << '\n';
  }
  return out.str();
}

SweepResult run_sweep(const ShuntedCell& cell, const SweepSpec& spec) {
  validate(cell);
  if (spec.c_over_s_values.empty()) throw InputError("sweep needs at least one C/S value", "--c-over-s");
  if (spec.k_points < 2) throw InputError("k_points must be at least 2", "--k-points");
  if (!(spec.flatness_tol > 0.0))
    throw InputError("flatness tolerance must be positive", "--flatness-tol");

  SweepResult result;
  result.omega_max = spec.omega_max > 0.0 ? spec.omega_max : default_omega_max(cell);

  std::vector<double> values = spec.c_over_s_values;
  std::vector<std::string> roles(values.size(), "panel");
  if (spec.find_flat) {
    FlatSearchOptions fo;
    fo.flatness_tol = spec.flatness_tol;
    fo.k_points = spec.k_points;
    fo.omega_max = result.omega_max;
    fo.scan = spec.scan;
    const auto bracket = bracket_flat_capacitance(cell, 24, fo);
    if (!bracket) throw NumericalError("no sign change of the first-branch end slope inside (C0/S, Cinf/S)");
    values.push_back(find_flat_capacitance(cell, bracket->lo, bracket->hi, fo));
    roles.emplace_back("flat");
  }
  values.push_back(0.0);
  roles.emplace_back("reference");

  // Panels are independent; each runs its own scans serially so that the
  // parallel loop is over panels only.
  ScanOptions inner = spec.scan;
  inner.exec = Exec::serial;
  result.panels.resize(values.size());
  std::vector<std::exception_ptr> failures(values.size());
  for_each_index(values.size(), spec.scan.exec, [&](std::size_t i) {
    try {
      const auto panel_cell = with_c_over_s(cell, values[i]);
      const auto branches = trace_branches(panel_cell, spec.k_points, result.omega_max, inner);
      auto& p = result.panels[i];
      p.role = roles[i];
      p.c_over_s = values[i];
      p.csv = bands_csv(branches);
      p.flat_branches = flat_indices(branches, spec.k_points, spec.flatness_tol);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  });
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  int n = 0;
  for (auto& p : result.panels) {
    if (p.role == "reference") {
      p.file = "reference.csv";
    } else {
      ++n;
      p.file = (n < 10 ? "panel_0" : "panel_") + std::to_string(n) + ".csv";
    }
  }

  json m;
  m["tool"] = "piezoband";
  m["version"] = PIEZOBAND_VERSION;
  m["command"] = "sweep";
  m["material"] = serialize_material_file(with_c_over_s(cell, 0.0));
  m["c_over_s_F_per_m2"] = spec.c_over_s_values;
  m["find_flat"] = spec.find_flat;
  m["k_points"] = spec.k_points;
  m["omega_max_rad_per_s"] = result.omega_max;
  m["omega_max_requested_rad_per_s"] = spec.omega_max;
  m["flatness_tol"] = spec.flatness_tol;
  m["grid"] = grid_json(spec.scan);
  json panels = json::array();
  for (const auto& p : result.panels) {
    json j;
    j["file"] = p.file;
    j["role"] = p.role;
    j["c_over_s_F_per_m2"] = p.c_over_s;
    j["regime"] = std::string(to_string(classify_regime(with_c_over_s(cell, p.c_over_s))));
    j["flat_branches"] = p.flat_branches;
    panels.push_back(std::move(j));
  }
  m["panels"] = std::move(panels);
  result.manifest = m.dump(2) + "\n";
  return result;
}

void write_sweep(const SweepResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory '" + dir.string() + "'", "--out");
  for (const auto& p : result.panels) write_file(dir / p.file, p.csv);
  write_file(dir / "manifest.json", result.manifest);
}

std::pair<ShuntedCell, SweepSpec> read_manifest(const std::filesystem::path& path) {
  json m;
  try {
    m = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw InputError(std::string("manifest is not valid JSON: ") + e.what(), "--manifest");
  }
  try {
    SweepSpec spec;
    auto cell = parse_material_file(m.at("material").get<std::string>());
    spec.c_over_s_values = m.at("c_over_s_F_per_m2").get<std::vector<double>>();
    spec.find_flat = m.at("find_flat").get<bool>();
    spec.k_points = m.at("k_points").get<std::size_t>();
    spec.omega_max = m.at("omega_max_requested_rad_per_s").get<double>();
    spec.flatness_tol = m.at("flatness_tol").get<double>();
    const auto& g = m.at("grid");
    spec.scan.base_points = g.at("base_points").get<std::size_t>();
    spec.scan.refine_factor = g.at("refine_factor").get<std::size_t>();
    spec.scan.geometric_levels = g.at("geometric_levels").get<int>();
    spec.scan.pole_rel_tol = g.at("pole_rel_tol").get<double>();
    return {cell, spec};
  } catch (const json::exception& e) {
    throw InputError(std::string("manifest field missing or malformed: ") + e.what(), "--manifest");
  }
}

namespace {

struct Inputs {
  std::string material;
  std::string c_over_s;
  std::vector<std::string> c_over_s_list;
  std::size_t k_points = 200;
  std::string omega_max;
  std::string out;
  double flatness_tol = 1e-3;
  bool sweep = false;
  std::string sweep_from = "-40 uF/m2";
  std::string sweep_to = "0 uF/m2";
  std::size_t sweep_points = 401;
  std::string manifest;
  bool find_flat = false;
};

ShuntedCell load_cell(const Inputs& in) {
  auto cell = in.material.empty() ? parse_material_file(default_material_text())
                                  : load_material_file(in.material);
  if (!in.c_over_s.empty())
    cell = with_c_over_s(cell, parse_quantity(in.c_over_s, Dimension::capacitance_per_area,
                                              "--c-over-s"));
  validate(cell);
  return cell;
}

double omega_max_for(const Inputs& in, const ShuntedCell& cell) {
  if (in.omega_max.empty()) return default_omega_max(cell);
  const double w = parse_quantity(in.omega_max, Dimension::angular_frequency, "--omega-max");
  if (!(w > 0.0)) throw InputError("--omega-max must be positive", "--omega-max");
  return w;
}

void emit(const Inputs& in, const std::string& text, std::ostream& out) {
  if (in.out.empty() || in.out == "-")
    out << text;
  else
    write_file(in.out, text);
}

void report_error(std::ostream& err, const char* kind, const std::string& message,
                  const std::string& field, int line, int code) {
  json j;
  j["error"] = kind;
  j["message"] = message;
  if (!field.empty()) j["field"] = field;
  if (line > 0) j["line"] = line;
  j["exit_code"] = code;
  err << j.dump() << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Inputs in;
  CLI::App app{"Bloch band structure of a shunted elastic/piezoelectric bilayer", "piezoband"};
  app.set_version_flag("--version", std::string(PIEZOBAND_VERSION));
  app.require_subcommand(1);

  auto add_material = [&](CLI::App* sub) {
    sub->add_option("--material", in.material, "Material file (default: built-in glass/PZT-5H)")
        ->check(CLI::ExistingFile);
  };
  auto add_c = [&](CLI::App* sub) {
    sub->add_option("--c-over-s", in.c_over_s, "Shunt capacitance per area, e.g. -11uF/m2");
  };
  auto add_omega = [&](CLI::App* sub) {
    sub->add_option("--omega-max", in.omega_max, "Upper frequency, e.g. 30Mrad/s or 5MHz");
  };
  auto add_k = [&](CLI::App* sub) {
    sub->add_option("--k-points", in.k_points, "Wavenumber grid points over [0, pi/T]")
        ->check(CLI::Range(std::size_t{2}, std::size_t{1000000}));
  };
  auto add_out = [&](CLI::App* sub, const char* what) { sub->add_option("--out", in.out, what); };

  auto* effective = app.add_subcommand("effective", "Quasistatic effective model");
  add_material(effective);
  add_c(effective);
  add_out(effective, "Output CSV file (default: stdout)");
  effective->add_flag("--sweep", in.sweep, "Tabulate c_eff over a C/S range instead");
  effective->add_option("--sweep-from", in.sweep_from, "Lower C/S of the sweep");
  effective->add_option("--sweep-to", in.sweep_to, "Upper C/S of the sweep");
  effective->add_option("--sweep-points", in.sweep_points, "Uniform grid points of the sweep")
      ->check(CLI::Range(std::size_t{2}, std::size_t{10000000}));

  auto* bands = app.add_subcommand("bands", "Dispersion branches omega(K)");
  add_material(bands);
  add_c(bands);
  add_k(bands);
  add_omega(bands);
  add_out(bands, "Output CSV file (default: stdout)");

  auto* stop = app.add_subcommand("stopbands", "Stopband intervals");
  add_material(stop);
  add_c(stop);
  add_omega(stop);
  add_out(stop, "Output CSV file (default: stdout)");

  auto* sweep = app.add_subcommand("sweep", "Band structure for a list of C/S values");
  add_material(sweep);
  sweep->add_option("--c-over-s", in.c_over_s_list, "Comma-separated C/S values")
      ->delimiter(',');
  add_k(sweep);
  add_omega(sweep);
  sweep->add_option("--out", in.out, "Output directory")->required();
  sweep->add_option("--flatness-tol", in.flatness_tol, "Relative spread of a flat branch");
  sweep->add_flag("--find-flat", in.find_flat, "Add a panel at the flat-band capacitance");
  sweep->add_option("--manifest", in.manifest, "Re-run the sweep described by a manifest")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::CallForVersion& e) {
    out << PIEZOBAND_VERSION << '\n';
    return ok;
  } catch (const CLI::ParseError& e) {
    report_error(err, "input_error", e.what(), "", 0, input_error);
    return input_error;
  }

  try {
    if (effective->parsed()) {
      const auto cell = load_cell(in);
      if (in.sweep) {
        const double from =
            parse_quantity(in.sweep_from, Dimension::capacitance_per_area, "--sweep-from");
        const double to = parse_quantity(in.sweep_to, Dimension::capacitance_per_area, "--sweep-to");
        emit(in, effective_sweep_csv(cell, from, to, in.sweep_points), out);
      } else {
        emit(in, effective_report_csv(cell), out);
      }
    } else if (bands->parsed()) {
      const auto cell = load_cell(in);
      emit(in, bands_csv(trace_branches(cell, in.k_points, omega_max_for(in, cell))), out);
    } else if (stop->parsed()) {
      const auto cell = load_cell(in);
      emit(in, stopbands_csv(stopbands(cell, omega_max_for(in, cell))), out);
    } else if (sweep->parsed()) {
      ShuntedCell cell;
      SweepSpec spec;
      if (!in.manifest.empty()) {
        std::tie(cell, spec) = read_manifest(in.manifest);
      } else {
        cell = load_cell(in);
        spec.k_points = in.k_points;
        spec.flatness_tol = in.flatness_tol;
        spec.find_flat = in.find_flat;
        spec.omega_max = in.omega_max.empty() ? 0.0 : omega_max_for(in, cell);
        if (in.c_over_s_list.empty()) {
          spec.c_over_s_values = default_sweep_values();
        } else {
          for (const auto& v : in.c_over_s_list)
            spec.c_over_s_values.push_back(
                parse_quantity(v, Dimension::capacitance_per_area, "--c-over-s"));
        }
      }
      const auto result = run_sweep(cell, spec);
      write_sweep(result, in.out);
      out << "wrote " << result.panels.size() << " CSV files and manifest.json to " << in.out
          << '\n';
    }
    return ok;
  } catch (const InputError& e) {
    report_error(err, "input_error", e.what(), e.field(), e.line(), input_error);
    return input_error;
  } catch (const std::invalid_argument& e) {
    report_error(err, "input_error", e.what(), "", 0, input_error);
    return input_error;
  } catch (const NumericalError& e) {
    report_error(err, "numerical_failure", e.what(), "", 0, numerical_failure);
    return numerical_failure;
  } catch (const std::exception& e) {
    report_error(err, "internal_error", e.what(), "", 0, 1);
    return 1;
  }
}

}  // namespace piezoband::cli
