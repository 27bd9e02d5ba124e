#include "piezoband/material_file.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>

#include "piezoband/errors.hpp"

namespace piezoband {
namespace {

constexpr double kVacuumPermittivity = 8.8541878128e-12;

// value * scale / divisor; submultiples divide by an exact power of ten so
// that e.g. "-11 uF/m2" gives the double nearest -1.1e-5.
struct UnitEntry {
  std::string_view name;
  double scale;
  double divisor = 1.0;
};

// Unit names are matched after removing '^', so "m^3" and "m3" are equivalent.
std::span<const UnitEntry> units_for(Dimension dim) {
  static constexpr std::array density{UnitEntry{"kg/m3", 1.0}, UnitEntry{"g/cm3", 1e3}};
  static constexpr std::array stiffness{UnitEntry{"Pa", 1.0}, UnitEntry{"kPa", 1e3},
                                        UnitEntry{"MPa", 1e6}, UnitEntry{"GPa", 1e9}};
  static constexpr std::array length{UnitEntry{"m", 1.0}, UnitEntry{"cm", 1.0, 1e2},
                                     UnitEntry{"mm", 1.0, 1e3}, UnitEntry{"um", 1.0, 1e6},
                                     UnitEntry{"\xC2\xB5m", 1.0, 1e6}};
  static constexpr std::array piezo{UnitEntry{"C/m2", 1.0}};
  static constexpr std::array permittivity{UnitEntry{"F/m", 1.0}, UnitEntry{"nF/m", 1.0, 1e9},
                                           UnitEntry{"pF/m", 1.0, 1e12},
                                           UnitEntry{"eps0", kVacuumPermittivity}};
  static constexpr std::array capacitance{
      UnitEntry{"F/m2", 1.0},   UnitEntry{"mF/m2", 1.0, 1e3}, UnitEntry{"uF/m2", 1.0, 1e6},
      UnitEntry{"\xC2\xB5" "F/m2", 1.0, 1e6}, UnitEntry{"nF/m2", 1.0, 1e9}, UnitEntry{"pF/m2", 1.0, 1e12}};
  static constexpr double two_pi = 2.0 * std::numbers::pi;
  static constexpr std::array frequency{
      UnitEntry{"rad/s", 1.0},      UnitEntry{"krad/s", 1e3},      UnitEntry{"Mrad/s", 1e6},
      UnitEntry{"Grad/s", 1e9},     UnitEntry{"Hz", two_pi},       UnitEntry{"kHz", two_pi * 1e3},
      UnitEntry{"MHz", two_pi * 1e6}, UnitEntry{"GHz", two_pi * 1e9}};
  switch (dim) {
    case Dimension::density: return density;
    case Dimension::stiffness: return stiffness;
    case Dimension::length: return length;
    case Dimension::piezo_coefficient: return piezo;
    case Dimension::permittivity: return permittivity;
    case Dimension::capacitance_per_area: return capacitance;
    case Dimension::angular_frequency: return frequency;
  }
  return {};
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct KeySpec {
  std::string_view key;
  Dimension dim;
  bool required;
};

constexpr std::array kKeys{
    KeySpec{"elastic.rho", Dimension::density, true},
    KeySpec{"elastic.c", Dimension::stiffness, true},
    KeySpec{"elastic.d", Dimension::length, true},
    KeySpec{"piezo.rho", Dimension::density, true},
    KeySpec{"piezo.cE", Dimension::stiffness, true},
    KeySpec{"piezo.e", Dimension::piezo_coefficient, true},
    KeySpec{"piezo.eps", Dimension::permittivity, true},
    KeySpec{"piezo.d", Dimension::length, true},
    KeySpec{"circuit.c_over_s", Dimension::capacitance_per_area, false},
};

double* slot(ShuntedCell& cell, std::string_view key) {
  if (key == "elastic.rho") return &cell.elastic.rho;
  if (key == "elastic.c") return &cell.elastic.c;
  if (key == "elastic.d") return &cell.elastic.d;
  if (key == "piezo.rho") return &cell.piezo.rho;
  if (key == "piezo.cE") return &cell.piezo.cE;
  if (key == "piezo.e") return &cell.piezo.e;
  if (key == "piezo.eps") return &cell.piezo.eps;
  if (key == "piezo.d") return &cell.piezo.d;
  if (key == "circuit.c_over_s") return &cell.c_over_s;
  return nullptr;
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::general, 17);
  (void)ec;
  return std::string(buf.data(), end);
}

double parse_quantity(std::string_view text, Dimension dim, const std::string& field) {
  const auto body = trim(text);
  if (body.empty()) throw InputError("empty value for '" + field + "'", field);

  double value = 0.0;
  const char* first = body.data();
  const char* last = body.data() + body.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr == first)
    throw InputError("cannot parse number in '" + std::string(body) + "' for '" + field + "'",
                     field);
  if (std::isnan(value))
    throw InputError("'" + field + "' must not be NaN", field);
  if (std::isinf(value) && dim != Dimension::capacitance_per_area)
    throw InputError("'" + field + "' must be finite", field);

  std::string unit(trim(std::string_view(ptr, static_cast<std::size_t>(last - ptr))));
  if (unit.empty()) return value;
  std::erase(unit, '^');
  for (const auto& entry : units_for(dim)) {
    if (entry.name == unit) return value * entry.scale / entry.divisor;
  }
  std::string accepted;
  for (const auto& entry : units_for(dim)) {
    if (!accepted.empty()) accepted += ", ";
    accepted += entry.name;
  }
  throw InputError("unknown unit '" + unit + "' for '" + field + "' (accepted: " + accepted + ")",
                   field);
}

ShuntedCell parse_material_file(std::string_view text) {
  ShuntedCell cell;
  std::map<std::string, int, std::less<>> seen;  // key -> line

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    auto line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw InputError("line " + std::to_string(line_no) + ": expected 'key = value'", {}, line_no);
    const std::string key(trim(line.substr(0, eq)));
    const auto value = line.substr(eq + 1);

    const auto spec = std::find_if(kKeys.begin(), kKeys.end(),
                                   [&](const KeySpec& k) { return k.key == key; });
    if (spec == kKeys.end())
      throw InputError("line " + std::to_string(line_no) + ": unknown key '" + key + "'", key,
                       line_no);
    if (seen.contains(key))
      throw InputError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'", key,
                       line_no);
    seen.emplace(key, line_no);

    try {
      *slot(cell, key) = parse_quantity(value, spec->dim, key);
    } catch (const InputError& err) {
      throw InputError("line " + std::to_string(line_no) + ": " + err.what(), key, line_no);
    }
  }

  for (const auto& spec : kKeys) {
    if (spec.required && !seen.contains(spec.key))
      throw InputError("missing required field '" + std::string(spec.key) + "'",
                       std::string(spec.key));
  }

  try {
    validate(cell);
  } catch (const MaterialError& err) {
    const auto it = seen.find(err.field());
    const int line = it == seen.end() ? 0 : it->second;
    throw MaterialError(err.what(), err.field(), line);
  }
  return cell;
}

std::string serialize_material_file(const ShuntedCell& cell) {
  std::ostringstream out;
  out << "# piezoband material file (SI units)\n";
  for (const auto& spec : kKeys) {
    auto copy = cell;
    out << spec.key << " = " << format_double(*slot(copy, spec.key)) << '\n';
  }
  return out.str();
}

ShuntedCell load_material_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open material file '" + path.string() + "'", "--material");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_material_file(buf.str());
}

std::string_view default_material_text() {
  return R"(# Glass / PZT-5H bilayer, 1 mm + 1 mm, open circuit.
#
# Glass: soda-lime, c33 = E (1 - nu) / ((1 + nu)(1 - 2 nu)) with E = 72 GPa, nu = 0.23.
# PZT-5H: c33^E, e33 and the clamped permittivity eps33^S = 1470 eps0 from the
# standard manufacturer dataset.
elastic.rho = 2500 kg/m^3
elastic.c   = 83.5 GPa
elastic.d   = 1 mm

piezo.rho   = 7500 kg/m^3
piezo.cE    = 117 GPa
piezo.e     = 23.3 C/m^2
piezo.eps   = 1470 eps0
piezo.d     = 1 mm

circuit.c_over_s = 0 uF/m^2
)";
}

}  // namespace piezoband
