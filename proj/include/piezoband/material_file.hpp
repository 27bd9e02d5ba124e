#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "piezoband/materials.hpp"

namespace piezoband {

/// Physical dimension of a quantity; selects the accepted unit suffixes.
enum class Dimension {
  density,               // kg/m^3, g/cm^3
  stiffness,             // Pa, kPa, MPa, GPa
  length,                // m, cm, mm, um
  piezo_coefficient,     // C/m^2
  permittivity,          // F/m, nF/m, pF/m, eps0
  capacitance_per_area,  // F/m^2, mF/m^2, uF/m^2, nF/m^2, pF/m^2
  angular_frequency,     // rad/s, krad/s, Mrad/s, Grad/s, Hz, kHz, MHz, GHz
};

/// Parses "<number>[ ]<unit>" and converts to SI. A bare number is taken as SI.
/// Hz-family suffixes are converted to rad/s. Throws InputError.
double parse_quantity(std::string_view text, Dimension dim, const std::string& field = {});

/// Parses the key/value material format documented in docs/material_format.md.
/// Unknown or duplicate keys, missing required keys and invariant violations
/// throw InputError / MaterialError carrying the key and line number.
ShuntedCell parse_material_file(std::string_view text);

/// Canonical form: fixed key order, SI values, 17 significant digits, no units.
std::string serialize_material_file(const ShuntedCell& cell);

ShuntedCell load_material_file(const std::filesystem::path& path);

/// The shipped glass/PZT-5H defaults (identical to data/glass_pzt5h.mat).
std::string_view default_material_text();

/// Decimal text with 17 significant digits ("%.17g"); "inf", "-inf", "nan" for non-finite.
std::string format_double(double value);

}  // namespace piezoband
