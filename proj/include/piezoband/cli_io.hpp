#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "piezoband/band_structure.hpp"
#include "piezoband/materials.hpp"

namespace piezoband::cli {

enum ExitCode : int { ok = 0, input_error = 2, numerical_failure = 3 };

/// The panel values shipped as the default sweep, F/m^2.
std::vector<double> default_sweep_values();

/// quantity,value,unit rows for the quasistatic model of one cell.
std::string effective_report_csv(const ShuntedCell& cell);

/// c_eff over a uniform C/S grid on [from, to], with the exact pole and zero
/// capacitances inserted as marker rows.
std::string effective_sweep_csv(const ShuntedCell& cell, double from, double to,
                                std::size_t points);

std::string bands_csv(const std::vector<Branch>& branches);
std::string stopbands_csv(const std::vector<StopbandInterval>& bands);

struct SweepSpec {
  std::vector<double> c_over_s_values;
  std::size_t k_points = 200;
  double omega_max = 0.0;  ///< 0 selects default_omega_max
  double flatness_tol = 1e-3;
  bool find_flat = false;
  ScanOptions scan;
};

struct SweepPanel {
  std::string file;
  std::string role;  ///< "panel", "flat" or "reference"
  double c_over_s = 0.0;
  std::string csv;
  std::vector<int> flat_branches;
};

struct SweepResult {
  double omega_max = 0.0;
  std::vector<SweepPanel> panels;  ///< manifest order
  std::string manifest;            ///< JSON text
};

/// Computes every panel (in parallel across panels) without touching the
/// filesystem.
SweepResult run_sweep(const ShuntedCell& cell, const SweepSpec& spec);

/// Writes the panel CSVs and manifest.json into `dir`, creating it if needed.
void write_sweep(const SweepResult& result, const std::filesystem::path& dir);

/// Reads a manifest back into the material cell and sweep settings.
std::pair<ShuntedCell, SweepSpec> read_manifest(const std::filesystem::path& path);

/// Entry point of the `piezoband` executable. Errors are reported on `err`
/// as one JSON object per line.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace piezoband::cli
