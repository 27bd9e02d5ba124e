#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "piezoband/dispersion.hpp"
#include "piezoband/kernels.hpp"
#include "piezoband/materials.hpp"

namespace piezoband {

/// Frequency-scan settings. Defaults: 2000 base points, x16 local refinement.
struct ScanOptions {
  std::size_t base_points = 2000;
  std::size_t refine_factor = 16;
  /// Extra points omega_1 * 2^-j, j = 1..geometric_levels, resolve the
  /// quasistatic end of the spectrum.
  int geometric_levels = 20;
  double pole_rel_tol = kPoleRelTol;
  Exec exec = Exec::parallel;
};

struct FrequencyInterval {
  double lo = 0.0;
  double hi = 0.0;
};

struct StopbandInterval {
  double omega_lo = 0.0;
  double omega_hi = 0.0;
  bool absolute = true;  ///< always true for this scalar 1D problem
  bool quasistatic = false;  ///< omega_lo == 0
};

/// Classified frequency axis [0, omega_max].
struct Spectrum {
  double omega_max = 0.0;
  std::vector<DispersionSample> samples;  ///< sorted by omega, refined
  std::vector<double> poles;              ///< shunt resonance frequencies
  std::vector<FrequencyInterval> passbands;
  std::vector<StopbandInterval> stopbands;
};

struct BranchSample {
  double k = 0.0;      ///< Floquet wavenumber, rad/m
  double omega = 0.0;  ///< rad/s
};

/// One dispersion branch omega(K), K ascending within [0, pi/T].
struct Branch {
  int index = 0;  ///< 1 = lowest
  double period = 0.0;
  std::vector<BranchSample> samples;
};

Spectrum scan_spectrum(const ShuntedCell& cell, double omega_max, const ScanOptions& options = {});

std::vector<StopbandInterval> stopbands(const ShuntedCell& cell, double omega_max,
                                        const ScanOptions& options = {});

/// Splits every passband of the spectrum at interior extrema of the half-trace.
std::vector<MonotoneSegment> monotone_segments(const ShuntedCell& cell, const Spectrum& spectrum,
                                               double pole_rel_tol = kPoleRelTol);

/// Branches on a uniform grid of k_points wavenumbers over [0, pi/T].
std::vector<Branch> trace_branches(const ShuntedCell& cell, std::size_t k_points, double omega_max,
                                   const ScanOptions& options = {});

/// Branches from an existing scan.
std::vector<Branch> trace_branches(const ShuntedCell& cell, const Spectrum& spectrum,
                                   std::size_t k_points, const ScanOptions& options = {});

/// d omega / dK from a five-point Lagrange stencil (central in the interior,
/// one-sided at the branch ends). Throws NumericalError below 5 samples and
/// std::invalid_argument for k outside the sampled range.
double group_velocity(const Branch& branch, double k);

/// (max omega - min omega) / mean omega over the branch samples.
double relative_spread(const Branch& branch);

/// True when the branch has a sample at every point of a k_points grid.
bool spans_zone(const Branch& branch, std::size_t k_points);

std::vector<Branch> detect_flat_bands(const ShuntedCell& cell, double omega_max,
                                      double flatness_tol = 1e-3, std::size_t k_points = 200,
                                      const ScanOptions& options = {});

/// (omega(pi/T) - omega(0)) / (pi/T) of the first branch, or empty when the
/// first branch does not span the zone.
std::optional<double> first_branch_end_slope(const ShuntedCell& cell, std::size_t k_points,
                                             double omega_max, const ScanOptions& options = {});

struct FlatSearchOptions {
  double flatness_tol = 1e-3;
  /// Bisection stops once the spread falls below flatness_tol * target_fraction.
  double target_fraction = 1e-2;
  std::size_t k_points = 200;
  double omega_max = 0.0;  ///< 0 selects default_omega_max
  ScanOptions scan;
};

/// Bisection in C/S on the sign of the first-branch end slope. Both bracket
/// ends must lie strictly inside the negative-stiffness interval
/// (std::invalid_argument otherwise); throws BracketError when the end slopes
/// share a sign.
double find_flat_capacitance(const ShuntedCell& cell, double c_lo, double c_hi,
                             const FlatSearchOptions& options = {});

/// First sign change of the first-branch end slope among `samples` interior
/// points of the negative-stiffness interval, scanning from C_inf/S downward.
std::optional<FrequencyInterval> bracket_flat_capacitance(const ShuntedCell& cell,
                                                          std::size_t samples = 24,
                                                          const FlatSearchOptions& options = {});

/// Slope of the first branch at the origin, from first-branch roots at
/// vanishing K with Richardson extrapolation. Throws NumericalError when the
/// spectrum has no passband at omega = 0.
double origin_slope(const ShuntedCell& cell, double omega_max = 0.0,
                    const ScanOptions& options = {});

/// d^2(half_trace)/d omega^2 at omega = 0, by Richardson-extrapolated
/// central differences on steps that stay below the lowest shunt pole.
double half_trace_curvature_at_origin(const ShuntedCell& cell);

/// Four times the centre of the first open-circuit Bragg gap; for gapless
/// cells four times pi v_eff / T.
double default_omega_max(const ShuntedCell& cell);

}  // namespace piezoband
