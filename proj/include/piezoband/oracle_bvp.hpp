#pragma once

// Layer transfer matrices rebuilt from the 1D piezoelectric boundary value
// problem: constitutive law sigma = cD u' - h D, D' = 0, sigma' = -rho w^2 u,
// and the electrode circuit Q = C V. Nothing here calls into the closed-form
// layer matrices; test code compares the two.

#include <cstddef>
#include <optional>

#include "piezoband/materials.hpp"
#include "piezoband/transfer_matrix.hpp"

namespace piezoband::oracle {

/// Relation between electrode charge and electric displacement:
/// Q = +S D (plus) or Q = -S D (minus). Only `plus` reproduces c_eff.
enum class ChargeSign { plus, minus };

/// State of the piezoelectric layer at one face.
struct LayerState {
  double u = 0.0;      ///< displacement, m
  double sigma = 0.0;  ///< stress, Pa
  double D = 0.0;      ///< electric displacement, C/m^2 (uniform in the layer)
  double V = 0.0;      ///< electrode voltage, V
};

struct OracleOptions {
  ChargeSign sign = ChargeSign::plus;
  /// The system is reported singular when |det| falls below this fraction
  /// of the sum of the magnitudes of its expansion terms.
  double singular_rel_tol = 1e-9;
};

/// Elastic layer by direct solve of u'' + k^2 u = 0. Requires omega > 0.
TransferMatrix elastic_matrix(const ElasticLayer& layer, double omega);

/// Exit state for the entry state (u0, sigma0) of a shunted piezo layer, or
/// empty when the 3x3 system for (A, B, D) is singular. c_over_s may be +-inf
/// (short circuit, V = 0). Requires omega > 0.
std::optional<LayerState> piezo_exit_state(const PiezoLayer& layer, double c_over_s, double omega,
                                           double u0, double sigma0,
                                           const OracleOptions& options = {});

/// Columns are the exit (u, sigma) for entry states (1, 0) and (0, 1).
std::optional<TransferMatrix> piezo_matrix(const PiezoLayer& layer, double c_over_s, double omega,
                                           const OracleOptions& options = {});

/// Determinant of the (A, B, D) system, divided by cD k; a smooth function of
/// omega whose zeros are the singular frequencies.
double system_determinant(const PiezoLayer& layer, double c_over_s, double omega,
                          const OracleOptions& options = {});

/// Second-order trapezoidal integration of (u, sigma) on `points` nodes,
/// with the circuit closed by superposition in D. Coarse cross-check only.
std::optional<TransferMatrix> piezo_matrix_fd(const PiezoLayer& layer, double c_over_s,
                                              double omega, std::size_t points = 501,
                                              const OracleOptions& options = {});

}  // namespace piezoband::oracle
