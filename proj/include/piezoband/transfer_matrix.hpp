#pragma once

#include <optional>

#include "piezoband/materials.hpp"

namespace piezoband {

/// Real 2x2 matrix mapping the state vector (u, sigma) at a layer entry to
/// its value at the layer exit.
struct TransferMatrix {
  double a11 = 1.0, a12 = 0.0;
  double a21 = 0.0, a22 = 1.0;

  double det() const { return a11 * a22 - a12 * a21; }
  double trace() const { return a11 + a22; }
  double half_trace() const { return 0.5 * (a11 + a22); }

  friend TransferMatrix operator*(const TransferMatrix& l, const TransferMatrix& r) {
    return {l.a11 * r.a11 + l.a12 * r.a21, l.a11 * r.a12 + l.a12 * r.a22,
            l.a21 * r.a11 + l.a22 * r.a21, l.a21 * r.a12 + l.a22 * r.a22};
  }
  bool operator==(const TransferMatrix&) const = default;
};

/// Coupling coefficients of the shunted piezo layer at one frequency.
struct ShuntCoefficients {
  double M1 = 0.0;  ///< h sin(k2 d2) / (Z2 omega)
  double M2 = 0.0;  ///< h (cos(k2 d2) - 1)
  double M3 = 0.0;  ///< h M1 - d2/eps
  /// S/C - M3. +infinity for an open circuit.
  double denom = 0.0;
  bool open_circuit = false;
};

/// Default relative pole threshold: |denom| < tol * d2/eps flags divergence.
inline constexpr double kPoleRelTol = 1e-9;

/// Elastic layer matrix; the omega -> 0 limit [[1, d1/c1], [0, 1]] is exact.
TransferMatrix elastic_layer_matrix(const ShuntedCell& cell, double omega);

/// Piezo layer with D = 0 (open electrodes), built with c^D.
TransferMatrix open_piezo_layer_matrix(const ShuntedCell& cell, double omega);

ShuntCoefficients shunt_coefficients(const ShuntedCell& cell, double omega);

/// Open-circuit matrix plus the rank-1 shunt correction
///   (1/denom) * [[M1 M2, M1^2], [M2^2, M2 M1]].
/// Returns nullopt when |denom| falls below the pole threshold.
std::optional<TransferMatrix> shunted_piezo_layer_matrix(const ShuntedCell& cell, double omega,
                                                         double pole_rel_tol = kPoleRelTol);

/// Unit-cell matrix m2 * m1 (elastic layer first). nullopt at a shunt pole.
std::optional<TransferMatrix> monodromy(const ShuntedCell& cell, double omega,
                                        double pole_rel_tol = kPoleRelTol);

/// Monodromy and shunt coefficients from a single evaluation of the layer
/// trigonometry. Used by the scanning kernels.
struct CellResponse {
  std::optional<TransferMatrix> monodromy;
  ShuntCoefficients shunt;
};
CellResponse cell_response(const ShuntedCell& cell, double omega, double pole_rel_tol = kPoleRelTol);

}  // namespace piezoband
