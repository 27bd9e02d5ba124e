#pragma once

#include <cmath>

namespace piezoband {

/// Purely elastic layer (SI units).
struct ElasticLayer {
  double rho = 0.0;  ///< mass density, kg/m^3
  double c = 0.0;    ///< longitudinal stiffness c33, Pa
  double d = 0.0;    ///< thickness, m

  bool operator==(const ElasticLayer&) const = default;
};

/// Piezoelectric layer with electroded faces (SI units).
struct PiezoLayer {
  double rho = 0.0;  ///< mass density, kg/m^3
  double cE = 0.0;   ///< stiffness at constant electric field c33^E, Pa
  double e = 0.0;    ///< piezoelectric constant e33, C/m^2
  double eps = 0.0;  ///< clamped permittivity eps33, F/m
  double d = 0.0;    ///< thickness, m

  /// Stiffened (open-circuit) modulus c^D = c^E + e^2/eps.
  double cD() const { return cE + e * e / eps; }

  bool operator==(const PiezoLayer&) const = default;
};

/// One period of the structure: elastic layer followed by a shunted piezo layer.
///
/// Only the ratio C/S of shunt capacitance to electrode area enters the
/// physics. c_over_s == 0 is the open-circuit limit (no shunt correction),
/// c_over_s == +/-infinity is a short circuit.
struct ShuntedCell {
  ElasticLayer elastic;
  PiezoLayer piezo;
  double c_over_s = 0.0;  ///< F/m^2, any real value including negative

  double period() const { return elastic.d + piezo.d; }
  bool open_circuit() const { return c_over_s == 0.0; }

  bool operator==(const ShuntedCell&) const = default;
};

/// Frequency-independent constants derived from a cell.
struct DerivedConstants {
  double h = 0.0;          ///< e/eps
  double Z1 = 0.0;         ///< sqrt(rho1 c1)
  double Z2 = 0.0;         ///< sqrt(rho2 cD)
  double slowness1 = 0.0;  ///< sqrt(rho1/c1); k1 = omega * slowness1
  double slowness2 = 0.0;  ///< sqrt(rho2/cD); k2 = omega * slowness2
  double cD = 0.0;
  double T = 0.0;  ///< period d1 + d2

  double k1(double omega) const { return omega * slowness1; }
  double k2(double omega) const { return omega * slowness2; }
};

/// Throws MaterialError naming the offending material-file key.
void validate(const ShuntedCell& cell);

DerivedConstants derive_constants(const ShuntedCell& cell);

/// Copy of `cell` with a different shunt capacitance per electrode area.
inline ShuntedCell with_c_over_s(ShuntedCell cell, double c_over_s) {
  cell.c_over_s = c_over_s;
  return cell;
}

}  // namespace piezoband
