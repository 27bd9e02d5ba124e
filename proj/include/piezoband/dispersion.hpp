#pragma once

#include "piezoband/materials.hpp"
#include "piezoband/transfer_matrix.hpp"

namespace piezoband {

enum class SpectralStatus { pass, stop, pole };

/// Half-trace of the unit-cell matrix at one frequency.
struct DispersionSample {
  double omega = 0.0;
  /// (1/2) trace(m2 m1); NaN when status == pole.
  double half_trace = 0.0;
  /// Shunt denominator S/C - M3 at omega (+inf for open circuit).
  double denom = 0.0;
  SpectralStatus status = SpectralStatus::pass;
};

/// cos(K T) = half_trace. pass iff |half_trace| <= 1, pole iff the matrix diverged.
DispersionSample half_trace(const ShuntedCell& cell, double omega,
                            double pole_rel_tol = kPoleRelTol);

/// Complex Floquet wavenumber K = re + i im, with re in [0, pi/T].
struct BlochWavenumber {
  double re = 0.0;  ///< rad/m
  double im = 0.0;  ///< attenuation per unit length, 1/m
};

BlochWavenumber bloch_wavenumber_from_half_trace(double half_trace, double period);

/// Throws PoleError at a shunt pole.
BlochWavenumber bloch_wavenumber(const ShuntedCell& cell, double omega);

}  // namespace piezoband
