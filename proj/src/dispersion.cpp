#include "piezoband/dispersion.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "piezoband/errors.hpp"

namespace piezoband {

DispersionSample half_trace(const ShuntedCell& cell, double omega, double pole_rel_tol) {
  const auto response = cell_response(cell, omega, pole_rel_tol);
  DispersionSample s;
  s.omega = omega;
  s.denom = response.shunt.denom;
  if (!response.monodromy) {
    s.half_trace = std::numeric_limits<double>::quiet_NaN();
    s.status = SpectralStatus::pole;
    return s;
  }
  s.half_trace = response.monodromy->half_trace();
  s.status = std::abs(s.half_trace) <= 1.0 ? SpectralStatus::pass : SpectralStatus::stop;
  return s;
}

BlochWavenumber bloch_wavenumber_from_half_trace(double h, double period) {
  if (h > 1.0) return {0.0, std::acosh(h) / period};
  if (h < -1.0) return {std::numbers::pi / period, std::acosh(-h) / period};
  return {std::acos(h) / period, 0.0};
}

BlochWavenumber bloch_wavenumber(const ShuntedCell& cell, double omega) {
  const auto s = half_trace(cell, omega);
  if (s.status == SpectralStatus::pole) throw PoleError(omega);
  return bloch_wavenumber_from_half_trace(s.half_trace, cell.period());
}

}  // namespace piezoband
