#pragma once

#include <optional>
#include <string_view>

#include "piezoband/materials.hpp"

namespace piezoband {

/// Sign class of the quasistatic effective stiffness.
enum class Regime { positive, negative, pole, zero };

std::string_view to_string(Regime regime);

/// C/S values where c_eff has its pole and its zero (F/m^2).
struct SpecialCapacitances {
  double pole = 0.0;  ///< C_inf/S: T/c_eff vanishes
  double zero = 0.0;  ///< C_0/S: piezo layer static stiffness vanishes
};

struct EffectiveModel {
  double c_eff = 0.0;    ///< Pa; +inf at the pole, 0 at the zero
  double rho_eff = 0.0;  ///< kg/m^3
  /// sqrt(c_eff/rho_eff); empty unless c_eff is positive and finite.
  std::optional<double> v_eff;
  /// Empty when e == 0 (no pole, no zero).
  std::optional<SpecialCapacitances> special;
  Regime regime = Regime::positive;
};

/// Static compliance of the shunted piezo layer, d2 / (cE + e^2/(C d2/S + eps)).
/// Written as d2 (g d2 + eps) / (cE (g d2 + eps) + e^2) so that the removable
/// point C/S = -eps/d2 evaluates to 0; +inf at C/S = C_0/S.
double piezo_static_compliance(const ShuntedCell& cell);

/// T / c_eff = d1/c1 + piezo_static_compliance.
double effective_compliance(const ShuntedCell& cell);

EffectiveModel effective_model(const ShuntedCell& cell);

/// Closed forms for C_inf/S and C_0/S. Throws std::invalid_argument when e == 0.
SpecialCapacitances special_capacitances(const ShuntedCell& cell);

/// positive outside [C_0/S, C_inf/S], negative strictly inside, pole/zero at
/// the end points (1e-12 relative match).
Regime classify_regime(const ShuntedCell& cell);

}  // namespace piezoband
