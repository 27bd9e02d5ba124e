#include "piezoband/quasistatic.hpp"

#include <cmath>
#include <stdexcept>

namespace piezoband {
namespace {

bool matches(double x, double target) {
  return std::abs(x - target) <= 1e-12 * std::abs(target);
}

}  // namespace

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::positive: return "positive";
    case Regime::negative: return "negative";
    case Regime::pole: return "pole";
    case Regime::zero: return "zero";
  }
  return "unknown";
}

double piezo_static_compliance(const ShuntedCell& cell) {
  const auto& pz = cell.piezo;
  if (std::isinf(cell.c_over_s)) return pz.d / pz.cE;  // short circuit
  const double a = cell.c_over_s * pz.d + pz.eps;
  const double stiffness_times_a = pz.cE * a + pz.e * pz.e;
  if (stiffness_times_a == 0.0) return HUGE_VAL;
  return pz.d * a / stiffness_times_a;
}

double effective_compliance(const ShuntedCell& cell) {
  return cell.elastic.d / cell.elastic.c + piezo_static_compliance(cell);
}

SpecialCapacitances special_capacitances(const ShuntedCell& cell) {
  const auto& el = cell.elastic;
  const auto& pz = cell.piezo;
  if (pz.e == 0.0)
    throw std::invalid_argument("special capacitances are degenerate at e = 0 (no pole or zero)");
  const double e2 = pz.e * pz.e;
  SpecialCapacitances sc;
  sc.pole = -e2 * el.d / ((el.c * pz.d + pz.cE * el.d) * pz.d) - pz.eps / pz.d;
  sc.zero = -e2 / (pz.d * pz.cE) - pz.eps / pz.d;
  return sc;
}

Regime classify_regime(const ShuntedCell& cell) {
  if (cell.piezo.e == 0.0) return Regime::positive;
  const auto sc = special_capacitances(cell);
  const double g = cell.c_over_s;
  if (matches(g, sc.pole)) return Regime::pole;
  if (matches(g, sc.zero)) return Regime::zero;
  if (g > sc.zero && g < sc.pole) return Regime::negative;
  return Regime::positive;
}

EffectiveModel effective_model(const ShuntedCell& cell) {
  EffectiveModel m;
  const double T = cell.period();
  m.rho_eff = (cell.elastic.d * cell.elastic.rho + cell.piezo.d * cell.piezo.rho) / T;
  m.regime = classify_regime(cell);
  if (cell.piezo.e != 0.0) m.special = special_capacitances(cell);

  switch (m.regime) {
    case Regime::pole: m.c_eff = HUGE_VAL; break;
    case Regime::zero: m.c_eff = 0.0; break;
    default: {
      const double compliance = effective_compliance(cell);
      m.c_eff = std::isinf(compliance) ? 0.0 : T / compliance;
    }
  }
  if (m.regime == Regime::positive && m.c_eff > 0.0 && std::isfinite(m.c_eff))
    m.v_eff = std::sqrt(m.c_eff / m.rho_eff);
  return m;
}

}  // namespace piezoband
