#include "piezoband/transfer_matrix.hpp"

#include <cmath>

namespace piezoband {
namespace {

// sin(x)/x; below the series switch-over the correction term is below
// double precision anyway.
double sinc(double x) {
  return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
}

// cos(x) - 1 without cancellation near x = 0.
double cos_minus_one(double x) {
  const double s = std::sin(0.5 * x);
  return -2.0 * s * s;
}

// Layer matrix written with sinc so that omega = 0 needs no special case:
//   sin(kd)/(Z omega) = (d/c) sinc(kd),   -Z omega sin(kd) = -rho omega^2 d sinc(kd).
TransferMatrix layer_matrix(double rho, double stiffness, double thickness, double omega) {
  const double kd = omega * std::sqrt(rho / stiffness) * thickness;
  const double c = std::cos(kd);
  const double s = sinc(kd);
  return {c, thickness / stiffness * s, -rho * omega * omega * thickness * s, c};
}

struct PiezoPieces {
  TransferMatrix open;
  ShuntCoefficients shunt;
};

PiezoPieces piezo_pieces(const ShuntedCell& cell, double omega) {
  const auto& pz = cell.piezo;
  const double cD = pz.cD();
  const double h = pz.e / pz.eps;
  const double kd = omega * std::sqrt(pz.rho / cD) * pz.d;
  const double c = std::cos(kd);
  const double s = sinc(kd);

  PiezoPieces out;
  out.open = {c, pz.d / cD * s, -pz.rho * omega * omega * pz.d * s, c};
  auto& sc = out.shunt;
  sc.M1 = h * pz.d / cD * s;
  sc.M2 = h * cos_minus_one(kd);
  sc.M3 = h * sc.M1 - pz.d / pz.eps;
  sc.open_circuit = cell.open_circuit();
  sc.denom = sc.open_circuit ? HUGE_VAL : 1.0 / cell.c_over_s - sc.M3;
  return out;
}

std::optional<TransferMatrix> apply_shunt(const ShuntedCell& cell, const PiezoPieces& p,
                                          double pole_rel_tol) {
  const auto& sc = p.shunt;
  // Open circuit, or an inert layer (e = 0): the correction vanishes identically.
  if (sc.open_circuit || (sc.M1 == 0.0 && sc.M2 == 0.0)) return p.open;
  if (std::abs(sc.denom) < pole_rel_tol * cell.piezo.d / cell.piezo.eps) return std::nullopt;
  const double g = 1.0 / sc.denom;
  auto m = p.open;
  m.a11 += g * sc.M1 * sc.M2;
  m.a12 += g * sc.M1 * sc.M1;
  m.a21 += g * sc.M2 * sc.M2;
  m.a22 += g * sc.M2 * sc.M1;
  return m;
}

}  // namespace

TransferMatrix elastic_layer_matrix(const ShuntedCell& cell, double omega) {
  return layer_matrix(cell.elastic.rho, cell.elastic.c, cell.elastic.d, omega);
}

TransferMatrix open_piezo_layer_matrix(const ShuntedCell& cell, double omega) {
  return layer_matrix(cell.piezo.rho, cell.piezo.cD(), cell.piezo.d, omega);
}

ShuntCoefficients shunt_coefficients(const ShuntedCell& cell, double omega) {
  return piezo_pieces(cell, omega).shunt;
}

std::optional<TransferMatrix> shunted_piezo_layer_matrix(const ShuntedCell& cell, double omega,
                                                         double pole_rel_tol) {
  return apply_shunt(cell, piezo_pieces(cell, omega), pole_rel_tol);
}

std::optional<TransferMatrix> monodromy(const ShuntedCell& cell, double omega,
                                        double pole_rel_tol) {
  return cell_response(cell, omega, pole_rel_tol).monodromy;
}

CellResponse cell_response(const ShuntedCell& cell, double omega, double pole_rel_tol) {
  const auto pieces = piezo_pieces(cell, omega);
  CellResponse out;
  out.shunt = pieces.shunt;
  if (auto m2 = apply_shunt(cell, pieces, pole_rel_tol))
    out.monodromy = *m2 * elastic_layer_matrix(cell, omega);
  return out;
}

}  // namespace piezoband
