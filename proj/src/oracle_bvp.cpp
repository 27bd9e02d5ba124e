#include "piezoband/oracle_bvp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace piezoband::oracle {
namespace {

void require_positive_omega(double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw std::invalid_argument("oracle needs a positive finite omega");
}

double sign_value(ChargeSign s) { return s == ChargeSign::plus ? 1.0 : -1.0; }

struct PiezoSystem {
  Eigen::Matrix3d a;
  double scale = 0.0;  // sum of |terms| of the determinant expansion
  double k = 0.0;
  double cD = 0.0;
  double h = 0.0;
};

// Unknowns (A, B, D) of u = A cos kx + B sin kx. Rows: u(0) = u0,
// sigma(0) = sigma0, circuit closure.
PiezoSystem assemble(const PiezoLayer& p, double c_over_s, double omega, ChargeSign sign) {
  PiezoSystem sys;
  sys.cD = p.cE + p.e * p.e / p.eps;
  sys.h = p.e / p.eps;
  sys.k = omega * std::sqrt(p.rho / sys.cD);
  const double kd = sys.k * p.d;
  const double half = std::sin(0.5 * kd);
  const double s = std::sin(kd);
  const double q = sign_value(sign);

  // V = h (u(d) - u(0)) - D d / eps, with cos kd - 1 = -2 sin^2(kd/2)
  const Eigen::RowVector3d v_row(-2.0 * sys.h * half * half, sys.h * s, -p.d / p.eps);
  Eigen::RowVector3d circuit;
  if (std::isinf(c_over_s)) {
    circuit = v_row;  // V = 0
  } else {
    circuit = c_over_s * v_row;  // C V - Q = 0 with Q = q S D
    circuit(2) -= q;
  }
  sys.a << 1.0, 0.0, 0.0,
           0.0, sys.cD * sys.k, -sys.h,
           circuit(0), circuit(1), circuit(2);
  sys.scale = std::abs(sys.cD * sys.k * circuit(2)) + std::abs(sys.h * circuit(1));
  return sys;
}

LayerState exit_from(const PiezoLayer& p, const PiezoSystem& sys, const Eigen::Vector3d& x) {
  const double kd = sys.k * p.d;
  const double c = std::cos(kd);
  const double s = std::sin(kd);
  LayerState out;
  out.D = x(2);
  out.u = x(0) * c + x(1) * s;
  out.sigma = sys.cD * sys.k * (-x(0) * s + x(1) * c) - sys.h * x(2);
  out.V = sys.h * (out.u - x(0)) - x(2) * p.d / p.eps;
  return out;
}

}  // namespace

TransferMatrix elastic_matrix(const ElasticLayer& layer, double omega) {
  require_positive_omega(omega);
  const double k = omega * std::sqrt(layer.rho / layer.c);
  Eigen::Matrix2d a;
  a << 1.0, 0.0, 0.0, layer.c * k;
  const Eigen::Matrix2d ab = a.fullPivLu().inverse();  // columns: (A, B) per unit entry state
  const double c = std::cos(k * layer.d);
  const double s = std::sin(k * layer.d);
  auto u_exit = [&](int col) { return ab(0, col) * c + ab(1, col) * s; };
  auto sigma_exit = [&](int col) { return layer.c * k * (-ab(0, col) * s + ab(1, col) * c); };
  return {u_exit(0), u_exit(1), sigma_exit(0), sigma_exit(1)};
}

std::optional<LayerState> piezo_exit_state(const PiezoLayer& layer, double c_over_s, double omega,
                                           double u0, double sigma0,
                                           const OracleOptions& options) {
  require_positive_omega(omega);
  const auto sys = assemble(layer, c_over_s, omega, options.sign);
  if (std::abs(sys.a.determinant()) < options.singular_rel_tol * sys.scale) return std::nullopt;

  // The first row fixes A = u0; the remaining 2x2 system for (B, D) is
  // solved with partial pivoting on equilibrated columns.
  const Eigen::Matrix2d reduced = sys.a.bottomRightCorner<2, 2>();
  const Eigen::Vector2d col_scale = reduced.cwiseAbs().colwise().maxCoeff().cwiseInverse();
  const Eigen::Vector2d rhs(sigma0, -sys.a(2, 0) * u0);
  const Eigen::Vector2d y = (reduced * col_scale.asDiagonal()).partialPivLu().solve(rhs);
  const Eigen::Vector2d bd = col_scale.cwiseProduct(y);
  return exit_from(layer, sys, Eigen::Vector3d(u0, bd(0), bd(1)));
}

std::optional<TransferMatrix> piezo_matrix(const PiezoLayer& layer, double c_over_s, double omega,
                                           const OracleOptions& options) {
  const auto first = piezo_exit_state(layer, c_over_s, omega, 1.0, 0.0, options);
  const auto second = piezo_exit_state(layer, c_over_s, omega, 0.0, 1.0, options);
  if (!first || !second) return std::nullopt;
  return TransferMatrix{first->u, second->u, first->sigma, second->sigma};
}

double system_determinant(const PiezoLayer& layer, double c_over_s, double omega,
                          const OracleOptions& options) {
  require_positive_omega(omega);
  const auto sys = assemble(layer, c_over_s, omega, options.sign);
  return sys.a.determinant() / (sys.cD * sys.k);
}

std::optional<TransferMatrix> piezo_matrix_fd(const PiezoLayer& layer, double c_over_s,
                                              double omega, std::size_t points,
                                              const OracleOptions& options) {
  require_positive_omega(omega);
  if (points < 3) throw std::invalid_argument("finite-difference oracle needs at least 3 points");
  const double cD = layer.cE + layer.e * layer.e / layer.eps;
  const double h = layer.e / layer.eps;
  const double dx = layer.d / static_cast<double>(points - 1);

  // y' = F y + g D with y = (u, sigma), F = [[0, 1/cD], [-rho w^2, 0]],
  // g = (h/cD, 0). Trapezoidal step: (I - dx/2 F) y+ = (I + dx/2 F) y + dx g D.
  Eigen::Matrix2d f;
  f << 0.0, 1.0 / cD, -layer.rho * omega * omega, 0.0;
  const Eigen::Matrix2d lhs = Eigen::Matrix2d::Identity() - 0.5 * dx * f;
  const Eigen::Matrix2d step = lhs.inverse() * (Eigen::Matrix2d::Identity() + 0.5 * dx * f);
  const Eigen::Vector2d forcing = lhs.inverse() * Eigen::Vector2d(dx * h / cD, 0.0);

  Eigen::Matrix2d hom = Eigen::Matrix2d::Identity();  // response to the entry state
  Eigen::Vector2d part = Eigen::Vector2d::Zero();     // response to D = 1
  for (std::size_t i = 1; i < points; ++i) {
    hom = step * hom;
    part = step * part + forcing;
  }

  // Circuit: C/S V = q D with V = h (u(d) - u0) - D d / eps.
  const double q = sign_value(options.sign);
  TransferMatrix m{};
  for (int col = 0; col < 2; ++col) {
    const double u0 = col == 0 ? 1.0 : 0.0;
    const double du = hom(0, col) - u0;
    double D = 0.0;
    if (std::isinf(c_over_s)) {
      const double coeff = h * part(0) - layer.d / layer.eps;
      if (coeff == 0.0) return std::nullopt;
      D = -h * du / coeff;
    } else if (c_over_s != 0.0) {
      const double coeff = c_over_s * (h * part(0) - layer.d / layer.eps) - q;
      if (std::abs(coeff) < options.singular_rel_tol * (std::abs(q) + std::abs(c_over_s) * layer.d / layer.eps))
        return std::nullopt;
      D = -c_over_s * h * du / coeff;
    }
    const Eigen::Vector2d y = hom.col(col) + D * part;
    if (col == 0) {
      m.a11 = y(0);
      m.a21 = y(1);
    } else {
      m.a12 = y(0);
      m.a22 = y(1);
    }
  }
  return m;
}

}  // namespace piezoband::oracle
