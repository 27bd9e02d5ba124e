#include "piezoband/materials.hpp"

#include <cmath>
#include <string>

#include "piezoband/errors.hpp"
#include "piezoband/material_file.hpp"

namespace piezoband {
namespace {

void require_positive(double value, const char* field) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw MaterialError(std::string(field) + " must be positive and finite (got " +
                            format_double(value) + ")",
                        field);
  }
}

}  // namespace

void validate(const ShuntedCell& cell) {
  require_positive(cell.elastic.rho, "elastic.rho");
  require_positive(cell.elastic.c, "elastic.c");
  require_positive(cell.elastic.d, "elastic.d");
  require_positive(cell.piezo.rho, "piezo.rho");
  require_positive(cell.piezo.cE, "piezo.cE");
  if (!std::isfinite(cell.piezo.e))
    throw MaterialError("piezo.e must be finite", "piezo.e");
  require_positive(cell.piezo.eps, "piezo.eps");
  require_positive(cell.piezo.d, "piezo.d");
  if (std::isnan(cell.c_over_s))
    throw MaterialError("circuit.c_over_s must be a number", "circuit.c_over_s");
}

DerivedConstants derive_constants(const ShuntedCell& cell) {
  validate(cell);
  const auto& el = cell.elastic;
  const auto& pz = cell.piezo;
  DerivedConstants dc;
  dc.cD = pz.cD();
  dc.h = pz.e / pz.eps;
  dc.Z1 = std::sqrt(el.rho * el.c);
  dc.Z2 = std::sqrt(pz.rho * dc.cD);
  dc.slowness1 = std::sqrt(el.rho / el.c);
  dc.slowness2 = std::sqrt(pz.rho / dc.cD);
  dc.T = el.d + pz.d;
  return dc;
}

}  // namespace piezoband
