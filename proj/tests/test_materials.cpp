#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <algorithm>
#include <ostream>
#include <random>

#include "piezoband/errors.hpp"
#include "piezoband/materials.hpp"
#include "test_support.hpp"

using namespace piezoband;
using piezoband::testing::rel_diff;

namespace {

ShuntedCell unit_cell() {
  ShuntedCell c;
  c.elastic = {1.0, 1.0, 1.0};
  c.piezo = {1.0, 4.0, 0.0, 1.0, 1.0};
  return c;
}

}  // namespace

TEST(DeriveConstants, ZeroCouplingDegeneratesToElastic) {
  const auto dc = derive_constants(unit_cell());
  EXPECT_EQ(dc.cD, 4.0);
  EXPECT_EQ(dc.Z2, 2.0);
  EXPECT_EQ(dc.h, 0.0);
}

TEST(DeriveConstants, StiffenedModulus) {
  auto c = unit_cell();
  c.piezo.e = 2.0;
  EXPECT_EQ(derive_constants(c).cD, 8.0);
  EXPECT_EQ(derive_constants(c).h, 2.0);
}

TEST(DeriveConstants, ShippedMaterialsAgainstHighPrecision) {
  using big = boost::multiprecision::cpp_bin_float_50;
  const auto cell = piezoband::testing::shipped_cell();
  const auto dc = derive_constants(cell);

  const big rho1 = cell.elastic.rho, c1 = cell.elastic.c, d1 = cell.elastic.d;
  const big rho2 = cell.piezo.rho, cE = cell.piezo.cE, e = cell.piezo.e, eps = cell.piezo.eps,
            d2 = cell.piezo.d;
  const big cD = cE + e * e / eps;

  EXPECT_LT(rel_diff(dc.cD, static_cast<double>(cD)), 1e-15);
  EXPECT_LT(rel_diff(dc.h, static_cast<double>(e / eps)), 1e-15);
  EXPECT_LT(rel_diff(dc.Z1, static_cast<double>(sqrt(rho1 * c1))), 1e-15);
  EXPECT_LT(rel_diff(dc.Z2, static_cast<double>(sqrt(rho2 * cD))), 1e-15);
  EXPECT_LT(rel_diff(dc.slowness1, static_cast<double>(sqrt(rho1 / c1))), 1e-15);
  EXPECT_LT(rel_diff(dc.slowness2, static_cast<double>(sqrt(rho2 / cD))), 1e-15);
  EXPECT_LT(rel_diff(dc.T, static_cast<double>(d1 + d2)), 1e-16);
  EXPECT_LT(rel_diff(dc.k2(1e6), static_cast<double>(1e6 * sqrt(rho2 / cD))), 1e-15);
}

TEST(DeriveConstants, ScaleConsistency) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lam(0.1, 10.0);
  for (int i = 0; i < 200; ++i) {
    const auto cell = piezoband::testing::random_cell(rng);
    const double l = lam(rng);
    auto scaled = cell;
    scaled.elastic.rho *= l;
    scaled.elastic.c *= l;
    const auto a = derive_constants(cell);
    const auto b = derive_constants(scaled);
    EXPECT_LT(rel_diff(a.slowness1, b.slowness1), 4e-16);
    EXPECT_LT(rel_diff(a.Z1 * l, b.Z1), 4e-16);
  }
}

TEST(DeriveConstants, StiffenedModulusNeverBelowCE) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto cell = piezoband::testing::random_cell(rng);
    EXPECT_GE(derive_constants(cell).cD, cell.piezo.cE);
  }
}

struct InvalidField {
  const char* field;
  void (*apply)(ShuntedCell&);
};

void PrintTo(const InvalidField& f, std::ostream* os) { *os << f.field; }

class ValidationTest : public ::testing::TestWithParam<InvalidField> {};

TEST_P(ValidationTest, NamesTheViolatedField) {
  auto cell = piezoband::testing::shipped_cell();
  GetParam().apply(cell);
  try {
    derive_constants(cell);
    FAIL() << "expected MaterialError for " << GetParam().field;
  } catch (const MaterialError& e) {
    EXPECT_EQ(e.field(), GetParam().field);
    EXPECT_NE(std::string(e.what()).find(GetParam().field), std::string::npos);
  }
}

INSTANTIATE_TEST_SUITE_P(
    Fields, ValidationTest,
    ::testing::Values(InvalidField{"elastic.rho", [](ShuntedCell& c) { c.elastic.rho = 0.0; }},
                      InvalidField{"elastic.c", [](ShuntedCell& c) { c.elastic.c = -1.0; }},
                      InvalidField{"elastic.d", [](ShuntedCell& c) { c.elastic.d = 0.0; }},
                      InvalidField{"piezo.rho", [](ShuntedCell& c) { c.piezo.rho = -3.0; }},
                      InvalidField{"piezo.cE", [](ShuntedCell& c) { c.piezo.cE = 0.0; }},
                      InvalidField{"piezo.eps", [](ShuntedCell& c) { c.piezo.eps = 0.0; }},
                      InvalidField{"piezo.d", [](ShuntedCell& c) { c.piezo.d = -1e-3; }},
                      InvalidField{"piezo.e", [](ShuntedCell& c) { c.piezo.e = HUGE_VAL; }},
                      InvalidField{"elastic.d", [](ShuntedCell& c) { c.elastic.d = NAN; }},
                      InvalidField{"circuit.c_over_s", [](ShuntedCell& c) { c.c_over_s = NAN; }}),
    [](const auto& info) {
      std::string name = info.param.field;
      std::replace(name.begin(), name.end(), '.', '_');
      return name + "_" + std::to_string(info.index);
    });

TEST(Validation, AnyRealCapacitanceIsAccepted) {
  auto cell = piezoband::testing::shipped_cell();
  for (double c : {-1.0, -1e-6, 0.0, 1e-6, HUGE_VAL, -HUGE_VAL}) {
    cell.c_over_s = c;
    EXPECT_NO_THROW(validate(cell)) << c;
  }
}

TEST(Validation, NegativeCouplingIsAccepted) {
  auto cell = piezoband::testing::shipped_cell();
  cell.piezo.e = -cell.piezo.e;
  EXPECT_NO_THROW(validate(cell));
}
