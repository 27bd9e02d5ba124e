#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "piezoband/kernels.hpp"
#include "piezoband/quasistatic.hpp"
#include "piezoband/transfer_matrix.hpp"
#include "test_support.hpp"

using namespace piezoband;
using piezoband::testing::rel_diff;
using piezoband::testing::shipped_cell;

namespace {

constexpr double pi = std::numbers::pi;

double omega_for_k1d1(const ShuntedCell& c, double phase) {
  return phase / (std::sqrt(c.elastic.rho / c.elastic.c) * c.elastic.d);
}

double omega_for_k2d2(const ShuntedCell& c, double phase) {
  return phase / (std::sqrt(c.piezo.rho / c.piezo.cD()) * c.piezo.d);
}

// A frequency where the shunt denominator changes sign, located by bisection.
double located_pole(const ShuntedCell& c) {
  auto denom = [&](double w) { return shunt_coefficients(c, w).denom; };
  double lo = 0.0, hi = 0.0;
  const double top = omega_for_k2d2(c, 2.0 * pi);
  for (int i = 1; i <= 4000; ++i) {
    const double a = top * (i - 1) / 4000.0, b = top * i / 4000.0;
    if (std::signbit(denom(a)) != std::signbit(denom(b))) {
      lo = a;
      hi = b;
      break;
    }
  }
  EXPECT_GT(hi, 0.0) << "no pole below the first full-wave frequency";
  return bisect_to_convergence(denom, lo, hi, denom(lo));
}

}  // namespace

TEST(ElasticLayer, StaticLimit) {
  const auto c = shipped_cell();
  const auto m = elastic_layer_matrix(c, 0.0);
  EXPECT_EQ(m.a11, 1.0);
  EXPECT_EQ(m.a12, c.elastic.d / c.elastic.c);
  EXPECT_EQ(m.a21, 0.0);
  EXPECT_EQ(m.a22, 1.0);
}

TEST(ElasticLayer, HalfWaveLayerIsMinusIdentity) {
  const auto c = shipped_cell();
  const auto m = elastic_layer_matrix(c, omega_for_k1d1(c, pi));
  EXPECT_NEAR(m.a11, -1.0, 1e-15);
  EXPECT_NEAR(m.a22, -1.0, 1e-15);
  EXPECT_NEAR(m.a12 * c.elastic.c / c.elastic.d, 0.0, 1e-15);
  EXPECT_NEAR(m.a21 * c.elastic.d / c.elastic.c, 0.0, 1e-14);
}

TEST(OpenPiezoLayer, StaticLimit) {
  const auto c = shipped_cell();
  const auto m = open_piezo_layer_matrix(c, 0.0);
  EXPECT_EQ(m, (TransferMatrix{1.0, c.piezo.d / c.piezo.cD(), 0.0, 1.0}));
}

TEST(OpenPiezoLayer, FullWaveLayerIsIdentity) {
  const auto c = shipped_cell();
  const auto m = open_piezo_layer_matrix(c, omega_for_k2d2(c, 2.0 * pi));
  EXPECT_NEAR(m.a11, 1.0, 1e-15);
  EXPECT_NEAR(m.a22, 1.0, 1e-15);
  EXPECT_NEAR(m.a12 * c.piezo.cD() / c.piezo.d, 0.0, 1e-15);
  EXPECT_NEAR(m.a21 * c.piezo.d / c.piezo.cD(), 0.0, 1e-14);
}

TEST(ShuntCoefficients, ZeroCoupling) {
  auto c = piezoband::testing::without_piezo(shipped_cell());
  c.c_over_s = -11e-6;
  for (double w : {0.0, 1e3, 3e6}) {
    const auto s = shunt_coefficients(c, w);
    EXPECT_EQ(s.M1, 0.0);
    EXPECT_EQ(s.M2, 0.0);
    EXPECT_EQ(s.M3, -c.piezo.d / c.piezo.eps);
  }
}

TEST(ShuntCoefficients, FullWaveArgumentsVanish) {
  auto c = shipped_cell();
  c.c_over_s = -11e-6;
  const auto s = shunt_coefficients(c, omega_for_k2d2(c, 2.0 * pi));
  const double h = c.piezo.e / c.piezo.eps;
  EXPECT_NEAR(s.M1 / (h * c.piezo.d / c.piezo.cD()), 0.0, 1e-15);
  EXPECT_NEAR(s.M2 / h, 0.0, 1e-15);
  EXPECT_LT(rel_diff(s.M3, -c.piezo.d / c.piezo.eps), 1e-15);
}

TEST(ShuntCoefficients, QuasistaticLimits) {
  auto c = shipped_cell();
  c.c_over_s = -11e-6;
  const double h = c.piezo.e / c.piezo.eps;
  const double cD = c.piezo.cD();
  const double m1_0 = h * c.piezo.d / cD;
  const double m3_0 = -(c.piezo.d / c.piezo.eps) * (c.piezo.cE / cD);

  const auto at_zero = shunt_coefficients(c, 0.0);
  EXPECT_LT(rel_diff(at_zero.M1, m1_0), 1e-15);
  EXPECT_EQ(at_zero.M2, 0.0);
  EXPECT_LT(rel_diff(at_zero.M3, m3_0), 1e-14);

  const double w = 1e-6 * omega_for_k2d2(c, 1.0);
  const auto small = shunt_coefficients(c, w);
  EXPECT_LT(rel_diff(small.M1, m1_0), 1e-12);
  EXPECT_LT(rel_diff(small.M3, m3_0), 1e-12);
  EXPECT_LT(std::abs(small.M2), 1e-11 * h);
}

TEST(ShuntCoefficients, DenominatorAndOpenFlag) {
  auto c = shipped_cell();
  EXPECT_TRUE(shunt_coefficients(c, 1e5).open_circuit);
  c.c_over_s = -11e-6;
  const auto s = shunt_coefficients(c, 1e5);
  EXPECT_FALSE(s.open_circuit);
  EXPECT_LT(rel_diff(s.denom, 1.0 / c.c_over_s - s.M3), 1e-15);
}

TEST(ShuntedPiezoLayer, OpenCircuitIsExactlyTheOpenMatrix) {
  const auto c = shipped_cell();
  for (double w : {0.0, 1e2, 1e5, 3e6, 2e7})
    EXPECT_EQ(*shunted_piezo_layer_matrix(c, w), open_piezo_layer_matrix(c, w));
}

TEST(ShuntedPiezoLayer, ZeroCouplingIsExactlyTheOpenMatrix) {
  auto c = piezoband::testing::without_piezo(shipped_cell());
  for (double cs : {-40e-6, -11e-6, 5e-6, HUGE_VAL}) {
    c.c_over_s = cs;
    for (double w : {0.0, 1e5, 3e6})
      EXPECT_EQ(*shunted_piezo_layer_matrix(c, w), open_piezo_layer_matrix(c, w));
  }
}

TEST(ShuntedPiezoLayer, PoleIsFlaggedNotEvaluated) {
  auto c = shipped_cell();
  c.c_over_s = -16e-6;
  const double wp = located_pole(c);
  EXPECT_FALSE(shunted_piezo_layer_matrix(c, wp).has_value());
  EXPECT_FALSE(monodromy(c, wp).has_value());
  EXPECT_TRUE(shunted_piezo_layer_matrix(c, wp * (1 + 1e-6)).has_value());
}

TEST(ShuntedPiezoLayer, ContinuousAtOpenCircuit) {
  auto c = shipped_cell();
  const double w = 2.3e6;
  const auto open = open_piezo_layer_matrix(c, w);
  for (double cs : {-1e-18, 1e-18}) {
    c.c_over_s = cs;
    const auto m = *shunted_piezo_layer_matrix(c, w);
    EXPECT_LT(rel_diff(m.a11, open.a11), 1e-10);
    EXPECT_LT(rel_diff(m.a12, open.a12), 1e-10);
    EXPECT_LT(rel_diff(m.a21, open.a21), 1e-10);
    EXPECT_LT(rel_diff(m.a22, open.a22), 1e-10);
  }
}

TEST(ShuntedPiezoLayer, ShortCircuitLimit) {
  auto c = shipped_cell();
  const double w = 1.7e6;
  c.c_over_s = HUGE_VAL;
  const auto s = shunt_coefficients(c, w);
  const auto m20 = open_piezo_layer_matrix(c, w);
  const double f = -1.0 / s.M3;
  const TransferMatrix expected{m20.a11 + f * s.M1 * s.M2, m20.a12 + f * s.M1 * s.M1,
                                m20.a21 + f * s.M2 * s.M2, m20.a22 + f * s.M2 * s.M1};
  EXPECT_EQ(*shunted_piezo_layer_matrix(c, w), expected);

  c.c_over_s = 1e30;
  const auto big = *shunted_piezo_layer_matrix(c, w);
  EXPECT_LT(rel_diff(big.a12, expected.a12), 1e-12);
}

TEST(Monodromy, StaticOpenCircuit) {
  const auto c = shipped_cell();
  const auto m = *monodromy(c, 0.0);
  EXPECT_EQ(m.a11, 1.0);
  EXPECT_EQ(m.a21, 0.0);
  EXPECT_EQ(m.a22, 1.0);
  EXPECT_LT(rel_diff(m.a12, c.elastic.d / c.elastic.c + c.piezo.d / c.piezo.cD()), 1e-15);
}

TEST(Monodromy, ZeroCouplingIsElasticProduct) {
  auto c = piezoband::testing::without_piezo(shipped_cell());
  c.c_over_s = -11e-6;
  for (double w : {1e4, 1e6, 7e6})
    EXPECT_EQ(*monodromy(c, w), open_piezo_layer_matrix(c, w) * elastic_layer_matrix(c, w));
}

TEST(Monodromy, ProductOrderIsPiezoTimesElastic) {
  auto c = shipped_cell();
  c.c_over_s = -11e-6;
  const double w = 4.1e6;
  EXPECT_EQ(*monodromy(c, w), *shunted_piezo_layer_matrix(c, w) * elastic_layer_matrix(c, w));
}

TEST(Monodromy, HalfTraceIsOneAtZeroFrequency) {
  auto c = shipped_cell();
  for (double cs : {0.0, -1e-6, -11e-6, -16e-6, -40e-6, 5e-6, HUGE_VAL}) {
    c.c_over_s = cs;
    EXPECT_EQ(monodromy(c, 0.0)->half_trace(), 1.0) << cs;
  }
}

TEST(Monodromy, UnimodularOnRandomSamples) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int i = 0; i < 4000; ++i) {
    auto c = piezoband::testing::random_cell(rng);
    const double scale = c.piezo.eps / c.piezo.d;
    c.c_over_s = (u(rng) - 0.8) * 4.0 * scale;
    const double w = std::pow(10.0, 2.0 + 6.0 * u(rng));
    const auto m1 = elastic_layer_matrix(c, w);
    const auto m2 = shunted_piezo_layer_matrix(c, w);
    if (!m2) continue;
    const auto m = *m2 * m1;
    for (const auto& t : {m1, *m2, m}) {
      const double mag = std::max(1.0, std::abs(t.a11 * t.a22) + std::abs(t.a12 * t.a21));
      EXPECT_LT(std::abs(t.det() - 1.0), 1e-12 * mag);
    }
    ++checked;
  }
  EXPECT_GT(checked, 3900);
}

TEST(CellResponse, MatchesSeparateEvaluation) {
  auto c = shipped_cell();
  c.c_over_s = -12e-6;
  for (double w : {0.0, 1e3, 2e6, 9e6}) {
    const auto r = cell_response(c, w);
    EXPECT_EQ(*r.monodromy, *monodromy(c, w));
    EXPECT_EQ(r.shunt.denom, shunt_coefficients(c, w).denom);
  }
}
