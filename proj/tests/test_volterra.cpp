#include <gtest/gtest.h>

#include <cmath>

#include "ssw/volterra.hpp"

using namespace ssw;

namespace {
// int_0^x e^{a(x-y)} y^6 e^{icy} dy via the moment recursion for int_0^x y^n e^{ky} dy.
cplx exp_conv(cplx a, cplx ic, double x) {
  const cplx k = ic - a;
  cplx moment = (std::exp(k * x) - 1.0) / k;
  for (int n = 1; n <= 6; ++n) moment = (std::pow(x, n) * std::exp(k * x) - double(n) * moment) / k;
  return std::exp(a * x) * moment;
}
}  // namespace

TEST(Volterra, Phi1IsStableNearZero) {
  EXPECT_NEAR(std::abs(phi1(1e-12) - 1.0 - 5e-13), 0.0, 1e-15);
  const cplx z(0.05, -0.02);
  EXPECT_NEAR(std::abs(phi1(z) - (std::exp(z) - 1.0) / z), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(exp_divided_difference(cplx(0, 1e-9), 0.0, 2.0) - 2.0), 0.0, 1e-8);
}

TEST(Volterra, PanelWeightsIntegratePolynomialsExactly) {
  const double dx = 0.1;
  const auto w = panel_weights_E(0.0, dx, 5);
  // Lagrange weights for the constant kernel reproduce int_0^dx s^k ds.
  for (int k = 0; k <= 5; ++k) {
    cplx acc = 0.0;
    for (int j = 0; j <= 5; ++j) acc += w[j] * std::pow(j * dx, k);
    EXPECT_NEAR(std::abs(acc - std::pow(dx, k + 1) / (k + 1)), 0.0, 1e-15);
  }
}

TEST(Volterra, ForwardSumsMatchClosedForm) {
  for (auto [a, b] : {std::pair<cplx, cplx>{cplx(-1.0, 2.0), cplx(-1.0, -2.0)},
                      std::pair<cplx, cplx>{cplx(0.0, 0.02), 0.0},
                      std::pair<cplx, cplx>{cplx(-6.0, 0.0), 0.0}}) {
    const cplx ic(0.0, 1.3);
    double errs[2];
    for (int level = 0; level < 2; ++level) {
    const double dx = 0.02 / (1 << level);
    MarchingSum sum(a, b, dx);
    double worst = 0.0;
    for (int i = 0; i <= 150 << level; ++i) {
      const double x = i * dx;
      auto p = sum.predict();
      sum.commit(p, std::pow(x, 6) * std::exp(ic * x));
      const cplx T = (exp_conv(a, ic, x) - exp_conv(b, ic, x)) / (a - b);
      const cplx E = exp_conv(b, ic, x);
      worst = std::max({worst, std::abs(sum.T() - T) / (1.0 + std::abs(T)), std::abs(sum.E() - E) / (1.0 + std::abs(E))});
    }
    errs[level] = worst;
    }
    EXPECT_LT(errs[0], 1e-8) << a << " " << b;
    EXPECT_GT(errs[0] / errs[1], 30.0) << a << " " << b;
  }
}

TEST(Volterra, ImplicitNodeWeightSolvesLinearEquation) {
  // y(x) = 1 + int_0^x y(s) ds has solution e^x; the node weight makes each step implicit.
  const double dx = 0.01;
  MarchingSum sum(0.0, 0.0, dx, false);
  sum.seed_history({std::exp(-dx), std::exp(-2 * dx), std::exp(-3 * dx), std::exp(-4 * dx), std::exp(-5 * dx)});
  double y = 1.0;
  for (int i = 0; i <= 200; ++i) {
    auto p = sum.predict();
    const cplx val = (1.0 + p.E) / (1.0 - p.wE);
    sum.commit(p, val);
    y = val.real();
  }
  EXPECT_NEAR(y, std::exp(2.0), 1e-10);
}
