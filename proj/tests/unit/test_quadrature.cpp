#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "pcl/errors.hpp"
#include "pcl/quadrature.hpp"

using namespace pcl;

TEST(Window, RejectsEmptyOrInfinite) {
  EXPECT_THROW(Window(1, 1), ValidationError);
  EXPECT_THROW(Window(0, INFINITY), ValidationError);
  EXPECT_TRUE(Window(0, 1).contains(1.0));
}

TEST(PanelEdges, IncludeBreakpointsAndEnds) {
  const std::vector<double> bp{0.3, 5.0};
  const auto e = panel_edges(Window(0, 1), QuadratureSpec{}, bp);
  EXPECT_EQ(e.front(), 0.0);
  EXPECT_EQ(e.back(), 1.0);
  EXPECT_TRUE(std::is_sorted(e.begin(), e.end()));
  EXPECT_NE(std::find(e.begin(), e.end(), 0.3), e.end());
  EXPECT_EQ(std::find(e.begin(), e.end(), 5.0), e.end());
}

TEST(FixedRule, MatchesAdaptiveOnSmoothIntegrand) {
  const Window w(-40, 60);
  const std::vector<double> bp{0.0};
  const auto f = [](double x) { return std::pow(1 + std::abs(x), -2.5) * std::cos(0.3 * x); };
  const auto rule = make_fixed_rule(w, QuadratureSpec{}, bp);
  EXPECT_NEAR(rule.apply(f), integrate(f, w, {}, bp), 1e-9);
}

TEST(Integrate, AgreesWithSimpsonOracle) {
  const auto f = [](double x) { return std::exp(-x * x) * std::sin(3 * x + 1); };
  EXPECT_NEAR(integrate(f, Window(-6, 6)), oracle::simpson(f, -6, 6, 200000), 1e-11);
  const auto g = [](double x) { return std::exp(std::complex<double>(0, std::pow(1 + std::abs(x), -2))) - 1.0; };
  const std::vector<double> bp{0.0};
  const auto ref = oracle::simpson_c(g, 0, 200, 2000000) +
                   oracle::simpson_c(g, -200, 0, 2000000);
  EXPECT_LT(std::abs(integrate(g, Window(-200, 200), {}, bp) - ref), 1e-9);
}

TEST(Integrate, HandlesJumpAtBreakpoint) {
  const auto f = [](double x) { return x < 0.37 ? 1.0 : 3.0; };
  const std::vector<double> bp{0.37};
  EXPECT_NEAR(integrate(f, Window(0, 1), {}, bp), 0.37 + 3 * 0.63, 1e-12);
}
