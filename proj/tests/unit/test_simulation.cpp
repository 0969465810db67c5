#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "pcl/errors.hpp"
#include "pcl/process.hpp"
#include "pcl/rng.hpp"
#include "pcl/simulation.hpp"
#include "pcl/stats.hpp"

using namespace pcl;

TEST(FloorIndex, GuardsRepresentationError) {
  EXPECT_EQ(floor_index(100, 0.29), 29);  // 0.29 * 100 = 28.999999999999996
  EXPECT_EQ(floor_index(10, 0.3), 3);
  EXPECT_EQ(floor_index(7, 0.5), 3);
  EXPECT_EQ(floor_index(1 << 14, 1.0), 1 << 14);
  EXPECT_EQ(floor_index(1000, 0.0), 0);
}

TEST(Paths, PartialSumDefinition) {
  const std::vector<double> s{1, 2, 3, 4, 5, 6, 7, 8};
  const std::vector<double> t{0.0, 0.25, 0.4, 1.0};
  const auto y = partial_path(s, 8, t);
  const double r = 1.0 / std::sqrt(8.0);
  EXPECT_EQ(y[0], 0.0);
  EXPECT_DOUBLE_EQ(y[1], 3.0 * r);   // u < 2
  EXPECT_DOUBLE_EQ(y[2], 6.0 * r);   // [3.2] = 3
  EXPECT_DOUBLE_EQ(y[3], 36.0 * r);
}

TEST(Paths, InterpolationAddsFractionalSummand) {
  const std::vector<double> s{1, 2, 3, 4, 5, 6, 7, 8};
  const std::vector<double> t{0.0, 0.25, 0.4, 1.0};
  const auto y = partial_path(s, 8, t);
  const auto z = interpolated_path(s, 8, t);
  EXPECT_EQ(z[0], y[0]);
  EXPECT_EQ(z[1], y[1]);  // nt integer
  EXPECT_EQ(z[3], y[3]);
  EXPECT_NEAR(z[2] - y[2], 0.2 * 4.0 / std::sqrt(8.0), 1e-12);
}

TEST(Paths, InterpolationIsContinuousInT) {
  std::vector<double> s(64);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::sin(static_cast<double>(i));
  double prev_jump = 1e300;
  for (int m : {16, 64, 256, 1024}) {
    std::vector<double> t(static_cast<std::size_t>(m) + 1);
    for (int i = 0; i <= m; ++i) t[static_cast<std::size_t>(i)] = static_cast<double>(i) / m;
    const auto z = interpolated_path(s, 64, t);
    double jump = 0.0;
    for (std::size_t i = 1; i < z.size(); ++i) jump = std::max(jump, std::abs(z[i] - z[i - 1]));
    EXPECT_LT(jump, prev_jump);
    prev_jump = jump;
  }
}

TEST(Paths, FddReducesToPathValue) {
  std::vector<double> s(100);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::cos(0.3 * static_cast<double>(i));
  const std::vector<double> one{1.0}, t{0.37};
  EXPECT_DOUBLE_EQ(fdd_value(s, 100, one, t), partial_path(s, 100, t)[0]);
  const std::vector<double> b{2.0, -1.0}, tt{0.5, 1.0};
  const std::vector<double> grid{0.5, 1.0};
  const auto y = partial_path(s, 100, grid);
  EXPECT_NEAR(fdd_value(s, 100, b, tt), 2.0 * y[0] - y[1], 1e-12);
}

TEST(Parallel, VisitsEveryIndexOnce) {
  for (int threads : {1, 3, 8}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(1000, threads, [&](long i) { hits[static_cast<std::size_t>(i)]++; });
    for (const auto& h : hits) ASSERT_EQ(h.load(), 1);
  }
}

TEST(Parallel, PropagatesExceptions) {
  EXPECT_THROW(parallel_for(100, 4,
                            [](long i) {
                              if (i == 37) throw NumericalError("boom");
                            }),
               NumericalError);
}

TEST(Parallel, ThreadCountFromEnvironment) {
  EXPECT_EQ(resolve_threads(5), 5);
  ::setenv("PCL_THREADS", "3", 1);
  EXPECT_EQ(resolve_threads(0), 3);
  ::unsetenv("PCL_THREADS");
  EXPECT_EQ(resolve_threads(0), 1);
}

TEST(Simulator, FirstChaosForIdentity) {
  const auto psi = Kernel::power_law(2.0).truncated(5);
  const PathSimulator sim(psi, Nonlinearity::polynomial({0, 1, 0, 0}), 1, 50);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto cfg = sample_configuration(sim.window(), seed);
    const auto x = sim.first_chaos_sequence(cfg);
    const auto s = sim.summands(cfg);
    ASSERT_EQ(x.size(), 50u);
    for (std::size_t u = 0; u < 50; ++u) {
      EXPECT_NEAR(s[u], x[u], 1e-12);
      const FirstChaos X(psi.shifted(static_cast<long>(u)), sim.window());
      EXPECT_NEAR(x[u], X(cfg), 1e-10);
    }
  }
}

// T^{>=2} X^2 = X^2 - int psi^2 - I_1(psi^2).
TEST(Simulator, SecondChaosOfSquare) {
  const auto psi = Kernel::power_law(2.0).truncated(5);
  const PathSimulator sim(psi, Nonlinearity::polynomial({0, 0, 1, 0}), 2, 30);
  const double l2 = psi.l2_norm_squared();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto cfg = sample_configuration(sim.window(), seed);
    const auto x = sim.first_chaos_sequence(cfg);
    const auto s = sim.summands(cfg);
    for (std::size_t u = 0; u < 30; ++u) {
      const auto pu = psi.shifted(static_cast<long>(u));
      double sq = 0.0;
      for (double p : cfg.points()) sq += pu(p) * pu(p);
      const double expected = x[u] * x[u] - l2 - (sq - l2);
      EXPECT_NEAR(s[u], expected, 1e-9) << u;
    }
  }
}

TEST(Simulator, OrderZeroKeepsPhi) {
  const auto psi = Kernel::indicator(0, 1);
  const PathSimulator sim(psi, Nonlinearity::polynomial({1, 2, 3, 0}), 0, 10);
  const auto cfg = sample_configuration(sim.window(), 3);
  const auto x = sim.first_chaos_sequence(cfg);
  const auto s = sim.summands(cfg);
  for (std::size_t u = 0; u < 10; ++u) EXPECT_NEAR(s[u], 1 + 2 * x[u] + 3 * x[u] * x[u], 1e-12);
}

TEST(Simulator, DeterministicForSeed) {
  const auto psi = Kernel::power_law(2.0).truncated(10);
  const PathSimulator sim(psi, Nonlinearity::gaussian_bump(), 1, 200);
  EXPECT_EQ(sim.summands(42), sim.summands(42));
  EXPECT_NE(sim.summands(42), sim.summands(43));
}

TEST(Simulator, CentredSummands) {
  const auto psi = Kernel::power_law(2.0).truncated(10);
  for (int d : {1, 2}) {
    const PathSimulator sim(psi, Nonlinearity::gaussian_bump(), d, 64);
    std::vector<double> first;
    for (std::uint64_t r = 0; r < 4000; ++r) first.push_back(sim.summands(derive_seed(1, stream::kOracle, r))[10]);
    const auto m = mean_with_se(first);
    EXPECT_LT(std::abs(m.mean), 3.5 * m.se) << d;
  }
}

// A first-order chaos component would make Cov(s_u, X_u) nonzero; d = 2
// removes it.
TEST(Simulator, TruncationRemovesFirstChaos) {
  const auto psi = Kernel::power_law(2.0).truncated(10);
  const PathSimulator sim(psi, Nonlinearity::modulated_gaussian(1.0), 2, 32);
  std::vector<double> s, x;
  for (std::uint64_t r = 0; r < 20000; ++r) {
    const auto cfg = sample_configuration(sim.window(), derive_seed(2, stream::kOracle, r));
    s.push_back(sim.summands(cfg)[5]);
    x.push_back(sim.first_chaos_sequence(cfg)[5]);
  }
  const auto c = covariance_with_se(s, x);
  EXPECT_LT(std::abs(c.mean), 3.5 * c.se);
}

TEST(Simulator, RejectsUnboundedKernel) {
  EXPECT_THROW(PathSimulator(Kernel::power_law(2.0), Nonlinearity::gaussian_bump(), 1, 10), ValidationError);
  EXPECT_THROW(PathSimulator(Kernel::indicator(0, 1), Nonlinearity::polynomial({0, 0, 0, 1}), 3, 10),
               ValidationError);
}
