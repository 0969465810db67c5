#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pcl/config.hpp"
#include "pcl/errors.hpp"
#include "pcl/report.hpp"
#include "pcl/simulation.hpp"
#include "pcl/stats.hpp"

using namespace pcl;

namespace {

ExperimentConfig make_config(const ConfigMap& m) {
  ExperimentConfig c;
  c.apply(m);
  c.finalize();
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("pcl_test_report_" + name);
  std::filesystem::remove_all(p);
  return p;
}

const ConfigMap kIndicator{{"kernel", "indicator:0,1"}, {"phi", "poly:x"}, {"d", "1"}};

}  // namespace

TEST(StatsReport, ChecksRecordBothSides) {
  StatsReport r;
  EXPECT_TRUE(r.all_pass());
  r.add_check("a", 1.0, 1.1, 0.2, true, "abs gap < tolerance");
  auto& c = r.add_check("b", 3.0, 1.0, 0.5, false, "abs gap < tolerance");
  EXPECT_EQ(c.reference, 1.0);
  EXPECT_FALSE(r.all_pass());
  ASSERT_NE(r.find_check("a"), nullptr);
  EXPECT_EQ(r.find_check("a")->tolerance, 0.2);
  EXPECT_EQ(r.find_check("zzz"), nullptr);
}

TEST(WriteReport, CsvSchemaAndJson) {
  StatsReport r;
  r.subcommand = "unit";
  r.add_row("path", 1024, 0.5, "var", 0.125, 1.0 / 3.0);
  r.add_scalar("mu2", 0.1);
  r.add_scalar("nan_value", std::nan(""));
  r.add_check("c", 1.0, 2.0, 0.5, false, "rule");
  const auto dir = temp_dir("write");
  const auto files = write_report(r, dir);
  EXPECT_EQ(files, (std::vector<std::string>{"report.csv", "summary.json"}));
  const auto csv = slurp(dir / "report.csv");
  EXPECT_EQ(csv.rfind("# schema=pcl-report/1 columns=section,n,t,statistic,value,se\n", 0), 0u);
  EXPECT_NE(csv.find("\nsection,n,t,statistic,value,se\n"), std::string::npos);
  EXPECT_NE(csv.find("path,1024,0.5,var,0.125,0.33333333333333331\n"), std::string::npos);
  const auto js = slurp(dir / "summary.json");
  EXPECT_NE(js.find("\"schema\": \"pcl-report/1\""), std::string::npos);
  EXPECT_NE(js.find("\"pass\": false"), std::string::npos);
  EXPECT_NE(js.find("\"nan_value\": \"nan\""), std::string::npos);
  EXPECT_NE(js.find("\"tolerance\": 0.5"), std::string::npos);
  EXPECT_NE(js.find("\"reference\": 2.0"), std::string::npos);
}

TEST(Harness, PathStartsAtZeroAndIsDeterministic) {
  auto cfg = make_config({{"alpha", "2"}, {"n", "512"}, {"seed", "3"}});
  const auto a = simulate_path(cfg, 512, 17);
  EXPECT_EQ(a.front(), 0.0);
  EXPECT_EQ(a, simulate_path(cfg, 512, 17));
  EXPECT_NE(a, simulate_path(cfg, 512, 18));
}

TEST(Harness, ReplicationsIndependentOfThreadCount) {
  auto cfg = make_config({{"alpha", "2"}, {"n", "256"}, {"reps", "120"}, {"threads", "1"}});
  const auto one = simulate_replications(cfg, 256);
  cfg.threads = 4;
  const auto four = simulate_replications(cfg, 256);
  EXPECT_EQ(one.y, four.y);
  EXPECT_EQ(one.z, four.z);
  EXPECT_EQ(one.fdd, four.fdd);
  EXPECT_EQ(one.y[33], simulate_path(cfg, 256, 33));
  EXPECT_EQ(one.fdd[5], fdd_statistic(cfg, 256, 5));
}

TEST(Harness, InterpolationAtIntegerAndFractionalTimes) {
  auto cfg = make_config({{"alpha", "2"}, {"times", "0,0.25,0.3003,1"}});
  const long n = 1000;
  const auto y = simulate_path(cfg, n, 2);
  const auto z = interpolate_z(cfg, n, 2);
  EXPECT_EQ(z[1], y[1]);
  EXPECT_EQ(z[3], y[3]);
  EXPECT_NE(z[2], y[2]);
}

// ||Z_n(t) - Y_n(t)||_2 <= n^{-1/2} ||T phi(X_0)||_2 (1 + 3 SE).
TEST(Harness, InterpolationGapBound) {
  auto cfg = make_config({{"alpha", "2"}, {"times", "0.3003"}, {"reps", "400"}});
  const long n = 1000;
  const auto s = simulate_replications(cfg, n);
  std::vector<double> gap2, x0sq;
  const PathSimulator sim(cfg.model.psi, cfg.nonlinearity, cfg.d, 1);
  for (long r = 0; r < cfg.reps; ++r) {
    const double g = s.z[static_cast<std::size_t>(r)][0] - s.y[static_cast<std::size_t>(r)][0];
    gap2.push_back(g * g);
    const double v = sim.summands(static_cast<std::uint64_t>(r) + 1000)[0];
    x0sq.push_back(v * v);
  }
  const auto m = mean_with_se(x0sq);
  const double bound = std::sqrt(m.mean / static_cast<double>(n)) * (1.0 + 3.0 * m.se / m.mean);
  EXPECT_LE(std::sqrt(mean_with_se(gap2).mean), bound);
}

// Indicator kernel with phi(x) = x: the X_u are iid compensated Poisson(1),
// so Var Y_n(1) = 1 for every n.
TEST(Harness, ExactVarianceCase) {
  auto cfg = make_config(
      [] {
        auto m = kIndicator;
        m["reps"] = "2000";
        m["times"] = "1";
        return m;
      }());
  const auto s = simulate_replications(cfg, 4096);
  std::vector<double> y;
  for (const auto& row : s.y) y.push_back(row[0]);
  const auto d = describe_sample(y);
  EXPECT_NEAR(d.variance, 1.0, 4.0 * d.variance_se);
}

TEST(Harness, IncrementStationarity) {
  auto cfg = make_config({{"alpha", "2"}, {"times", "0,0.25,0.5,0.75"}, {"reps", "1000"}});
  const auto s = simulate_replications(cfg, 1024);
  std::vector<double> diff;
  for (const auto& y : s.y) {
    const double a = y[1] - y[0], b = y[3] - y[2];
    diff.push_back(a * a - b * b);
  }
  const auto m = mean_with_se(diff);
  EXPECT_LT(std::abs(m.mean), 3.0 * m.se);
}

TEST(Harness, CltRejectsTooFewReplications) {
  auto cfg = make_config({{"alpha", "2"}});
  cfg.reps = 50;
  EXPECT_THROW(clt_report(cfg), ValidationError);
}

TEST(Harness, CltReportDeterministic) {
  auto cfg = make_config({{"alpha", "2"}, {"n", "256,512"}, {"reps", "200"}, {"seed", "42"}, {"shift_cutoff", "40"}});
  const auto a = clt_report(cfg);
  const auto b = clt_report(cfg);
  const auto da = temp_dir("clt_a"), db = temp_dir("clt_b");
  write_report(a, da);
  write_report(b, db);
  EXPECT_EQ(slurp(da / "report.csv"), slurp(db / "report.csv"));
  EXPECT_EQ(slurp(da / "summary.json"), slurp(db / "summary.json"));
  // Every check carries both sides.
  for (const auto& c : a.checks) {
    EXPECT_FALSE(c.name.empty());
    EXPECT_FALSE(c.rule.empty());
    EXPECT_TRUE(std::isfinite(c.reference)) << c.name;
  }
  // Below 2000 replications the KS test is not flagged.
  EXPECT_EQ(a.find_check("ks_p_value"), nullptr);
}

TEST(PsiEstimates, BoundsHoldOnTestDraws) {
  for (double gamma : {0.8, 2.0}) {
    const auto r = psi_estimates_report(gamma, 1);
    EXPECT_TRUE(r.all_pass()) << gamma;
    EXPECT_NE(r.find_check("three_factor_bound"), nullptr);
    EXPECT_NE(r.find_check("r4_even_bound"), nullptr);
  }
  EXPECT_THROW(psi_estimates_report(1.0, 1), ValidationError);
}

TEST(SpectralGap, ConstantAndFirstChaosMembers) {
  const auto psi = Kernel::power_law(2.0).truncated(20);
  const std::vector<double> ps{2.0, 4.0}, thetas{0.5, 1.0, 2.0};
  const auto t = sg_check(psi, ps, thetas, 4000, 5, 2.5);
  double fc2 = 0, fc4 = 0;
  for (const auto& row : t.rows) {
    if (row.member == "constant") {
      EXPECT_NEAR(row.lhs, 2.5, 1e-12);
      EXPECT_LE(row.ratio, 1.0 + 1e-12);
    }
    if (row.member == "first_chaos") {
      // D_x I_1(psi) = psi(x): RHS = ||psi||_2 + ||psi||_p
      const double l2 = std::sqrt(psi.l2_norm_squared());
      EXPECT_NEAR(row.rhs_l2, l2, 1e-6);
      (row.p == 2.0 ? fc2 : fc4) = row.ratio;
    }
    EXPECT_TRUE(std::isfinite(row.ratio));
    EXPECT_GT(row.rhs, 0.0);
  }
  EXPECT_GT(fc2, 0.0);
  EXPECT_LT(std::max(fc2, fc4) / std::min(fc2, fc4), 3.0);
  EXPECT_LT(t.spread, 3.0);
}
