#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pcl/config.hpp"
#include "pcl/errors.hpp"

using namespace pcl;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("pcl_test_config_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

ExperimentConfig resolved(const ConfigMap& m) {
  ExperimentConfig c;
  c.apply(m);
  c.finalize();
  return c;
}

}  // namespace

TEST(ConfigText, ParsesCommentsAndWhitespace) {
  const auto m = parse_config_text("# header\n  kernel = indicator:0,1  # trailing\n\nseed=7\nseed = 9\n");
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m.at("kernel"), "indicator:0,1");
  EXPECT_EQ(m.at("seed"), "9");
}

TEST(ConfigText, RejectsMalformedLines) {
  EXPECT_THROW(parse_config_text("kernel indicator\n"), ValidationError);
  EXPECT_THROW(parse_config_text(" = 3\n"), ValidationError);
}

TEST(Config, UnknownKeyRejected) {
  ExperimentConfig c;
  EXPECT_THROW(c.apply({{"kernal", "powerlaw:2"}}), ValidationError);
}

TEST(Config, ScientificNotationAccepted) {
  const auto c = resolved({{"n", "1e3,2.048e3"}, {"reps", "2e3"}, {"window", "5e2"}});
  EXPECT_EQ(c.ns, (std::vector<long>{1000, 2048}));
  EXPECT_EQ(c.reps, 2000);
  EXPECT_EQ(c.max_radius, 500.0);
  EXPECT_THROW(resolved({{"n", "1.5e0"}}), ValidationError);
  EXPECT_THROW(resolved({{"reps", "many"}}), ValidationError);
}

TEST(Config, HypothesisCheck) {
  try {
    resolved({{"alpha", "0.7"}, {"d", "1"}});
    FAIL() << "expected rejection";
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("alpha > 1/2 + 1/(2d) = 1"), std::string::npos) << msg;
  }
  const auto c = resolved({{"alpha", "0.8"}, {"d", "2"}});
  EXPECT_EQ(c.d, 2);
  EXPECT_EQ(c.d_alpha_value, 2);
  EXPECT_NE(c.canonical().find("# d_alpha=2"), std::string::npos);
  EXPECT_THROW(resolved({{"alpha", "1"}, {"d", "3"}}), ValidationError);
  EXPECT_THROW(check_hypothesis(0.6, 2), ValidationError);
  EXPECT_NO_THROW(check_hypothesis(0.8, 2));
}

TEST(Config, DefaultDIsDAlpha) {
  EXPECT_EQ(resolved({{"alpha", "0.8"}}).d, 2);
  EXPECT_EQ(resolved({{"alpha", "2"}}).d, 1);
  EXPECT_EQ(resolved({{"kernel", "indicator:0,1"}}).d, 1);
}

TEST(Config, AlphaRefinesKernelInEitherOrder) {
  const auto c = resolved({{"kernel", "powerlaw:2,3"}, {"alpha", "0.8"}});
  EXPECT_EQ(c.kernel, "powerlaw:0.8,3");
  EXPECT_DOUBLE_EQ(c.psi.decay_exponent(), 0.8);
}

TEST(Config, RangeChecks) {
  EXPECT_THROW(resolved({{"reps", "99"}}), ValidationError);
  EXPECT_THROW(resolved({{"times", "0.5,0.25"}}), ValidationError);
  EXPECT_THROW(resolved({{"times", "0,1.5"}}), ValidationError);
  EXPECT_THROW(resolved({{"fdd_b", "1,2"}}), ValidationError);
  EXPECT_THROW(resolved({{"seed", "-1"}}), ValidationError);
  EXPECT_THROW(resolved({{"phi", "poly:0,0,0,1"}, {"kernel", "indicator:0,1"}, {"d", "3"}}), ValidationError);
}

TEST(Config, MissingSeedDefaultsToZero) {
  const auto c = resolved({});
  EXPECT_EQ(c.seed, 0u);
  EXPECT_NE(c.canonical().find("\nseed=0\n"), std::string::npos);
}

TEST(Config, CanonicalRoundTrips) {
  const auto a = resolved({{"alpha", "0.8"}, {"phi", "modgauss:1.5"}, {"n", "1024,4096"}, {"times", "0,0.1,1"},
                           {"seed", "18446744073709551615"}, {"tail_fraction", "1e-5"}});
  const auto b = resolved(parse_config_text(a.canonical()));
  EXPECT_EQ(a.canonical(), b.canonical());
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(b.seed, 18446744073709551615ULL);
}

TEST(Config, HashIgnoresOutputLocationAndThreads) {
  const auto a = resolved({{"out", "x"}, {"threads", "1"}});
  const auto b = resolved({{"out", "y"}, {"threads", "4"}});
  const auto c = resolved({{"seed", "1"}});
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_NE(a.hash(), c.hash());
}

TEST(Config, LoadFromFile) {
  const auto dir = temp_dir("load");
  {
    std::ofstream f(dir / "run.cfg");
    f << "kernel=indicator:0,1\nphi=poly:x\nd=1\n";
  }
  const auto c = load_config(dir / "run.cfg");
  EXPECT_EQ(c.d, 1);
  EXPECT_THROW(load_config(dir / "missing.cfg"), ValidationError);
}

TEST(Lists, Parse) {
  EXPECT_EQ(parse_list("0, 0.5 ,1"), (std::vector<double>{0, 0.5, 1}));
  EXPECT_EQ(parse_long_list("1,2,3"), (std::vector<long>{1, 2, 3}));
  EXPECT_THROW(parse_list(""), ValidationError);
  EXPECT_THROW(parse_list("1,,2"), ValidationError);
}

TEST(Manifest, RendersHeaderAsCommentsAndParsesAsConfig) {
  const auto c = resolved({{"seed", "42"}});
  RunManifest m;
  m.subcommand = "clt";
  m.config = c.canonical();
  m.config_hash = c.hash();
  m.outputs = {"report.csv", "summary.json", "manifest.txt"};
  const auto text = m.render();
  EXPECT_NE(text.find("# subcommand=clt"), std::string::npos);
  EXPECT_NE(text.find("# version="), std::string::npos);
  EXPECT_NE(text.find("# output=summary.json"), std::string::npos);
  EXPECT_NE(text.find("# start="), std::string::npos);
  const auto back = resolved(parse_config_text(text));
  EXPECT_EQ(back.hash(), c.hash());

  const auto dir = temp_dir("manifest");
  m.write(dir);
  std::ifstream f(dir / "manifest.txt");
  std::stringstream ss;
  ss << f.rdbuf();
  EXPECT_EQ(ss.str(), text);
}
