#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pcl/config.hpp"
#include "pcl/kernels.hpp"
#include "pcl/spectral.hpp"

namespace pcl {

// One CSV row: (section, n, t, statistic) -> value with standard error.
struct ReportRow {
  std::string section;
  long n = 0;
  double t = 0.0;
  std::string statistic;
  double value = 0.0;
  double se = 0.0;
};

// A flagged comparison: both sides and the tolerance always recorded.
struct Check {
  std::string name;
  double value = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string rule;
};

struct StatsReport {
  std::string subcommand;
  std::vector<ReportRow> rows;
  std::vector<Check> checks;
  std::vector<std::pair<std::string, double>> scalars;

  void add_row(std::string section, long n, double t, std::string statistic, double value, double se = 0.0);
  Check& add_check(std::string name, double value, double reference, double tolerance, bool pass,
                   std::string rule);
  void add_scalar(std::string name, double value);
  bool all_pass() const;
  const Check* find_check(const std::string& name) const;
};

// Writes report.csv (schema comment first) and summary.json; returns file names.
std::vector<std::string> write_report(const StatsReport& report, const std::filesystem::path& out_dir);

// Per-replication samples at one n.
struct ReplicationSamples {
  long n = 0;
  std::vector<std::vector<double>> y;  // [rep][time index]
  std::vector<std::vector<double>> z;  // interpolated
  std::vector<double> fdd;             // fdd statistic per rep
};

ReplicationSamples simulate_replications(const ExperimentConfig& cfg, long n);

// One path of T^{>=d} Y_n over cfg.times for one replication.
std::vector<double> simulate_path(const ExperimentConfig& cfg, long n, long replication_index);
std::vector<double> interpolate_z(const ExperimentConfig& cfg, long n, long replication_index);
double fdd_statistic(const ExperimentConfig& cfg, long n, long replication_index);

// Full CLT verification: mu^2 by the analytic routes, Monte Carlo paths for
// every n, KS, fdd variance, odd moments, increment covariances, moment
// scaling, covariance decay.
StatsReport clt_report(const ExperimentConfig& cfg);

// p-th moment scaling of path increments over all (s, t) grid pairs and
// every n, plus odd moments of the fdd statistic.
StatsReport moments_report(const ExperimentConfig& cfg);

// Partition counts, the isometry identity for the diagram formula, and the
// B_{n,l,m} ladder against its limit for l = 2 and l = 3.
StatsReport diagram_report(const ExperimentConfig& cfg);

// Envelope estimates for Psi_gamma: Linf bound, two-sided L1 rate, the
// three-factor bound and the even R_4 bound. Constants are fitted on a
// calibration draw and checked on a disjoint test draw.
StatsReport psi_estimates_report(double gamma, std::uint64_t seed, int draws = 100);

// Spectral-gap ratio check.
struct SgRow {
  std::string member;
  double theta = 0.0;
  double p = 2.0;
  double lhs = 0.0;
  double lhs_se = 0.0;
  double mean_abs = 0.0;
  double rhs_l2 = 0.0;
  double rhs_lp = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

struct SgTable {
  std::vector<SgRow> rows;
  double max_ratio = 0.0;
  double spread = 0.0;  // max/min ratio over the non-constant members
};

SgTable sg_check(const Kernel& psi, std::span<const double> ps, std::span<const double> thetas, long samples,
                 std::uint64_t seed, double constant = 1.0, const QuadratureSpec& quad = {});

}  // namespace pcl
