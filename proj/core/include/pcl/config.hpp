#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pcl/kernels.hpp"
#include "pcl/nonlinearity.hpp"

namespace pcl {

inline constexpr const char* kArtifactVersion = "0.3.0";
inline constexpr const char* kReportSchema = "pcl-report/1";

// Flat key=value pairs; a repeated key keeps its last value.
using ConfigMap = std::map<std::string, std::string>;

// Parses "key = value" lines; '#' starts a comment; blank lines are ignored.
ConfigMap parse_config_text(const std::string& text);
ConfigMap read_config_file(const std::filesystem::path& path);

struct ExperimentConfig {
  std::string kernel = "powerlaw:2";
  std::string phi = "gauss";
  int d = 0;  // 0 = not set: d_alpha for power laws, 1 otherwise
  std::vector<long> ns{1L << 14};
  long reps = 2000;
  std::vector<double> times{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> fdd_b{1.0};
  std::vector<double> fdd_t{1.0};
  std::uint64_t seed = 0;
  double tail_fraction = 1e-6;
  double max_radius = 1e4;
  long shift_cutoff = 200;
  double theta_step = 0.25;
  int hermite_points = 32;
  std::string method = "chaos_series";
  std::string out = "out";
  int threads = 0;
  double var_tolerance = 0.05;
  double ks_level = 0.01;
  double spread_limit = 3.0;
  double moment_p = 4.0;

  // Resolved values, filled by finalize().
  Kernel psi = Kernel::power_law(2.0);
  Nonlinearity nonlinearity = Nonlinearity::gaussian_bump();
  KernelModel model{Kernel::power_law(2.0), 0.0, 0.0};
  int d_alpha_value = 0;

  // Applies key=value overrides; unknown keys are rejected.
  void apply(const ConfigMap& values);
  // Parses specs, fills defaults and checks the theorem hypotheses.
  void finalize();
  // Canonical resolved configuration, one key=value per line.
  std::string canonical() const;
  // Hash of the result-relevant part of canonical().
  std::uint64_t hash() const;
};

ExperimentConfig load_config(const std::filesystem::path& path);

// alpha > 1/2 + 1/(2d), alpha != 1; throws ValidationError quoting the inequality.
void check_hypothesis(double alpha, int d);

struct RunManifest {
  std::string subcommand;
  std::string config;
  std::uint64_t config_hash = 0;
  std::string version = kArtifactVersion;
  std::chrono::system_clock::time_point start;
  std::chrono::system_clock::time_point end;
  std::vector<std::string> outputs;

  std::string render() const;
  void write(const std::filesystem::path& out_dir) const;
};

std::vector<double> parse_list(const std::string& text);
std::vector<long> parse_long_list(const std::string& text);

}  // namespace pcl
