#include "pcl/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "pcl/errors.hpp"

namespace pcl {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ValidationError("config key '" + key + "': cannot parse number '" + v + "'");
  }
  require(used == v.size() && std::isfinite(x), "config key '" + key + "': bad number '" + v + "'");
  return x;
}

long to_long(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  require(x == std::floor(x) && std::abs(x) < 9e15, "config key '" + key + "': expected an integer, got '" + v + "'");
  return static_cast<long>(x);
}

// Shortest text that reads back to the same double.
std::string num(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + num(xs[i]);
  return out;
}

std::string join(const std::vector<long>& xs) {
  std::ostringstream os;
  for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << xs[i];
  return os.str();
}

std::string iso_time(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    require(!key.empty(), "config line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

ConfigMap read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double("list", trim(item)));
  require(!out.empty(), "empty list '" + text + "'");
  return out;
}

std::vector<long> parse_long_list(const std::string& text) {
  std::vector<long> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_long("list", trim(item)));
  require(!out.empty(), "empty list '" + text + "'");
  return out;
}

void ExperimentConfig::apply(const ConfigMap& values) {
  // kernel first so that alpha refines it regardless of key order.
  if (auto it = values.find("kernel"); it != values.end()) kernel = it->second;
  for (const auto& [key, v] : values) {
    if (key == "kernel") continue;
    else if (key == "alpha") {
      // Shorthand for a unit power law; kept separate so it can refine a powerlaw kernel string.
      const double a = to_double(key, v);
      std::ostringstream os;
      os << "powerlaw:" << num(a);
      if (kernel.rfind("powerlaw:", 0) == 0) {
        const auto comma = kernel.find(',');
        if (comma != std::string::npos) os << kernel.substr(comma);
      }
      kernel = os.str();
    } else if (key == "phi") phi = v;
    else if (key == "d") d = static_cast<int>(to_long(key, v));
    else if (key == "n") ns = parse_long_list(v);
    else if (key == "reps") reps = to_long(key, v);
    else if (key == "times") times = parse_list(v);
    else if (key == "fdd_b") fdd_b = parse_list(v);
    else if (key == "fdd_t") fdd_t = parse_list(v);
    else if (key == "seed") {
      require(!v.empty() && v.find_first_not_of("0123456789") == std::string::npos,
              "config key 'seed': expected a non-negative integer");
      seed = std::stoull(v);
    } else if (key == "tail_fraction") tail_fraction = to_double(key, v);
    else if (key == "max_radius" || key == "window") max_radius = to_double(key, v);
    else if (key == "shift_cutoff") shift_cutoff = to_long(key, v);
    else if (key == "theta_step") theta_step = to_double(key, v);
    else if (key == "hermite_points") hermite_points = static_cast<int>(to_long(key, v));
    else if (key == "method") method = v;
    else if (key == "out") out = v;
    else if (key == "threads") threads = static_cast<int>(to_long(key, v));
    else if (key == "var_tolerance") var_tolerance = to_double(key, v);
    else if (key == "ks_level") ks_level = to_double(key, v);
    else if (key == "spread_limit") spread_limit = to_double(key, v);
    else if (key == "moment_p") moment_p = to_double(key, v);
    else throw ValidationError("unknown config key '" + key + "'");
  }
}

void check_hypothesis(double alpha, int d) {
  require(d >= 1, "d must be >= 1");
  require(alpha != 1.0, "alpha = 1 is excluded (log factor)");
  const double bound = 0.5 + 0.5 / d;
  if (!(alpha > bound)) {
    std::ostringstream os;
    os << "hypothesis violated: requires alpha > 1/2 + 1/(2d) = " << bound << " for d = " << d
       << ", got alpha = " << alpha;
    throw ValidationError(os.str());
  }
}

void ExperimentConfig::finalize() {
  psi = Kernel::parse(kernel);
  nonlinearity = Nonlinearity::parse(phi);
  const double alpha = psi.decay_exponent();
  d_alpha_value = std::isfinite(alpha) ? d_alpha(alpha) : 1;
  if (d == 0) d = d_alpha_value;
  require(d >= 1, "d must be >= 1");
  if (std::isfinite(alpha)) check_hypothesis(alpha, d);
  if (nonlinearity.polynomial_family() && d > 2)
    throw ValidationError("polynomial nonlinearity supports d <= 2; use a Fourier family for d >= 3");
  require(!ns.empty(), "at least one n is required");
  for (long n : ns) require(n >= 1, "n values must be >= 1");
  require(reps >= 100, "reps must be >= 100");
  require(std::is_sorted(times.begin(), times.end()), "times must be sorted");
  for (double t : times) require(t >= 0.0 && t <= 1.0, "times must lie in [0,1]");
  require(fdd_b.size() == fdd_t.size(), "fdd_b and fdd_t must have equal length");
  for (double t : fdd_t) require(t >= 0.0 && t <= 1.0, "fdd_t values must lie in [0,1]");
  require(tail_fraction > 0.0 && tail_fraction < 1.0, "tail_fraction must lie in (0,1)");
  require(shift_cutoff >= 0, "shift_cutoff must be >= 0");
  require(threads >= 0, "threads must be >= 0");
  require(moment_p > 2.0, "moment_p must exceed 2");
  model = effective_kernel(psi, tail_fraction, max_radius);
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream os;
  os << "kernel=" << kernel << '\n'
     << "phi=" << phi << '\n'
     << "d=" << d << '\n'
     << "n=" << join(ns) << '\n'
     << "reps=" << reps << '\n'
     << "times=" << join(times) << '\n'
     << "fdd_b=" << join(fdd_b) << '\n'
     << "fdd_t=" << join(fdd_t) << '\n'
     << "seed=" << seed << '\n'
     << "tail_fraction=" << num(tail_fraction) << '\n'
     << "max_radius=" << num(max_radius) << '\n'
     << "shift_cutoff=" << shift_cutoff << '\n'
     << "theta_step=" << num(theta_step) << '\n'
     << "hermite_points=" << hermite_points << '\n'
     << "method=" << method << '\n'
     << "out=" << out << '\n'
     << "threads=" << threads << '\n'
     << "var_tolerance=" << num(var_tolerance) << '\n'
     << "ks_level=" << num(ks_level) << '\n'
     << "spread_limit=" << num(spread_limit) << '\n'
     << "moment_p=" << num(moment_p) << '\n'
     << "# d_alpha=" << d_alpha_value << '\n'
     << "# kernel_radius=" << num(model.radius) << '\n'
     << "# kernel_tail_fraction=" << num(model.tail_fraction) << '\n';
  return os.str();
}

std::uint64_t ExperimentConfig::hash() const {
  // FNV-1a over the lines that affect results (not out= or threads=).
  std::uint64_t h = 1469598103934665603ULL;
  std::istringstream in(canonical());
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("out=", 0) == 0 || line.rfind("threads=", 0) == 0) continue;
    for (unsigned char c : line + '\n') {
      h ^= c;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  ExperimentConfig cfg;
  cfg.apply(read_config_file(path));
  cfg.finalize();
  return cfg;
}

std::string RunManifest::render() const {
  std::ostringstream os;
  // Header lines are comments so the file doubles as a config.
  os << "# pcl run manifest\n"
     << "# subcommand=" << subcommand << '\n'
     << "# version=" << version << '\n'
     << "# config_hash=" << std::hex << std::setw(16) << std::setfill('0') << config_hash << std::dec << '\n'
     << "# start=" << iso_time(start) << '\n'
     << "# end=" << iso_time(end) << '\n';
  for (const auto& f : outputs) os << "# output=" << f << '\n';
  os << "# resolved config\n" << config;
  return os.str();
}

void RunManifest::write(const std::filesystem::path& out_dir) const {
  std::filesystem::create_directories(out_dir);
  std::ofstream f(out_dir / "manifest.txt");
  if (!f) throw ValidationError("cannot write " + (out_dir / "manifest.txt").string());
  f << render();
}

}  // namespace pcl
