#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pcl/chaos.hpp"
#include "pcl/config.hpp"
#include "pcl/errors.hpp"
#include "pcl/report.hpp"
#include "pcl/spectral.hpp"
#include "pcl/stats.hpp"

namespace {

using pcl::ConfigMap;
using pcl::ExperimentConfig;
using pcl::StatsReport;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

struct Flags {
  std::string config;
  ConfigMap overrides;
  std::string theta = "1";
};

// Defaults that differ per subcommand; config file and flags still win.
ConfigMap subcommand_defaults(const std::string& name) {
  if (name == "diagram-check") return {{"n", "256,512,1024,2048,4096"}};
  if (name == "moments") return {{"n", "1024,4096,16384"}};
  if (name == "sg-check") return {{"reps", "20000"}};
  return {};
}

ExperimentConfig resolve(const std::string& name, const Flags& flags) {
  ExperimentConfig cfg;
  cfg.apply(subcommand_defaults(name));
  if (!flags.config.empty()) cfg.apply(pcl::read_config_file(flags.config));
  cfg.apply(flags.overrides);
  cfg.finalize();
  return cfg;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

StatsReport run_charfn(const ExperimentConfig& cfg, const std::string& theta_text) {
  StatsReport rep;
  rep.subcommand = "charfn";
  const pcl::Kernel& psi = cfg.model.psi;
  const pcl::Window w(psi.support_lo(), psi.support_hi());
  for (double th : pcl::parse_list(theta_text)) {
    const auto cf = pcl::char_fn(th, psi, w);
    rep.add_row("charfn", 0, th, "re", cf.real());
    rep.add_row("charfn", 0, th, "im", cf.imag());
    std::cout << "theta=" << fmt(th) << " re=" << fmt(cf.real()) << " im=" << fmt(cf.imag()) << '\n';
  }
  return rep;
}

StatsReport run_variance(const ExperimentConfig& cfg) {
  StatsReport rep;
  rep.subcommand = "variance";
  const auto method = pcl::parse_mu_method(cfg.method);
  pcl::MuSquaredOptions mo;
  mo.shift_cutoff = cfg.shift_cutoff;
  mo.theta_step = cfg.theta_step;
  mo.hermite_points = cfg.hermite_points;
  mo.n = cfg.ns.front();
  mo.reps = cfg.reps;
  mo.seed = cfg.seed;
  mo.threads = cfg.threads;
  const auto w = pcl::spectral_window(cfg.model.psi, cfg.shift_cutoff);
  const auto r = pcl::mu_squared(cfg.nonlinearity, cfg.d, cfg.model.psi, w, method, mo);
  const double err = method == pcl::MuMethod::MonteCarlo ? r.std_error : r.tail_estimate;
  rep.add_scalar("mu2", r.value);
  rep.add_scalar("std_error", r.std_error);
  rep.add_scalar("tail_estimate", r.tail_estimate);
  rep.add_scalar("imag_residue", r.imag_residue);
  for (std::size_t u = 0; u < r.cov_by_shift.size(); ++u)
    rep.add_row("cov_by_shift", static_cast<long>(u), 0.0, "cov_phi", r.cov_by_shift[u]);
  std::printf("mu2 = %.6f +- %.2e (%s)\n", r.value, err, pcl::to_string(method).c_str());
  return rep;
}

StatsReport run_simulate(const ExperimentConfig& cfg, const std::filesystem::path& out,
                         std::vector<std::string>& extra) {
  StatsReport rep;
  rep.subcommand = "simulate";
  std::filesystem::create_directories(out);
  std::ofstream paths(out / "paths.csv");
  if (!paths) throw pcl::ValidationError("cannot write " + (out / "paths.csv").string());
  paths << "# schema=pcl-paths/1 columns=n,rep,t,y,z\nn,rep,t,y,z\n";
  char buf[96];
  for (long n : cfg.ns) {
    const auto s = pcl::simulate_replications(cfg, n);
    for (std::size_t r = 0; r < s.y.size(); ++r)
      for (std::size_t k = 0; k < cfg.times.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", cfg.times[k], s.y[r][k], s.z[r][k]);
        paths << n << ',' << r << ',' << buf << '\n';
      }
    for (std::size_t k = 0; k < cfg.times.size(); ++k) {
      std::vector<double> y;
      for (const auto& row : s.y) y.push_back(row[k]);
      const auto m = pcl::mean_with_se(y);
      rep.add_row("path", n, cfg.times[k], "mean", m.mean, m.se);
    }
    const auto f = pcl::mean_with_se(s.fdd);
    rep.add_row("fdd", n, 0.0, "mean", f.mean, f.se);
  }
  extra.push_back("paths.csv");
  std::cout << "simulated " << cfg.reps << " replications at " << cfg.ns.size() << " n value(s)\n";
  return rep;
}

StatsReport run_psi_estimates(const ExperimentConfig& cfg) {
  const double alpha = cfg.psi.decay_exponent();
  if (!std::isfinite(alpha)) throw pcl::ValidationError("psi-estimates needs a power-law kernel (set --alpha)");
  return pcl::psi_estimates_report(alpha, cfg.seed);
}

StatsReport run_sg_check(const ExperimentConfig& cfg) {
  const std::vector<double> ps{2.0, 4.0};
  const std::vector<double> thetas{0.5, 1.0, 2.0};
  const auto table = pcl::sg_check(cfg.model.psi, ps, thetas, cfg.reps, cfg.seed);
  StatsReport rep;
  rep.subcommand = "sg-check";
  for (const auto& r : table.rows) {
    const std::string tag = r.member + (r.member == "exponential" ? ":" + fmt(r.theta) : "");
    rep.add_row("sg_" + tag, 0, r.p, "lhs", r.lhs, r.lhs_se);
    rep.add_row("sg_" + tag, 0, r.p, "rhs", r.rhs);
    rep.add_row("sg_" + tag, 0, r.p, "ratio", r.ratio);
  }
  rep.add_scalar("max_ratio", table.max_ratio);
  rep.add_scalar("spread", table.spread);
  rep.add_check("ratio_spread", table.spread, 3.0, 3.0, table.spread <= 3.0, "max/min over non-constant members <= 3");
  std::printf("max ratio %.6f, spread %.4f\n", table.max_ratio, table.spread);
  return rep;
}

void print_checks(const StatsReport& rep) {
  for (const auto& c : rep.checks)
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " value=" << fmt(c.value) << " ref=" << fmt(c.reference)
              << " (" << c.rule << ")\n";
}

int run(const std::string& name, const Flags& flags) {
  const auto start = std::chrono::system_clock::now();
  const ExperimentConfig cfg = resolve(name, flags);
  const std::filesystem::path out = cfg.out;
  std::vector<std::string> extra;

  StatsReport rep;
  if (name == "charfn") rep = run_charfn(cfg, flags.theta);
  else if (name == "variance") rep = run_variance(cfg);
  else if (name == "simulate") rep = run_simulate(cfg, out, extra);
  else if (name == "moments") rep = pcl::moments_report(cfg);
  else if (name == "diagram-check") rep = pcl::diagram_report(cfg);
  else if (name == "psi-estimates") rep = run_psi_estimates(cfg);
  else if (name == "clt") rep = pcl::clt_report(cfg);
  else rep = run_sg_check(cfg);
  print_checks(rep);

  pcl::RunManifest manifest;
  manifest.subcommand = name;
  manifest.config = cfg.canonical();
  manifest.config_hash = cfg.hash();
  manifest.outputs = pcl::write_report(rep, out);
  manifest.outputs.insert(manifest.outputs.end(), extra.begin(), extra.end());
  manifest.outputs.push_back("manifest.txt");
  manifest.start = start;
  manifest.end = std::chrono::system_clock::now();
  manifest.write(out);
  return kExitOk;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"Poisson-functional CLT toolkit", "pcl"};
  app.set_version_flag("--version", std::string(pcl::kArtifactVersion));
  app.require_subcommand(1, 1);

  const std::vector<std::pair<std::string, std::string>> commands{
      {"charfn", "characteristic function of the first chaos"},
      {"simulate", "simulate paths of the truncated partial-sum process"},
      {"variance", "limiting variance mu^2"},
      {"moments", "p-th moment scaling of path increments"},
      {"diagram-check", "partition counts, diagram formula, B_{n,l,m} ladder"},
      {"psi-estimates", "envelope product estimates"},
      {"clt", "full CLT verification report"},
      {"sg-check", "spectral-gap ratio table"}};

  Flags flags;
  std::map<std::string, std::string> raw;
  const std::vector<std::pair<std::string, std::string>> keyed{
      {"kernel", "kernel family:params"}, {"phi", "nonlinearity family:params"},
      {"d", "truncation order"},          {"alpha", "power-law exponent"},
      {"n", "sample size(s), comma separated"},
      {"reps", "replications"},           {"seed", "master seed"},
      {"window", "kernel truncation radius"},
      {"out", "output directory"},        {"method", "chaos_series | covariance_series | monte_carlo"}};

  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "key=value config file");
    for (const auto& [key, h] : keyed) sub->add_option("--" + key, raw[key], h);
    if (name == "charfn") sub->add_option("--theta", flags.theta, "frequency list");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    app.exit(e);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitValidation;
  }

  for (const auto& [key, value] : raw)
    if (!value.empty()) flags.overrides[key] = value;
  return run(app.get_subcommands().front()->get_name(), flags);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const pcl::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const pcl::NumericalError& e) {
    std::cerr << "numerical guard: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "numerical guard: " << e.what() << '\n';
    return kExitNumerical;
  }
}
