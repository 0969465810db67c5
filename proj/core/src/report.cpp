#include "pcl/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <json.hpp>

#include "pcl/chaos.hpp"
#include "pcl/diagram.hpp"
#include "pcl/partition.hpp"
#include "pcl/process.hpp"
#include "pcl/rng.hpp"
#include "pcl/simulation.hpp"
#include "pcl/stats.hpp"

namespace pcl {

// ---------------------------------------------------------------------------
// StatsReport

void StatsReport::add_row(std::string section, long n, double t, std::string statistic, double value, double se) {
  rows.push_back({std::move(section), n, t, std::move(statistic), value, se});
}

Check& StatsReport::add_check(std::string name, double value, double reference, double tolerance, bool pass,
                              std::string rule) {
  checks.push_back({std::move(name), value, reference, tolerance, pass, std::move(rule)});
  return checks.back();
}

void StatsReport::add_scalar(std::string name, double value) { scalars.emplace_back(std::move(name), value); }

bool StatsReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check* StatsReport::find_check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::ordered_json num(double v) {
  if (std::isfinite(v)) return v;
  return fmt(v);
}

}  // namespace

std::vector<std::string> write_report(const StatsReport& report, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream csv(out_dir / "report.csv");
    if (!csv) throw ValidationError("cannot write " + (out_dir / "report.csv").string());
    csv << "# schema=" << kReportSchema << " columns=section,n,t,statistic,value,se\n";
    csv << "section,n,t,statistic,value,se\n";
    for (const auto& r : report.rows)
      csv << r.section << ',' << r.n << ',' << fmt(r.t) << ',' << r.statistic << ',' << fmt(r.value) << ','
          << fmt(r.se) << '\n';
  }
  {
    nlohmann::ordered_json j;
    j["schema"] = kReportSchema;
    j["subcommand"] = report.subcommand;
    j["pass"] = report.all_pass();
    auto& scal = j["scalars"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : report.scalars) scal[k] = num(v);
    auto& checks = j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : report.checks) {
      checks.push_back({{"name", c.name},
                        {"value", num(c.value)},
                        {"reference", num(c.reference)},
                        {"tolerance", num(c.tolerance)},
                        {"rule", c.rule},
                        {"pass", c.pass}});
    }
    std::ofstream js(out_dir / "summary.json");
    if (!js) throw ValidationError("cannot write " + (out_dir / "summary.json").string());
    js << j.dump(2) << '\n';
  }
  return {"report.csv", "summary.json"};
}

// ---------------------------------------------------------------------------
// Paths

namespace {

std::uint64_t replication_seed(const ExperimentConfig& cfg, long n, long rep) {
  return derive_seed(splitmix64(cfg.seed ^ static_cast<std::uint64_t>(n)), stream::kReplication,
                     static_cast<std::uint64_t>(rep));
}

PathSimulator make_simulator(const ExperimentConfig& cfg, long n) {
  return PathSimulator(cfg.model.psi, cfg.nonlinearity, cfg.d, n, {}, cfg.theta_step);
}

}  // namespace

ReplicationSamples simulate_replications(const ExperimentConfig& cfg, long n) {
  const PathSimulator sim = make_simulator(cfg, n);
  ReplicationSamples out;
  out.n = n;
  out.y.resize(static_cast<std::size_t>(cfg.reps));
  out.z.resize(static_cast<std::size_t>(cfg.reps));
  out.fdd.resize(static_cast<std::size_t>(cfg.reps));
  parallel_for(cfg.reps, resolve_threads(cfg.threads), [&](long r) {
    const auto s = sim.summands(replication_seed(cfg, n, r));
    const auto i = static_cast<std::size_t>(r);
    out.y[i] = partial_path(s, n, cfg.times);
    out.z[i] = interpolated_path(s, n, cfg.times);
    out.fdd[i] = fdd_value(s, n, cfg.fdd_b, cfg.fdd_t);
  });
  return out;
}

std::vector<double> simulate_path(const ExperimentConfig& cfg, long n, long replication_index) {
  const auto s = make_simulator(cfg, n).summands(replication_seed(cfg, n, replication_index));
  return partial_path(s, n, cfg.times);
}

std::vector<double> interpolate_z(const ExperimentConfig& cfg, long n, long replication_index) {
  const auto s = make_simulator(cfg, n).summands(replication_seed(cfg, n, replication_index));
  return interpolated_path(s, n, cfg.times);
}

double fdd_statistic(const ExperimentConfig& cfg, long n, long replication_index) {
  const auto s = make_simulator(cfg, n).summands(replication_seed(cfg, n, replication_index));
  return fdd_value(s, n, cfg.fdd_b, cfg.fdd_t);
}

// ---------------------------------------------------------------------------
// CLT report

namespace {

std::vector<double> column(const std::vector<std::vector<double>>& m, std::size_t k) {
  std::vector<double> out;
  out.reserve(m.size());
  for (const auto& row : m) out.push_back(row[k]);
  return out;
}

// p-th moment of Y(t) - Y(s) over sqrt(([nt] - [ns]) / n), all grid pairs.
void scaling_rows(StatsReport& rep, const ExperimentConfig& cfg, const ReplicationSamples& s, double& lo,
                  double& hi) {
  const std::size_t T = cfg.times.size();
  const long n = s.n;
  for (std::size_t a = 0; a < T; ++a)
    for (std::size_t b = a + 1; b < T; ++b) {
      const long gap = floor_index(n, cfg.times[b]) - floor_index(n, cfg.times[a]);
      if (gap <= 0) continue;
      std::vector<double> pw;
      pw.reserve(s.y.size());
      for (const auto& row : s.y) pw.push_back(std::pow(std::abs(row[b] - row[a]), cfg.moment_p));
      const auto m = mean_with_se(pw);
      const double scale = std::sqrt(static_cast<double>(gap) / n);
      const double ratio = std::pow(m.mean, 1.0 / cfg.moment_p) / scale;
      const double se = m.se * std::pow(m.mean, 1.0 / cfg.moment_p - 1.0) / cfg.moment_p / scale;
      rep.add_row("scaling", n, cfg.times[b] - cfg.times[a], "lp_ratio_s=" + fmt(cfg.times[a]), ratio, se);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
}

void spread_check(StatsReport& rep, const ExperimentConfig& cfg, double lo, double hi) {
  if (!(hi > 0.0)) return;
  rep.add_scalar("scaling_ratio_min", lo);
  rep.add_scalar("scaling_ratio_max", hi);
  rep.add_check("moment_scaling_spread", hi / lo, cfg.spread_limit, cfg.spread_limit, hi / lo <= cfg.spread_limit,
                "max/min <= limit");
}

}  // namespace

StatsReport clt_report(const ExperimentConfig& cfg) {
  require(cfg.reps >= 100, "clt_report needs at least 100 replications");
  StatsReport rep;
  rep.subcommand = "clt";

  // mu^2, two analytic routes.
  MuSquaredOptions mo;
  mo.shift_cutoff = cfg.shift_cutoff;
  mo.theta_step = cfg.theta_step;
  mo.hermite_points = cfg.hermite_points;
  const Window sw = spectral_window(cfg.model.psi, cfg.shift_cutoff);
  const auto chaos = mu_squared(cfg.nonlinearity, cfg.d, cfg.model.psi, sw, MuMethod::ChaosSeries, mo);
  const auto covs = mu_squared(cfg.nonlinearity, cfg.d, cfg.model.psi, sw, MuMethod::CovarianceSeries, mo);
  const double mu2 = chaos.value;
  rep.add_scalar("mu2_chaos_series", chaos.value);
  rep.add_scalar("mu2_covariance_series", covs.value);
  rep.add_scalar("mu2_tail_estimate", chaos.tail_estimate);
  rep.add_scalar("mu2_imag_residue", chaos.imag_residue);
  rep.add_scalar("kernel_radius", cfg.model.radius);
  rep.add_scalar("kernel_tail_fraction", cfg.model.tail_fraction);
  const double route_gap = std::abs(chaos.value - covs.value) / std::abs(chaos.value);
  rep.add_check("mu2_route_agreement", chaos.value, covs.value, 1e-3, route_gap < 1e-3, "relative gap < tolerance");
  require(mu2 > 0.0, "analytic mu^2 is not positive; nothing to normalise by");
  const double mu = std::sqrt(mu2);

  for (long u = 0; u < static_cast<long>(chaos.cov_by_shift.size()); ++u)
    rep.add_row("decay", u, 0.0, "cov_phi", chaos.cov_by_shift[static_cast<std::size_t>(u)]);
  {
    std::vector<double> xs, ys;
    for (long u = 4; u < static_cast<long>(chaos.cov_by_shift.size()); ++u) {
      xs.push_back(static_cast<double>(u));
      ys.push_back(std::abs(chaos.cov_by_shift[static_cast<std::size_t>(u)]));
    }
    rep.add_scalar("decay_slope", loglog_slope(xs, ys));
  }

  double fdd_var = 0.0;
  for (std::size_t a = 0; a < cfg.fdd_b.size(); ++a)
    for (std::size_t c = 0; c < cfg.fdd_b.size(); ++c)
      fdd_var += cfg.fdd_b[a] * cfg.fdd_b[c] * std::min(cfg.fdd_t[a], cfg.fdd_t[c]);

  std::vector<long> ns = cfg.ns;
  std::sort(ns.begin(), ns.end());
  double ratio_min = std::numeric_limits<double>::infinity(), ratio_max = 0.0;
  const std::size_t T = cfg.times.size();

  for (long n : ns) {
    const auto s = simulate_replications(cfg, n);
    const bool last = n == ns.back();
    for (std::size_t k = 0; k < T; ++k) {
      const auto y = column(s.y, k);
      const auto z = column(s.z, k);
      const double t = cfg.times[k];
      if (floor_index(n, t) == 0) {
        rep.add_row("path", n, t, "max_abs_y", *std::max_element(y.begin(), y.end(), [](double a, double b) {
          return std::abs(a) < std::abs(b);
        }));
        continue;
      }
      const auto st = describe_sample(y);
      rep.add_row("path", n, t, "mean", st.mean, st.mean_se);
      rep.add_row("path", n, t, "variance", st.variance, st.variance_se);
      rep.add_row("path", n, t, "skewness", st.skewness);
      rep.add_row("path", n, t, "kurtosis", st.kurtosis);
      rep.add_row("path", n, t, "variance_ref", mu2 * static_cast<double>(floor_index(n, t)) / n);
      std::vector<double> dz(y.size());
      for (std::size_t i = 0; i < y.size(); ++i) dz[i] = (z[i] - y[i]) * (z[i] - y[i]);
      const auto zy = mean_with_se(dz);
      rep.add_row("interp", n, t, "rms_z_minus_y", std::sqrt(zy.mean), zy.se / (2.0 * std::sqrt(std::max(zy.mean, 1e-300))));
    }

    scaling_rows(rep, cfg, s, ratio_min, ratio_max);

    const auto fs = describe_sample(s.fdd);
    rep.add_row("fdd", n, 0.0, "variance", fs.variance, fs.variance_se);
    rep.add_row("fdd", n, 0.0, "variance_ref", mu2 * fdd_var);
    rep.add_row("fdd", n, 0.0, "mean", fs.mean, fs.mean_se);
    rep.add_row("fdd", n, 0.0, "third_moment", fs.third_moment, fs.third_moment_se);
    if (!last) continue;

    // Checks at the largest n.
    const auto y1 = column(s.y, T - 1);
    const auto st1 = describe_sample(y1);
    const double var_ref = mu2 * static_cast<double>(floor_index(n, cfg.times.back())) / n;
    rep.add_check("variance_y_end", st1.variance, var_ref, cfg.var_tolerance,
                  std::abs(st1.variance / var_ref - 1.0) < cfg.var_tolerance, "relative gap < tolerance");
    if (fdd_var > 0.0)
      rep.add_check("variance_fdd", fs.variance, mu2 * fdd_var, cfg.var_tolerance,
                    std::abs(fs.variance / (mu2 * fdd_var) - 1.0) < cfg.var_tolerance, "relative gap < tolerance");
    rep.add_check("odd_moment_1", fs.mean, 0.0, 3.0 * fs.mean_se, std::abs(fs.mean) <= 3.0 * fs.mean_se,
                  "|value| <= 3 SE");
    rep.add_check("odd_moment_3", fs.third_moment, 0.0, 3.0 * fs.third_moment_se,
                  std::abs(fs.third_moment) <= 3.0 * fs.third_moment_se, "|value| <= 3 SE");
    if (cfg.reps >= 2000) {
      std::vector<double> norm(y1.size());
      const double sd = mu * std::sqrt(static_cast<double>(floor_index(n, cfg.times.back())) / n);
      for (std::size_t i = 0; i < y1.size(); ++i) norm[i] = y1[i] / sd;
      const auto ks = ks_test_normal(norm);
      rep.add_scalar("ks_statistic", ks.statistic);
      rep.add_check("ks_p_value", ks.p_value, cfg.ks_level, cfg.ks_level, ks.p_value > cfg.ks_level, "p > level");
      std::vector<double> fourth(norm.size());
      for (std::size_t i = 0; i < norm.size(); ++i) fourth[i] = std::pow(norm[i], 4);
      const auto k4 = mean_with_se(fourth);
      rep.add_check("fourth_moment", k4.mean, 3.0, 3.0 * k4.se, std::abs(k4.mean - 3.0) <= 3.0 * k4.se,
                    "|value - 3| <= 3 SE");
    }
    // Disjoint increments over consecutive grid cells.
    for (std::size_t a = 0; a + 1 < T; ++a)
      for (std::size_t b = a + 1; b + 1 < T; ++b) {
        std::vector<double> da, db;
        for (const auto& row : s.y) {
          da.push_back(row[a + 1] - row[a]);
          db.push_back(row[b + 1] - row[b]);
        }
        const auto c = covariance_with_se(da, db);
        rep.add_check("increment_cov_" + std::to_string(a) + "_" + std::to_string(b), c.mean, 0.0, 3.0 * c.se,
                      std::abs(c.mean) <= 3.0 * c.se, "|value| <= 3 SE");
      }
    const double rho1 = lag1_autocorrelation(y1);
    const double rho_se = 1.0 / std::sqrt(static_cast<double>(y1.size()));
    rep.add_check("replication_lag1", rho1, 0.0, 3.0 * rho_se, std::abs(rho1) <= 3.0 * rho_se, "|value| <= 3 SE");
    // ||Z - Y||_2 <= n^{-1/2} ||T phi(X_0)||_2 at every grid time.
    double worst = 0.0;
    for (std::size_t k = 0; k < T; ++k) {
      double acc = 0.0;
      for (std::size_t i = 0; i < s.y.size(); ++i) acc += std::pow(s.z[i][k] - s.y[i][k], 2);
      worst = std::max(worst, std::sqrt(acc / s.y.size()));
    }
    const double zbound = std::sqrt(std::max(chaos.cov_by_shift.empty() ? 0.0 : chaos.cov_by_shift[0], 0.0) / n);
    rep.add_check("interpolation_gap", worst, zbound, zbound * 3.0 / std::sqrt(static_cast<double>(cfg.reps)),
                  worst <= zbound * (1.0 + 3.0 / std::sqrt(static_cast<double>(cfg.reps))), "value <= bound (1 + 3 SE)");
  }
  spread_check(rep, cfg, ratio_min, ratio_max);
  return rep;
}

// ---------------------------------------------------------------------------
// Moment scaling

StatsReport moments_report(const ExperimentConfig& cfg) {
  StatsReport rep;
  rep.subcommand = "moments";
  rep.add_scalar("p", cfg.moment_p);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  std::vector<long> ns = cfg.ns;
  std::sort(ns.begin(), ns.end());
  for (long n : ns) {
    const auto s = simulate_replications(cfg, n);
    scaling_rows(rep, cfg, s, lo, hi);
    const auto fs = describe_sample(s.fdd);
    rep.add_row("fdd", n, 0.0, "mean", fs.mean, fs.mean_se);
    rep.add_row("fdd", n, 0.0, "third_moment", fs.third_moment, fs.third_moment_se);
    rep.add_row("fdd", n, 0.0, "fourth_moment", fs.fourth_moment);
  }
  spread_check(rep, cfg, lo, hi);
  return rep;
}

// ---------------------------------------------------------------------------
// Diagram formula

namespace {

double double_factorial(int k) {
  double r = 1.0;
  for (int i = k; i > 1; i -= 2) r *= i;
  return r;
}

}  // namespace

StatsReport diagram_report(const ExperimentConfig& cfg) {
  StatsReport rep;
  rep.subcommand = "diagram-check";

  for (int p = 1; p <= 4; ++p) {
    const GroupShape ones(std::vector<int>(static_cast<std::size_t>(2 * p), 1));
    const auto count = static_cast<double>(enumerate_partitions(ones, PartitionFilter::PiEq2).size());
    const double ref = double_factorial(2 * p - 1);
    rep.add_check("pairings_2p=" + std::to_string(2 * p), count, ref, 0.0, count == ref, "exact");
  }
  {
    const auto count = static_cast<double>(enumerate_partitions(GroupShape({2, 2}), PartitionFilter::PiGe2).size());
    rep.add_check("pi_ge2_shape_2_2", count, 2.0, 0.0, count == 2.0, "exact");
  }

  const Kernel psi = cfg.model.psi;
  require(std::isfinite(psi.support_lo()) && std::isfinite(psi.support_hi()),
          "diagram-check needs a kernel with bounded support");
  const Window w(psi.support_lo(), psi.support_hi());
  const auto bps = psi.breakpoints();

  // E I_q(g^q) I_q(h^q) = q! (int g h)^q.
  const auto g = [psi](double x) { return cplx(psi(x), 0.0); };
  const auto h = [psi](double x) { return std::exp(cplx(0.0, psi(x))) - 1.0; };
  const cplx gh = integrate([&](double x) { return g(x) * h(x); }, w, {}, bps);
  for (int q = 1; q <= 3; ++q) {
    const std::vector<ProductKernel> ks{ProductKernel::tensor_power(1.0, g, q, 0, bps),
                                        ProductKernel::tensor_power(1.0, h, q, 1, bps)};
    EnvelopeCheck env;
    env.max_constant = std::numeric_limits<double>::infinity();
    const cplx v = moment_of_product(ks, GroupShape({q, q}), w, {}, env);
    const cplx ref = factorial(q) * std::pow(gh, q);
    const double rel = std::abs(v - ref) / std::abs(ref);
    rep.add_check("isometry_q=" + std::to_string(q), std::abs(v), std::abs(ref), 1e-9, rel < 1e-9,
                  "relative gap < tolerance");
  }

  // B_{n,l,m} ladder.
  std::vector<long> ns = cfg.ns;
  std::sort(ns.begin(), ns.end());
  for (long n : ns) require(n <= kMaxBMomentN, "diagram-check needs n <= " + std::to_string(kMaxBMomentN));
  BMomentSpec spec;
  spec.d = cfg.d;
  spec.m = 4;
  spec.b = cfg.fdd_b;
  spec.t = cfg.fdd_t;
  const Window ww = w;

  spec.thetas = {1.0, -1.0};
  const cplx lim = b_moment_limit(spec, psi, ww, cfg.shift_cutoff);
  rep.add_scalar("b2_limit_re", lim.real());
  rep.add_scalar("b2_limit_im", lim.imag());
  const auto b2 = b_moment(spec, ns, psi, ww);
  std::vector<double> gaps;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    gaps.push_back(std::abs(b2[i] - lim) / std::abs(lim));
    rep.add_row("b_moment_l2", ns[i], 0.0, "re", b2[i].real());
    rep.add_row("b_moment_l2", ns[i], 0.0, "im", b2[i].imag());
    rep.add_row("b_moment_l2", ns[i], 0.0, "rel_gap", gaps.back());
  }
  const bool dec2 = std::is_sorted(gaps.rbegin(), gaps.rend(), std::less_equal<>{}) || gaps.size() < 2;
  rep.add_check("b2_gap_decreasing", dec2 ? 1.0 : 0.0, 1.0, 0.0, dec2, "strictly decreasing in n");
  rep.add_check("b2_gap_final", gaps.back(), 0.05, 0.05, gaps.back() < 0.05, "relative gap < tolerance");

  spec.thetas = {1.0, -1.0, 0.5};
  const auto b3 = b_moment(spec, ns, psi, ww);
  std::vector<double> mags;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    mags.push_back(std::abs(b3[i]));
    rep.add_row("b_moment_l3", ns[i], 0.0, "re", b3[i].real());
    rep.add_row("b_moment_l3", ns[i], 0.0, "im", b3[i].imag());
    rep.add_row("b_moment_l3", ns[i], 0.0, "abs", mags.back());
  }
  const bool dec3 = std::is_sorted(mags.rbegin(), mags.rend(), std::less_equal<>{}) || mags.size() < 2;
  rep.add_check("b3_abs_decreasing", dec3 ? 1.0 : 0.0, 1.0, 0.0, dec3, "strictly decreasing in n");
  return rep;
}

// ---------------------------------------------------------------------------
// Envelope estimates

namespace {

// Largest ratio over a set; the calibration constant.
double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

}  // namespace

StatsReport psi_estimates_report(double gamma, std::uint64_t seed, int draws) {
  require(gamma > 0.5 && gamma != 1.0, "gamma must lie in (1/2,1) or (1,inf)");
  require(draws >= 10, "need at least 10 draws");
  StatsReport rep;
  rep.subcommand = "psi-estimates";
  rep.add_scalar("gamma", gamma);
  const double rate = std::max(1.0 - 2.0 * gamma, -gamma);
  rep.add_scalar("l1_rate_exponent", rate);
  constexpr double kSlack = 2.0;
  const std::string slack_rule = "test ratio <= 2 x calibrated constant";

  auto engine = make_engine(derive_seed(seed, stream::kCalibration, 0));
  std::uniform_int_distribution<long> shift(-200, 200);

  // Linf: exact bound.
  double worst = 0.0;
  for (int k = 0; k < 2 * draws; ++k) {
    const long i = shift(engine), j = shift(engine);
    const double v = envelope_inner(gamma, i, j, Norm::Linf);
    worst = std::max(worst, v / std::pow(1.0 + std::abs(i - j), -gamma));
  }
  rep.add_check("linf_bound", worst, 1.0, 1e-12, worst <= 1.0 + 1e-12, "value / bound <= 1");

  // Two-sided L1 rate: fit on odd |i - j|, test on even.
  std::vector<double> cal, test;
  for (long u = 1; u <= 100; ++u) {
    const double v = envelope_inner(gamma, 0, u, Norm::L1);
    const double r = v / std::pow(1.0 + u, rate);
    rep.add_row("l1_rate", u, 0.0, "ratio", r);
    (u % 2 ? cal : test).push_back(r);
  }
  const double c1 = *std::min_element(cal.begin(), cal.end());
  const double c2 = max_of(cal);
  rep.add_scalar("l1_lower_constant", c1);
  rep.add_scalar("l1_upper_constant", c2);
  const double t1 = *std::min_element(test.begin(), test.end());
  const double t2 = max_of(test);
  rep.add_check("l1_upper", t2, c2, kSlack * c2, t2 <= kSlack * c2, slack_rule);
  rep.add_check("l1_lower", t1, c1, c1 / kSlack, t1 >= c1 / kSlack, "test ratio >= calibrated constant / 2");

  auto l1 = [&](long i, long j) { return envelope_inner(gamma, i, j, Norm::L1); };

  // Three factors against the sum of pairwise products.
  auto three = [&](std::vector<double>& out) {
    for (int k = 0; k < draws; ++k) {
      const std::vector<long> us{shift(engine), shift(engine), shift(engine)};
      const double lhs = envelope_product_integral(gamma, us);
      const double rhs = l1(us[0], us[1]) * l1(us[0], us[2]) + l1(us[0], us[1]) * l1(us[1], us[2]) +
                         l1(us[0], us[2]) * l1(us[1], us[2]);
      out.push_back(lhs / rhs);
    }
  };
  std::vector<double> c3, t3;
  three(c3);
  three(t3);
  rep.add_scalar("three_factor_constant", max_of(c3));
  rep.add_check("three_factor_bound", max_of(t3), max_of(c3), kSlack * max_of(c3), max_of(t3) <= kSlack * max_of(c3),
                slack_rule);

  // R_4(u) <= C R_2(u1,u2) R_2(u3,u4).
  auto four = [&](std::vector<double>& out) {
    for (int k = 0; k < draws; ++k) {
      const std::vector<long> us{shift(engine), shift(engine), shift(engine), shift(engine)};
      const std::vector<long> a{us[0], us[1]}, b{us[2], us[3]};
      out.push_back(r_k(us, gamma) / (r_k(a, gamma) * r_k(b, gamma)));
    }
  };
  std::vector<double> c4, t4;
  four(c4);
  four(t4);
  rep.add_scalar("r4_constant", max_of(c4));
  rep.add_check("r4_even_bound", max_of(t4), max_of(c4), kSlack * max_of(c4), max_of(t4) <= kSlack * max_of(c4),
                slack_rule);
  return rep;
}

// ---------------------------------------------------------------------------
// Spectral-gap ratios

SgTable sg_check(const Kernel& psi_in, std::span<const double> ps, std::span<const double> thetas, long samples,
                 std::uint64_t seed, double constant, const QuadratureSpec& quad) {
  require(samples >= 100, "sg_check needs at least 100 samples");
  for (double p : ps) require(p >= 2.0, "sg_check requires p >= 2");
  const Kernel psi = psi_in.shifted(0);
  require(std::isfinite(psi.support_lo()) && std::isfinite(psi.support_hi()),
          "sg_check needs a kernel with bounded support; cut it with effective_kernel");
  const Window w(psi.support_lo(), psi.support_hi());
  const auto bps = psi.breakpoints();
  const FirstChaos X(psi, w, quad);

  std::vector<double> xs(static_cast<std::size_t>(samples));
  for (long i = 0; i < samples; ++i)
    xs[static_cast<std::size_t>(i)] = X(sample_configuration(w, derive_seed(seed, stream::kSpectralGap, static_cast<std::uint64_t>(i))));

  SgTable table;
  auto finish = [&](SgRow row, const std::vector<double>& absF, std::complex<double> meanF, auto&& modulus) {
    const double p = row.p;
    std::vector<double> pw(absF.size());
    for (std::size_t i = 0; i < absF.size(); ++i) pw[i] = std::pow(absF[i], p);
    const auto m = mean_with_se(pw);
    row.lhs = std::pow(m.mean, 1.0 / p);
    row.lhs_se = m.mean > 0 ? m.se * std::pow(m.mean, 1.0 / p - 1.0) / p : 0.0;
    row.mean_abs = std::abs(meanF);
    row.rhs_l2 = std::sqrt(integrate([&](double x) { return std::pow(modulus(x), 2); }, w, quad, bps));
    row.rhs_lp = std::pow(integrate([&](double x) { return std::pow(modulus(x), p); }, w, quad, bps), 1.0 / p);
    row.rhs = row.mean_abs + row.rhs_l2 + row.rhs_lp;
    row.ratio = row.rhs > 0 ? row.lhs / row.rhs : 0.0;
    table.max_ratio = std::max(table.max_ratio, row.ratio);
    table.rows.push_back(row);
  };

  for (double p : ps) {
    {
      SgRow row{"constant", 0.0, p};
      std::vector<double> a(xs.size(), std::abs(constant));
      finish(row, a, constant, [](double) { return 0.0; });
    }
    {
      SgRow row{"first_chaos", 0.0, p};
      std::vector<double> a(xs.size());
      double mean = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        a[i] = std::abs(xs[i]);
        mean += xs[i];
      }
      finish(row, a, mean / xs.size(), [&](double x) { return std::abs(psi(x)); });
    }
    for (double th : thetas) {
      SgRow row{"exponential", th, p};
      const auto cf = char_fn(th, psi, w, quad);
      std::vector<double> a(xs.size());
      std::complex<double> mean{};
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto f = std::exp(std::complex<double>(0.0, th * xs[i])) - cf;
        a[i] = std::abs(f);
        mean += f;
      }
      finish(row, a, mean / static_cast<double>(xs.size()),
             [&](double x) { return 2.0 * std::abs(std::sin(0.5 * th * psi(x))); });
    }
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& r : table.rows)
    if (r.member != "constant") {
      lo = std::min(lo, r.ratio);
      hi = std::max(hi, r.ratio);
    }
  table.spread = hi > 0 ? hi / lo : 0.0;
  return table;
}

}  // namespace pcl
