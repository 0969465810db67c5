#include "pcl/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "pcl/chaos.hpp"
#include "pcl/rng.hpp"
#include "pcl/simulation.hpp"
#include "pcl/stats.hpp"

namespace pcl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> merged_breakpoints(const Kernel& a, const Kernel& b) {
  auto out = a.breakpoints();
  const auto more = b.breakpoints();
  out.insert(out.end(), more.begin(), more.end());
  return out;
}

// Intersection of the supports of psi_0 and psi_u with the window; false if empty.
bool overlap(const Kernel& psi, long u, const Window& w, double& lo, double& hi) {
  lo = std::max({w.lo, psi.support_lo(), static_cast<double>(u) + psi.support_lo()});
  hi = std::min({w.hi, psi.support_hi(), static_cast<double>(u) + psi.support_hi()});
  return lo < hi;
}

bool bounded(const Kernel& psi) {
  return std::isfinite(psi.support_lo()) && std::isfinite(psi.support_hi());
}

}  // namespace

void CovarianceQuery::validate() const {
  require(d >= 0, "truncation order d must be >= 0");
  require(std::isfinite(theta1) && std::isfinite(theta2), "frequencies must be finite");
  quad.validate();
}

cplx pair_integral(const CovarianceQuery& q) {
  q.validate();
  if (q.theta1 == 0.0 || q.theta2 == 0.0) return {};
  const Kernel p0 = q.spec.shifted(0);
  const Kernel pu = q.spec.shifted(q.u);
  double lo, hi;
  if (!overlap(q.spec, q.u, q.window, lo, hi)) return {};
  const auto bps = merged_breakpoints(p0, pu);
  return integrate(
      [&](double x) {
        return (std::exp(cplx(0.0, q.theta1 * p0(x))) - 1.0) * (std::exp(cplx(0.0, q.theta2 * pu(x))) - 1.0);
      },
      Window(lo, hi), q.quad, bps);
}

cplx exp_remainder(cplx z, int d) {
  require(d >= 0, "remainder order must be >= 0");
  if (d == 0) return std::exp(z);
  if (std::abs(z) < 0.5) {
    // Tail of the series directly: the closed form cancels catastrophically here.
    cplx term = 1.0;
    for (int k = 1; k <= d; ++k) term *= z / static_cast<double>(k);
    cplx sum = term;
    for (int k = d + 1; k < d + 60; ++k) {
      term *= z / static_cast<double>(k);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  cplx partial{}, term = 1.0;
  for (int k = 0; k < d; ++k) {
    if (k > 0) term *= z / static_cast<double>(k);
    partial += term;
  }
  return std::exp(z) - partial;
}

cplx cov_truncated_exponential(const CovarianceQuery& q) {
  q.validate();
  const cplx G = pair_integral(q);
  const cplx cf1 = char_fn(q.theta1, q.spec.shifted(0), q.window, q.quad);
  const cplx cf2 = char_fn(q.theta2, q.spec.shifted(q.u), q.window, q.quad);
  return cf1 * cf2 * exp_remainder(G, q.d);
}

cplx cov_truncated_exponential_hermitian(const CovarianceQuery& q) {
  // conj(T e^{i t X}) = T e^{-i t X} for real psi.
  CovarianceQuery flipped = q;
  flipped.theta2 = -q.theta2;
  return cov_truncated_exponential(flipped);
}

Window spectral_window(const Kernel& psi, long shift_cutoff) {
  require(shift_cutoff >= 0, "shift cutoff must be >= 0");
  require(bounded(psi), "spectral series need a kernel with bounded support; cut it with effective_kernel");
  return Window(-static_cast<double>(shift_cutoff) + psi.support_lo(),
                static_cast<double>(shift_cutoff) + psi.support_hi());
}

SeriesValue rho_k(double theta1, double theta2, int k, const Kernel& spec, const Window& window,
                  long shift_cutoff, const QuadratureSpec& quad) {
  require(k >= 1, "rho_k requires k >= 1");
  require(shift_cutoff >= 0, "shift cutoff must be >= 0");
  SeriesValue out{{}, 0.0};
  if (theta1 == 0.0 || theta2 == 0.0) return out;
  const cplx cf = char_fn(theta1, spec.shifted(0), window, quad) * char_fn(theta2, spec.shifted(0), window, quad);
  CovarianceQuery q{theta1, theta2, 0, 1, spec, window, quad};
  for (long u = -shift_cutoff; u <= shift_cutoff; ++u) {
    q.u = u;
    out.value += cf * std::pow(pair_integral(q), k);
  }

  const double width = spec.support_hi() - spec.support_lo();
  if (std::isfinite(width) && static_cast<double>(shift_cutoff) >= width) return out;
  if (const auto* p = std::get_if<PowerLaw>(&spec.family())) {
    // |G_u| <= |theta1 theta2| scale^2 ||Psi_0 Psi_u||_1 <= C (1+|u|)^e with
    // e = (1-2a) v (-a); C is fitted once on a fixed shift ladder.
    const double a = p->alpha;
    const double e = std::max(1.0 - 2.0 * a, -a);
    double C = 0.0;
    for (long v : {1L, 4L, 16L, 64L, 256L, 1024L})
      C = std::max(C, envelope_inner(a, 0, v, Norm::L1) / std::pow(1.0 + v, e));
    const double base = std::abs(theta1 * theta2) * p->scale * p->scale * C;
    const double expo = k * e;
    if (expo >= -1.0) {
      out.tail_bound = kInf;
    } else {
      out.tail_bound = 2.0 * std::pow(base, k) * std::pow(1.0 + shift_cutoff, expo + 1.0) / (-expo - 1.0);
    }
    return out;
  }
  // Compact kernel with a cutoff shorter than its support: the remaining
  // shifts are finitely many, sum them exactly.
  const long far = static_cast<long>(std::ceil(width));
  for (long u = shift_cutoff + 1; u <= far; ++u)
    for (long s : {u, -u}) {
      q.u = s;
      out.tail_bound += std::abs(cf * std::pow(pair_integral(q), k));
    }
  return out;
}

MuMethod parse_mu_method(const std::string& name) {
  if (name == "chaos_series") return MuMethod::ChaosSeries;
  if (name == "covariance_series") return MuMethod::CovarianceSeries;
  if (name == "monte_carlo") return MuMethod::MonteCarlo;
  throw ValidationError("unknown method '" + name + "' (chaos_series, covariance_series, monte_carlo)");
}

std::string to_string(MuMethod m) {
  switch (m) {
    case MuMethod::ChaosSeries: return "chaos_series";
    case MuMethod::CovarianceSeries: return "covariance_series";
    case MuMethod::MonteCarlo: return "monte_carlo";
  }
  return "unknown";
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), "slope fit needs paired data");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0) || !(x[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    ++m;
  }
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  const double den = m * sxx - sx * sx;
  return (m * sxy - sx * sy) / den;
}

namespace {

// ---------------------------------------------------------------------------
// Polynomial nonlinearities: everything reduces to M_{a,b}(u) = int psi_0^a psi_u^b.

struct PolyData {
  std::array<double, 4> p{};       // E phi(X + v) = sum p_r v^r
  std::array<double, 4> kappa{};   // cumulants of X (kappa_1 = 0)
  int degree = 0;
};

PolyData poly_data(const Polynomial& poly, const Kernel& psi, const Window& w, const QuadratureSpec& q) {
  PolyData out;
  const auto k = windowed_cumulants(psi, w, 3, q);
  const auto m = moments_from_cumulants(k);
  out.p = shifted_mean_polynomial(poly, m);
  for (int i = 0; i < 4; ++i) out.kappa[i] = k[i];
  out.degree = poly.degree();
  return out;
}

using PairMoments = std::array<std::array<double, 4>, 4>;

// Covariance route: joint moments from joint cumulants, minus the low chaoses.
double poly_cov_moments(const PolyData& pd, const Polynomial& poly, int d, const PairMoments& M) {
  // Joint cumulant of (X_0, X_u) of order (a, b): int psi_0^a psi_u^b for
  // a + b >= 2; the marginal ones equal the windowed cumulants of X.
  auto kappa = [&](int a, int b) {
    if (a + b < 2) return 0.0;
    if (b == 0) return pd.kappa[a];
    if (a == 0) return pd.kappa[b];
    return M[a][b];
  };
  double mom[4][4] = {};
  mom[0][0] = 1.0;
  for (int b = 1; b <= 3; ++b) {
    double s = 0.0;
    for (int j = 0; j < b; ++j) s += binomial(b - 1, j) * kappa(0, j + 1) * mom[0][b - 1 - j];
    mom[0][b] = s;
  }
  for (int a = 1; a <= 3; ++a)
    for (int b = 0; b <= 3; ++b) {
      double s = 0.0;
      for (int i = 0; i < a; ++i)
        for (int j = 0; j <= b; ++j)
          s += binomial(a - 1, i) * binomial(b, j) * kappa(i + 1, j) * mom[a - 1 - i][b - j];
      mom[a][b] = s;
    }
  const auto& c = poly.coefficients;
  double e_prod = 0.0;
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; b <= 3; ++b) e_prod += c[a] * c[b] * mom[a][b];
  double cov = e_prod - pd.p[0] * pd.p[0];
  if (d >= 2)
    for (int r = 1; r <= 3; ++r)
      for (int s = 1; s <= 3; ++s) cov -= pd.p[r] * pd.p[s] * M[r][s];
  return cov;
}

// Chaos route: q! <f_q, f_q'> with f_q = (1/q!) sum_e c_e prod_j psi(x_j)^{e_j}.
double poly_cov_chaos(const PolyData& pd, int d, const PairMoments& M) {
  double cov = 0.0;
  for (int q = std::max(d, 1); q <= pd.degree; ++q) {
    // Compositions e of r (q <= r <= degree) into q positive parts.
    std::vector<std::pair<std::vector<int>, double>> terms;
    std::vector<int> e(static_cast<std::size_t>(q), 1);
    for (;;) {
      int r = 0;
      double multinom = 1.0;
      for (int x : e) r += x;
      if (r <= pd.degree) {
        multinom = factorial(r);
        for (int x : e) multinom /= factorial(x);
        terms.push_back({e, pd.p[r] * multinom});
      }
      int i = 0;
      while (i < q && ++e[i] > 3) e[i++] = 1;
      if (i == q) break;
    }
    double s = 0.0;
    for (const auto& [e1, c1] : terms)
      for (const auto& [e2, c2] : terms) {
        double prod = c1 * c2;
        for (int j = 0; j < q; ++j) prod *= M[e1[j]][e2[j]];
        s += prod;
      }
    cov += s / factorial(q);
  }
  return cov;
}

PairMoments pair_moments_adaptive(const Kernel& psi, long u, const Window& w, const QuadratureSpec& q) {
  PairMoments M{};
  double lo, hi;
  if (!overlap(psi, u, w, lo, hi)) return M;
  const Kernel p0 = psi.shifted(0), pu = psi.shifted(u);
  const auto bps = merged_breakpoints(p0, pu);
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b)
      M[a][b] = integrate([&](double x) { return std::pow(p0(x), a) * std::pow(pu(x), b); },
                          Window(lo, hi), q, bps);
  return M;
}

PairMoments pair_moments_fixed(const Kernel& psi, long u, const Window& w, const QuadratureSpec& q) {
  PairMoments M{};
  double lo, hi;
  if (!overlap(psi, u, w, lo, hi)) return M;
  const Kernel p0 = psi.shifted(0), pu = psi.shifted(u);
  const auto rule = make_fixed_rule(Window(lo, hi), q, merged_breakpoints(p0, pu));
  for (std::size_t n = 0; n < rule.size(); ++n) {
    const double x = rule.nodes[n], w0 = rule.weights[n];
    const double a1 = p0(x), b1 = pu(x);
    double pa = 1.0;
    for (int a = 1; a <= 3; ++a) {
      pa *= a1;
      double pb = 1.0;
      for (int b = 1; b <= 3; ++b) {
        pb *= b1;
        M[a][b] += w0 * pa * pb;
      }
    }
  }
  return M;
}

// ---------------------------------------------------------------------------
// Fourier families.

using CMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;

// cov_u for u = 0..cutoff by the chaos route: per shift, G_u on a trapezoid
// frequency grid from one fixed composite rule, G = A diag(w) B^T, then the
// closed-form k-sum exp(G) - partial.
std::vector<cplx> fourier_cov_chaos(const Nonlinearity& phi, int d, const Kernel& psi, const Window& w,
                                    long cutoff, const MuSquaredOptions& o) {
  const auto grid = ThetaGrid::trapezoid(phi, o.theta_step);
  const std::size_t m = grid.size();
  Eigen::VectorXcd a(m);
  for (std::size_t i = 0; i < m; ++i) a(i) = grid.weights[i] * char_fn(grid.nodes[i], psi.shifted(0), w, o.quad);

  std::vector<cplx> out(static_cast<std::size_t>(cutoff) + 1);
  const Kernel p0 = psi.shifted(0);
  for (long u = 0; u <= cutoff; ++u) {
    double lo, hi;
    if (!overlap(psi, u, w, lo, hi)) continue;
    const Kernel pu = psi.shifted(u);
    const auto rule = make_fixed_rule(Window(lo, hi), o.quad, merged_breakpoints(p0, pu));
    const std::size_t N = rule.size();
    CMatrix A(m, N), B(m, N);
    for (std::size_t n = 0; n < N; ++n) {
      const double x = rule.nodes[n];
      const double v0 = p0(x), vu = pu(x);
      for (std::size_t i = 0; i < m; ++i) {
        const double t = grid.nodes[i];
        A(i, n) = rule.weights[n] * (std::exp(cplx(0.0, t * v0)) - 1.0);
        B(i, n) = std::exp(cplx(0.0, t * vu)) - 1.0;
      }
    }
    const CMatrix G = A * B.transpose();
    cplx s{};
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) s += a(i) * a(j) * exp_remainder(G(i, j), d);
    out[static_cast<std::size_t>(u)] = s;
  }
  return out;
}

// cov_u by the covariance route: Gauss-Hermite frequency nodes, one adaptive
// pair integral per node pair.
std::vector<cplx> fourier_cov_pairs(const Nonlinearity& phi, int d, const Kernel& psi, const Window& w,
                                    long cutoff, const MuSquaredOptions& o) {
  require(o.hermite_points % 2 == 0, "Gauss-Hermite order must be even");
  auto grid = ThetaGrid::gauss_hermite(phi, o.hermite_points);
  const std::size_t m = grid.size();
  // Enforce exact mirror symmetry so conjugate pairs cancel in the imaginary part.
  for (std::size_t i = 0; i < m / 2; ++i) {
    const std::size_t j = m - 1 - i;
    const double t = 0.5 * (grid.nodes[j] - grid.nodes[i]);
    const double wt = 0.5 * (grid.weights[i] + grid.weights[j]);
    grid.nodes[i] = -t; grid.nodes[j] = t;
    grid.weights[i] = grid.weights[j] = wt;
  }

  std::vector<cplx> cf(m);
  for (std::size_t i = 0; i < m; ++i) cf[i] = char_fn(grid.nodes[i], psi.shifted(0), w, o.quad);

  std::vector<cplx> out(static_cast<std::size_t>(cutoff) + 1);
  CovarianceQuery q{0.0, 0.0, 0, d, psi, w, o.quad};
  for (long u = 0; u <= cutoff; ++u) {
    double lo, hi;
    if (!overlap(psi, u, w, lo, hi)) continue;
    q.u = u;
    // Pairs (i, j) and (m-1-i, m-1-j) are complex conjugates, so the lower
    // half of the rows carries the whole real part.
    double s = 0.0;
    for (std::size_t i = 0; i < m / 2; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        q.theta1 = grid.nodes[i];
        q.theta2 = grid.nodes[j];
        const cplx c = cf[i] * cf[j] * exp_remainder(pair_integral(q), d);
        s += 2.0 * grid.weights[i] * grid.weights[j] * c.real();
      }
    out[static_cast<std::size_t>(u)] = s;
  }
  return out;
}

double tail_from_table(const std::vector<double>& cov) {
  // Fit |cov_u| ~ C u^s on the upper half of the table and integrate past it.
  const long c = static_cast<long>(cov.size()) - 1;
  if (c < 8) return 0.0;
  std::vector<double> xs, ys;
  for (long u = c / 2; u <= c; ++u) {
    xs.push_back(static_cast<double>(u));
    ys.push_back(std::abs(cov[static_cast<std::size_t>(u)]));
  }
  if (std::all_of(ys.begin(), ys.end(), [](double v) { return v == 0.0; })) return 0.0;
  if (ys.back() == 0.0) return 0.0;  // bounded-support kernel: exactly zero beyond
  const double s = loglog_slope(xs, ys);
  if (!(s < -1.0)) return kInf;
  const double C = ys.back() / std::pow(static_cast<double>(c), s);
  const double sign = cov.back() < 0 ? -1.0 : 1.0;
  return sign * 2.0 * C * std::pow(c + 0.5, s + 1.0) / (-s - 1.0);
}

}  // namespace

namespace {

MuSquaredResult mu_squared_unguarded(const Nonlinearity& phi, int d, const Kernel& spec, const Window& window,
                                     MuMethod method, const MuSquaredOptions& o) {
  require(d >= 1, "mu_squared requires d >= 1");
  require(bounded(spec), "mu_squared needs a kernel with bounded support; cut it with effective_kernel");
  require(o.shift_cutoff >= 0, "shift cutoff must be >= 0");
  const auto* poly = phi.polynomial_family();
  if (poly && d > 2)
    throw ValidationError(
        "polynomial nonlinearity supports d <= 2; use a Fourier family (gauss, modgauss) for d >= 3");
  MuSquaredResult r;
  r.method = method;

  if (method == MuMethod::MonteCarlo) {
    const PathSimulator sim(spec, phi, d, o.n, o.quad, o.theta_step);
    const int threads = resolve_threads(o.threads);
    std::vector<double> y(static_cast<std::size_t>(o.reps));
    const double one[1] = {1.0};
    parallel_for(o.reps, threads, [&](long i) {
      const auto s = sim.summands(derive_seed(o.seed, stream::kReplication, static_cast<std::uint64_t>(i)));
      y[static_cast<std::size_t>(i)] = partial_path(s, o.n, one)[0];
    });
    const auto st = describe_sample(y);
    r.value = st.variance;
    r.std_error = st.variance_se;
    return r;
  }

  const Kernel psi = spec.shifted(0);
  const long c = o.shift_cutoff;
  std::vector<double> cov(static_cast<std::size_t>(c) + 1, 0.0);
  double imag = 0.0;
  if (poly) {
    const PolyData pd = poly_data(*poly, psi, window, o.quad);
    for (long u = 0; u <= c; ++u) {
      double lo, hi;
      if (!overlap(psi, u, window, lo, hi)) continue;
      cov[static_cast<std::size_t>(u)] =
          method == MuMethod::ChaosSeries
              ? poly_cov_chaos(pd, d, pair_moments_fixed(psi, u, window, o.quad))
              : poly_cov_moments(pd, *poly, d, pair_moments_adaptive(psi, u, window, o.quad));
    }
  } else {
    const auto z = method == MuMethod::ChaosSeries ? fourier_cov_chaos(phi, d, psi, window, c, o)
                                                   : fourier_cov_pairs(phi, d, psi, window, c, o);
    for (long u = 0; u <= c; ++u) {
      cov[static_cast<std::size_t>(u)] = z[static_cast<std::size_t>(u)].real();
      imag = std::max(imag, std::abs(z[static_cast<std::size_t>(u)].imag()));
    }
  }
  // Stationarity: cov_{-u} = cov_u.
  double total = cov[0];
  for (long u = 1; u <= c; ++u) total += 2.0 * cov[static_cast<std::size_t>(u)];
  r.value = total;
  r.imag_residue = imag;
  r.tail_estimate = tail_from_table(cov);
  r.cov_by_shift = std::move(cov);
  return r;
}

}  // namespace

MuSquaredResult mu_squared(const Nonlinearity& phi, int d, const Kernel& spec, const Window& window,
                           MuMethod method, const MuSquaredOptions& o) {
  auto r = mu_squared_unguarded(phi, d, spec, window, method, o);
  if (!std::isfinite(r.value) || !std::isfinite(r.std_error))
    throw NumericalError("mu^2 (" + to_string(method) + ") is not finite");
  return r;
}

DecayTable cov_phi_decay(const Nonlinearity& phi, int d, const Kernel& spec, long u_max,
                         const MuSquaredOptions& options) {
  require(u_max >= 10, "cov_phi_decay requires u_max >= 10");
  require(d >= 1, "cov_phi_decay requires d >= 1");
  Kernel psi = spec.shifted(0);
  if (!bounded(psi)) {
    // Cut far beyond the shifts probed so the cut does not bend the decay.
    const double radius = std::max(tail_radius(psi, 1e-6), 100.0 * static_cast<double>(u_max));
    psi = psi.truncated(std::min(radius, 1e6));
  }
  const Window w = spectral_window(psi, u_max);
  MuSquaredOptions o = options;
  o.shift_cutoff = u_max;
  const auto mu = mu_squared(phi, d, psi, w, MuMethod::CovarianceSeries, o);

  DecayTable t;
  t.fit_hi = u_max;
  std::vector<double> xs, ys;
  for (long u = 0; u <= u_max; ++u) {
    t.shifts.push_back(u);
    t.abs_cov.push_back(std::abs(mu.cov_by_shift[static_cast<std::size_t>(u)]));
    if (u >= t.fit_lo) {
      xs.push_back(static_cast<double>(u));
      ys.push_back(t.abs_cov.back());
    }
  }
  t.slope = loglog_slope(xs, ys);
  return t;
}

}  // namespace pcl
