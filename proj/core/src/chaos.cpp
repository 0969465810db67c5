#include "pcl/chaos.hpp"

#include <cmath>
#include <sstream>

namespace pcl {

double factorial(int n) {
  require(n >= 0 && n <= 170, "factorial argument out of range");
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return std::round(r);
}

cplx char_fn(double theta, const Kernel& spec, const Window& window, const QuadratureSpec& quad) {
  if (theta == 0.0) return {1.0, 0.0};
  const auto bps = spec.breakpoints();
  const cplx log_cf = integrate(
      [&](double x) {
        const double tp = theta * spec(x);
        // e^{i t} - 1 - i t, with the series near 0 to avoid cancellation.
        if (std::abs(tp) < 1e-4) {
          const double t2 = tp * tp;
          return cplx(-0.5 * t2 + t2 * t2 / 24.0, -t2 * tp / 6.0);
        }
        return cplx(std::cos(tp) - 1.0, std::sin(tp) - tp);
      },
      window, quad, bps);
  return std::exp(log_cf);
}

std::vector<cplx> elementary_symmetric(std::span<const cplx> values, int max_order) {
  require(max_order >= 0, "max_order must be non-negative");
  require(static_cast<std::size_t>(max_order) <= values.size(),
          "max_order exceeds the number of values");
  std::vector<cplx> e(static_cast<std::size_t>(max_order) + 1, cplx{});
  e[0] = 1.0;
  std::size_t seen = 0;
  for (const cplx& v : values) {
    ++seen;
    const std::size_t top = std::min<std::size_t>(seen, static_cast<std::size_t>(max_order));
    for (std::size_t k = top; k >= 1; --k) e[k] += v * e[k - 1];
  }
  return e;
}

TensorPowerKernel TensorPowerKernel::make(cplx coefficient, std::function<cplx(double)> base,
                                          int order, const Window& window,
                                          const QuadratureSpec& quad,
                                          std::span<const double> breakpoints) {
  require(order >= 0, "kernel order must be non-negative");
  TensorPowerKernel k;
  k.coefficient = coefficient;
  k.order = order;
  if (order > 0) k.base_integral = integrate(base, window, quad, breakpoints);
  k.base = std::move(base);
  return k;
}

std::vector<cplx> tensor_power_integrals(std::span<const cplx> g_at_points, cplx S, int max_order) {
  if (max_order > kMaxChaosOrder) {
    std::ostringstream os;
    os << "chaos order " << max_order << " exceeds the cap " << kMaxChaosOrder;
    throw ValidationError(os.str());
  }
  require(max_order >= 0, "chaos order must be non-negative");
  const int top = std::min<int>(max_order, static_cast<int>(g_at_points.size()));
  const auto e = elementary_symmetric(g_at_points, top);

  std::vector<cplx> s_pow(static_cast<std::size_t>(max_order) + 1);
  s_pow[0] = 1.0;
  for (int k = 1; k <= max_order; ++k) s_pow[k] = s_pow[k - 1] * S;

  std::vector<cplx> out(static_cast<std::size_t>(max_order) + 1);
  for (int n = 0; n <= max_order; ++n) {
    cplx acc{};
    double falling = 1.0;  // n! / (n-k)!
    for (int k = 0; k <= std::min(n, top); ++k) {
      if (k > 0) falling *= (n - k + 1);
      const double sign = ((n - k) % 2 == 0) ? 1.0 : -1.0;
      acc += sign * falling * e[k] * s_pow[n - k];
    }
    out[n] = acc;
  }
  return out;
}

cplx multiple_integral(const PointConfiguration& config, const TensorPowerKernel& kernel) {
  require(kernel.order <= kMaxChaosOrder, "chaos order exceeds the cap of 30");
  if (kernel.order == 0) return kernel.coefficient;
  std::vector<cplx> g;
  g.reserve(config.size());
  for (double x : config.points()) g.push_back(kernel.base(x));
  return kernel.coefficient * tensor_power_integrals(g, kernel.base_integral, kernel.order).back();
}

void TruncationRange::validate() const {
  require(lo >= 0, "truncation lower order must be non-negative");
  require(lo <= kMaxChaosOrder, "truncation order exceeds the cap of 30");
  if (!unbounded()) {
    require(hi >= lo, "truncation range requires m1 <= m2");
    require(hi <= kMaxChaosOrder, "truncation order exceeds the cap of 30");
  }
}

ExponentialChaos::ExponentialChaos(double theta, Kernel psi_u, const Window& window,
                                   const QuadratureSpec& quad)
    : theta_(theta),
      psi_(std::move(psi_u)),
      window_(window),
      quad_(quad),
      compensator_(windowed_integral(psi_, window, quad)),
      cf_(char_fn(theta, psi_, window, quad)) {
  const auto bps = psi_.breakpoints();
  S_ = theta == 0.0 ? cplx{} : integrate([this](double x) { return base(x); }, window_, quad_, bps);
}

TensorPowerKernel ExponentialChaos::kernel_of_order(int q) const {
  require(q >= 0 && q <= kMaxChaosOrder, "chaos order out of range");
  TensorPowerKernel k;
  k.coefficient = cf_ / factorial(q);
  k.order = q;
  k.base = [theta = theta_, psi = psi_](double x) {
    return std::exp(cplx(0.0, theta * psi(x))) - 1.0;
  };
  k.base_integral = S_;
  return k;
}

namespace {

std::span<const double> support_points(const PointConfiguration& config, const Kernel& psi) {
  const double u = static_cast<double>(psi.shift());
  return config.points_in(u + psi.support_lo(), u + psi.support_hi());
}

}  // namespace

cplx ExponentialChaos::value(const PointConfiguration& config) const {
  double sum = 0.0;
  for (double x : support_points(config, psi_)) sum += psi_(x);
  return std::exp(cplx(0.0, theta_ * (sum - compensator_)));
}

cplx ExponentialChaos::truncate(const PointConfiguration& config, TruncationRange range) const {
  range.validate();
  const int top = range.unbounded() ? range.lo - 1 : range.hi;
  if (range.unbounded() && range.lo == 0) return value(config);

  std::vector<cplx> g;
  for (double x : support_points(config, psi_)) g.push_back(base(x));
  const auto I = tensor_power_integrals(g, S_, top);

  cplx partial{};
  const int from = range.unbounded() ? 0 : range.lo;
  for (int q = from; q <= top; ++q) partial += cf_ / factorial(q) * I[q];
  return range.unbounded() ? value(config) - partial : partial;
}

cplx truncate_exponential(double theta, const Kernel& spec, TruncationRange range,
                          const PointConfiguration& config, const QuadratureSpec& quad) {
  return ExponentialChaos(theta, spec, config.window(), quad).truncate(config, range);
}

std::vector<double> windowed_cumulants(const Kernel& spec, const Window& window, int max_m,
                                       const QuadratureSpec& quad) {
  require(max_m >= 0, "cumulant order must be non-negative");
  std::vector<double> k(static_cast<std::size_t>(max_m) + 1, 0.0);
  const auto bps = spec.breakpoints();
  for (int m = 2; m <= max_m; ++m)
    k[m] = integrate([&](double x) { return std::pow(spec(x), m); }, window, quad, bps);
  return k;
}

std::vector<double> moments_from_cumulants(std::span<const double> cumulants) {
  const std::size_t n = cumulants.size();
  std::vector<double> m(n, 0.0);
  if (n == 0) return m;
  m[0] = 1.0;
  for (std::size_t j = 1; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t k = 1; k <= j; ++k)
      acc += binomial(static_cast<int>(j - 1), static_cast<int>(k - 1)) * cumulants[k] * m[j - k];
    m[j] = acc;
  }
  return m;
}

std::array<double, 4> shifted_mean_polynomial(const Polynomial& phi, std::span<const double> moments) {
  require(moments.size() >= 4, "need moments up to order 3");
  std::array<double, 4> p{0, 0, 0, 0};
  for (int k = 0; k <= 3; ++k)
    for (int r = 0; r <= k; ++r) p[r] += phi.coefficients[k] * binomial(k, r) * moments[k - r];
  return p;
}

TruncatedPhi::TruncatedPhi(const Nonlinearity& phi, int d, Kernel psi_u, const Window& window,
                           const ThetaGrid& grid, const QuadratureSpec& quad)
    : phi_(phi), d_(d), psi_(std::move(psi_u)) {
  require(d >= 0, "truncation order must be non-negative");
  if (const auto* poly = phi.polynomial_family()) {
    if (d > 2)
      throw ValidationError(
          "polynomial nonlinearity supports d <= 2; use a Fourier family (gauss, modgauss) for d >= 3");
    const auto kappa = windowed_cumulants(psi_, window, 3, quad);
    const auto m = moments_from_cumulants(kappa);
    shifted_mean_ = shifted_mean_polynomial(*poly, m);
    raw_integrals_ = kappa;
    raw_integrals_[1] = windowed_integral(psi_, window, quad);
    compensator_ = raw_integrals_[1];
    return;
  }
  require(d <= kMaxChaosOrder, "truncation order exceeds the cap of 30");
  compensator_ = windowed_integral(psi_, window, quad);
  weights_ = grid.weights;
  chaos_.reserve(grid.size());
  for (double t : grid.nodes) chaos_.emplace_back(t, psi_, window, quad);
}

double TruncatedPhi::mean() const {
  if (phi_.polynomial_family()) return shifted_mean_[0];
  cplx acc{};
  for (std::size_t k = 0; k < chaos_.size(); ++k) acc += weights_[k] * chaos_[k].cf();
  return acc.real();
}

double TruncatedPhi::operator()(const PointConfiguration& config, double* imag_residue) const {
  if (imag_residue) *imag_residue = 0.0;
  const double u = static_cast<double>(psi_.shift());
  const auto pts = config.points_in(u + psi_.support_lo(), u + psi_.support_hi());

  if (phi_.polynomial_family()) {
    double sum = 0.0;
    for (double x : pts) sum += psi_(x);
    const double X = sum - compensator_;
    double out = phi_(X);
    if (d_ >= 1) out -= shifted_mean_[0];
    if (d_ >= 2) {
      // I_1(h), h = sum_{r>=1} p_r psi^r.
      for (int r = 1; r <= 3; ++r) {
        if (shifted_mean_[r] == 0.0) continue;
        double s = 0.0;
        for (double x : pts) s += std::pow(psi_(x), r);
        out -= shifted_mean_[r] * (s - raw_integrals_[r]);
      }
    }
    return out;
  }

  cplx acc{};
  const auto range = TruncationRange::at_least(d_);
  for (std::size_t k = 0; k < chaos_.size(); ++k) acc += weights_[k] * chaos_[k].truncate(config, range);
  if (imag_residue) *imag_residue = acc.imag();
  return acc.real();
}

double truncate_phi(const Nonlinearity& phi, int d, const Kernel& spec,
                    const PointConfiguration& config, const ThetaGrid& grid,
                    const QuadratureSpec& quad, double* imag_residue) {
  return TruncatedPhi(phi, d, spec, config.window(), grid, quad)(config, imag_residue);
}

std::vector<double> chaos_kernel_norms(double theta, const Kernel& spec, const Window& window, int m,
                                       const QuadratureSpec& quad) {
  require(m >= 0 && m <= kMaxChaosOrder, "chaos order out of range");
  const cplx cf = char_fn(theta, spec, window, quad);
  const auto bps = spec.breakpoints();
  // |e^{i t} - 1|^2 = 4 sin^2(t/2)
  const double A = theta == 0.0 ? 0.0
                                : integrate(
                                      [&](double x) {
                                        const double s = std::sin(0.5 * theta * spec(x));
                                        return 4.0 * s * s;
                                      },
                                      window, quad, bps);
  std::vector<double> out(static_cast<std::size_t>(m) + 1);
  double term = std::norm(cf);
  for (int n = 0; n <= m; ++n) {
    if (n > 0) term *= A / n;
    out[n] = term;
  }
  return out;
}

}  // namespace pcl
