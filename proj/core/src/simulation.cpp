#include "pcl/simulation.hpp"

#include <atomic>
#include <boost/math/interpolators/cubic_hermite.hpp>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "pcl/chaos.hpp"
#include "pcl/rng.hpp"

namespace pcl {

namespace {

constexpr int kHTablePoints = 2049;

}  // namespace

PathSimulator::PathSimulator(const Kernel& psi, const Nonlinearity& phi, int d, long n,
                             const QuadratureSpec& quad, double theta_step)
    : psi_(psi.shifted(0)), phi_(phi), d_(d), n_(n) {
  require(n >= 1, "n must be >= 1");
  require(d >= 0 && d <= kMaxChaosOrder, "truncation order out of range");
  require(std::isfinite(psi_.support_lo()) && std::isfinite(psi_.support_hi()),
          "simulation needs a kernel with bounded support; cut it with effective_kernel");
  window_ = Window(psi_.support_lo(), static_cast<double>(n - 1) + psi_.support_hi());
  compensator_ = windowed_integral(psi_, window_, quad);

  if (const auto* poly = phi.polynomial_family()) {
    if (d > 2)
      throw ValidationError(
          "polynomial nonlinearity supports d <= 2; use a Fourier family (gauss, modgauss) for d >= 3");
    const auto kappa = windowed_cumulants(psi_, window_, 3, quad);
    const auto m = moments_from_cumulants(kappa);
    p_ = shifted_mean_polynomial(*poly, m);
    J_ = {window_.length(), compensator_, kappa[2], kappa[3]};
    phi_mean_ = p_[0];
    return;
  }

  grid_ = ThetaGrid::trapezoid(phi, theta_step);
  const auto bps = psi_.breakpoints();
  std::complex<double> mean{};
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    const double t = grid_.nodes[k];
    cf_.push_back(char_fn(t, psi_, window_, quad));
    S_.push_back(t == 0.0 ? std::complex<double>{}
                          : integrate(
                                [&](double x) { return std::exp(std::complex<double>(0.0, t * psi_(x))) - 1.0; },
                                window_, quad, bps));
    mean += grid_.weights[k] * cf_.back();
  }
  phi_mean_ = mean.real();

  if (d == 2) {
    // H(v) = E phi(X + v) - E phi(X), tabulated over the range of psi.
    double vmax = 0.0;
    if (const auto* p = std::get_if<PowerLaw>(&psi_.family())) vmax = p->scale;
    else vmax = 1.0;
    h_lo_ = 0.0;
    h_step_ = vmax / (kHTablePoints - 1);
    std::vector<double> xs, ys, dys;
    for (int i = 0; i < kHTablePoints; ++i) {
      const double v = h_lo_ + i * h_step_;
      std::complex<double> h{}, dh{};
      for (std::size_t k = 0; k < grid_.size(); ++k) {
        const double t = grid_.nodes[k];
        const auto e = std::exp(std::complex<double>(0.0, t * v));
        h += grid_.weights[k] * cf_[k] * (e - 1.0);
        dh += grid_.weights[k] * cf_[k] * std::complex<double>(0.0, t) * e;
      }
      xs.push_back(v);
      ys.push_back(h.real());
      dys.push_back(dh.real());
    }
    auto spline = std::make_shared<boost::math::interpolators::cubic_hermite<std::vector<double>>>(
        std::move(xs), std::move(ys), std::move(dys));
    h_interp_ = [spline](double v) { return (*spline)(v); };
    h_integral_ = integrate([&](double x) { return h_value(psi_(x)); }, window_, quad, bps);
  }
}

double PathSimulator::h_value(double v) const {
  if (v <= h_lo_) return 0.0;
  return h_interp_(std::min(v, h_lo_ + h_step_ * (kHTablePoints - 1)));
}

double PathSimulator::truncate_one(double X, std::span<const double> psi_values) const {
  if (d_ == 0) return phi_(X);
  if (phi_.polynomial_family()) {
    double out = phi_(X) - p_[0];
    if (d_ == 2) {
      for (int r = 1; r <= 3; ++r) {
        if (p_[r] == 0.0) continue;
        double s = 0.0;
        for (double v : psi_values) s += std::pow(v, r);
        out -= p_[r] * (s - J_[r]);
      }
    }
    return out;
  }
  if (d_ == 1) return phi_(X) - phi_mean_;
  if (d_ == 2) {
    double s = 0.0;
    for (double v : psi_values) s += h_value(v);
    return phi_(X) - phi_mean_ - (s - h_integral_);
  }
  // General order: subtract chaoses 0..d-1 frequency by frequency.
  std::complex<double> low{};
  std::vector<std::complex<double>> g(psi_values.size());
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    const double t = grid_.nodes[k];
    for (std::size_t j = 0; j < psi_values.size(); ++j)
      g[j] = std::exp(std::complex<double>(0.0, t * psi_values[j])) - 1.0;
    const auto I = tensor_power_integrals(g, S_[k], d_ - 1);
    std::complex<double> part{};
    for (int q = 0; q < d_; ++q) part += cf_[k] / factorial(q) * I[q];
    low += grid_.weights[k] * part;
  }
  return phi_(X) - low.real();
}

std::vector<double> PathSimulator::first_chaos_sequence(const PointConfiguration& config) const {
  const auto pts = config.points();
  std::vector<double> out(static_cast<std::size_t>(n_));
  std::size_t lo = 0, hi = 0;
  const double slo = psi_.support_lo(), shi = psi_.support_hi();
  for (long u = 0; u < n_; ++u) {
    const double a = u + slo, b = u + shi;
    while (lo < pts.size() && pts[lo] < a) ++lo;
    if (hi < lo) hi = lo;
    while (hi < pts.size() && pts[hi] <= b) ++hi;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += psi_(pts[i] - static_cast<double>(u));
    out[static_cast<std::size_t>(u)] = s - compensator_;
  }
  return out;
}

std::vector<double> PathSimulator::summands(const PointConfiguration& config) const {
  const auto pts = config.points();
  std::vector<double> out(static_cast<std::size_t>(n_));
  std::vector<double> vals;
  std::size_t lo = 0, hi = 0;
  const double slo = psi_.support_lo(), shi = psi_.support_hi();
  const bool need_values = d_ >= 2;
  for (long u = 0; u < n_; ++u) {
    const double a = u + slo, b = u + shi;
    while (lo < pts.size() && pts[lo] < a) ++lo;
    if (hi < lo) hi = lo;
    while (hi < pts.size() && pts[hi] <= b) ++hi;
    vals.clear();
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double v = psi_(pts[i] - static_cast<double>(u));
      s += v;
      if (need_values) vals.push_back(v);
    }
    out[static_cast<std::size_t>(u)] = truncate_one(s - compensator_, vals);
  }
  return out;
}

std::vector<double> PathSimulator::summands(std::uint64_t seed) const {
  return summands(sample_configuration(window_, seed));
}

long floor_index(long n, double t) {
  const double x = static_cast<double>(n) * t;
  const double r = std::round(x);
  if (std::abs(x - r) < 1e-9 * std::max(1.0, std::abs(x))) return static_cast<long>(r);
  return static_cast<long>(std::floor(x));
}

std::vector<double> partial_path(std::span<const double> summands, long n, std::span<const double> times) {
  require(static_cast<long>(summands.size()) >= n, "path needs n summands");
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) {
    require(t >= 0.0 && t <= 1.0, "path times must lie in [0,1]");
    const long m = floor_index(n, t);
    double s = 0.0;
    for (long u = 0; u < m; ++u) s += summands[static_cast<std::size_t>(u)];
    out.push_back(scale * s);
  }
  return out;
}

std::vector<double> interpolated_path(std::span<const double> summands, long n,
                                      std::span<const double> times) {
  auto y = partial_path(summands, n, times);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < times.size(); ++i) {
    const long m = floor_index(n, times[i]);
    const double frac = static_cast<double>(n) * times[i] - static_cast<double>(m);
    if (m < n && frac > 0.0) y[i] += frac * scale * summands[static_cast<std::size_t>(m)];
  }
  return y;
}

double fdd_value(std::span<const double> summands, long n, std::span<const double> b,
                 std::span<const double> t) {
  require(b.size() == t.size() && !b.empty(), "fdd coefficients and times must pair up");
  const auto y = partial_path(summands, n, t);
  double s = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) s += b[j] * y[j];
  return s;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PCL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min<long>(v, 256));
  }
  return 1;
}

void parallel_for(long count, int threads, const std::function<void(long)>& body) {
  threads = std::max(1, std::min<int>(threads, static_cast<int>(std::max(1L, count))));
  if (threads == 1) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (long i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace pcl
