#include "pcl/process.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "pcl/rng.hpp"

namespace pcl {

PointConfiguration::PointConfiguration(Window window, std::vector<double> points)
    : window_(window), points_(std::move(points)) {
  std::sort(points_.begin(), points_.end());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    require(std::isfinite(points_[i]), "configuration points must be finite");
    require(window_.contains(points_[i]), "configuration point outside its window");
    require(i == 0 || points_[i] > points_[i - 1], "configuration has duplicate points");
  }
}

std::span<const double> PointConfiguration::points_in(double lo, double hi) const {
  const auto first = std::lower_bound(points_.begin(), points_.end(), lo);
  const auto last = std::upper_bound(first, points_.end(), hi);
  return {first, last};
}

PointConfiguration PointConfiguration::with_points(std::span<const double> extra) const {
  PointConfiguration out;
  out.window_ = window_;
  out.points_.reserve(points_.size() + extra.size());
  std::vector<double> add(extra.begin(), extra.end());
  std::sort(add.begin(), add.end());
  for (std::size_t i = 0; i < add.size(); ++i) {
    require(std::isfinite(add[i]), "inserted point must be finite");
    require(i == 0 || add[i] > add[i - 1], "inserted points must be distinct");
    require(!std::binary_search(points_.begin(), points_.end(), add[i]),
            "inserted point collides with an existing point");
  }
  std::merge(points_.begin(), points_.end(), add.begin(), add.end(),
             std::back_inserter(out.points_));
  return out;
}

PointConfiguration sample_configuration(const Window& window, std::uint64_t seed) {
  auto engine = make_engine(seed);
  std::poisson_distribution<long long> count(window.length());
  std::uniform_real_distribution<double> uniform(window.lo, window.hi);
  const long long n = count(engine);
  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) pts.push_back(uniform(engine));
  std::sort(pts.begin(), pts.end());
  // Ties have probability zero; drop any that floating point produces.
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return PointConfiguration(window, std::move(pts));
}

double windowed_integral(const Kernel& psi_u, const Window& window, const QuadratureSpec& quad) {
  const double u = static_cast<double>(psi_u.shift());
  const double lo = u + psi_u.support_lo();
  const double hi = u + psi_u.support_hi();
  if (window.lo <= lo && hi <= window.hi && std::isfinite(psi_u.l1_norm())) return psi_u.l1_norm();
  return integrate([&](double x) { return psi_u(x); }, window, quad, psi_u.breakpoints());
}

FirstChaos::FirstChaos(Kernel psi_u, const Window& window, const QuadratureSpec& quad)
    : psi_(std::move(psi_u)),
      lo_(std::max(window.lo, static_cast<double>(psi_.shift()) + psi_.support_lo())),
      hi_(std::min(window.hi, static_cast<double>(psi_.shift()) + psi_.support_hi())),
      compensator_(windowed_integral(psi_, window, quad)) {}

double FirstChaos::operator()(const PointConfiguration& config) const {
  double sum = 0.0;
  for (double x : config.points_in(lo_, hi_)) sum += psi_(x);
  return sum - compensator_;
}

double first_chaos(const PointConfiguration& config, const Kernel& spec, const QuadratureSpec& quad) {
  return FirstChaos(spec, config.window(), quad)(config);
}

std::complex<double> apply_difference(const Functional& functional,
                                      const PointConfiguration& config,
                                      std::span<const double> xs) {
  const std::size_t n = xs.size();
  require(n >= 1, "apply_difference needs at least one insertion point");
  if (n > kMaxDifferenceOrder) {
    std::ostringstream os;
    os << "apply_difference order " << n << " exceeds the cap " << kMaxDifferenceOrder
       << "; use the closed-form chaos identities for higher orders";
    throw ValidationError(os.str());
  }
  // Validates collisions once for the full insertion set.
  (void)config.with_points(xs);

  std::complex<double> total{};
  std::vector<double> subset;
  subset.reserve(n);
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    subset.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (mask & (std::size_t{1} << j)) subset.push_back(xs[j]);
    const double sign = ((n - subset.size()) % 2 == 0) ? 1.0 : -1.0;
    total += sign * functional(subset.empty() ? config : config.with_points(subset));
  }
  return total;
}

}  // namespace pcl
