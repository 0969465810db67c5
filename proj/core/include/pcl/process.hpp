#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pcl/kernels.hpp"
#include "pcl/quadrature.hpp"

namespace pcl {

// A realisation of the unit-intensity Poisson process restricted to a window.
// Points are kept sorted and distinct.
class PointConfiguration {
 public:
  PointConfiguration() = default;
  PointConfiguration(Window window, std::vector<double> points);

  const Window& window() const { return window_; }
  std::span<const double> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  // Points in [lo, hi].
  std::span<const double> points_in(double lo, double hi) const;

  // A new configuration with the extra points inserted. Extra points may lie
  // outside the window (difference operators act on the whole line); a
  // collision with an existing point is rejected.
  PointConfiguration with_points(std::span<const double> extra) const;

  bool operator==(const PointConfiguration&) const = default;

 private:
  Window window_;
  std::vector<double> points_;
};

// N ~ Poisson(window length), points iid uniform on the window, sorted.
PointConfiguration sample_configuration(const Window& window, std::uint64_t seed);

using Functional = std::function<std::complex<double>(const PointConfiguration&)>;

// Compensated linear statistic X_u = sum_x psi_u(x) - int_W psi_u.
class FirstChaos {
 public:
  FirstChaos(Kernel psi_u, const Window& window, const QuadratureSpec& quad = {});

  double operator()(const PointConfiguration& config) const;
  double compensator() const { return compensator_; }
  const Kernel& kernel() const { return psi_; }

 private:
  Kernel psi_;
  double lo_;
  double hi_;
  double compensator_;
};

// int_W psi_u over the window; exact when the support fits inside.
double windowed_integral(const Kernel& psi_u, const Window& window, const QuadratureSpec& quad = {});

double first_chaos(const PointConfiguration& config, const Kernel& spec,
                   const QuadratureSpec& quad = {});

inline constexpr std::size_t kMaxDifferenceOrder = 8;

// D^n_{x_1..x_n} F by inclusion-exclusion over the 2^n insertion subsets.
std::complex<double> apply_difference(const Functional& functional,
                                      const PointConfiguration& config,
                                      std::span<const double> xs);

}  // namespace pcl
