#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pcl/errors.hpp"

namespace pcl {

// Finite integration domain. Every kernel-level integral in the library is
// taken over a Window, never over the whole line.
struct Window {
  double lo = 0.0;
  double hi = 1.0;

  Window() = default;
  Window(double lo_, double hi_) : lo(lo_), hi(hi_) {
    require(std::isfinite(lo) && std::isfinite(hi) && lo < hi,
            "window requires finite lo < hi");
  }

  bool operator==(const Window&) const = default;
  double length() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
  std::string describe() const;
};

struct QuadratureSpec {
  int panels = 16;
  double abs_tol = 1e-11;
  double tail_split = 8.0;
  int max_subdivisions = 50000;

  void validate() const;
};

// Composite Gauss-Legendre rule laid out on the same panel skeleton as
// integrate(). Used when one integrand family is evaluated many times
// (matrix-style contractions over frequency grids).
struct FixedRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }

  template <class F>
  auto apply(F&& f) const -> decltype(f(0.0)) {
    using R = decltype(f(0.0));
    R total{};
    for (std::size_t i = 0; i < nodes.size(); ++i) total += weights[i] * f(nodes[i]);
    return total;
  }
};

// Panel skeleton for [w.lo, w.hi]: breakpoints inside the window become panel
// edges, pieces within tail_split of an edge are split uniformly, and longer
// stretches are covered by panels whose width doubles away from the edges.
std::vector<double> panel_edges(const Window& w, const QuadratureSpec& q,
                                std::span<const double> breakpoints);

FixedRule make_fixed_rule(const Window& w, const QuadratureSpec& q,
                          std::span<const double> breakpoints, int points_per_panel = 20);

namespace detail {

using RealFn = std::function<double(double)>;
using ComplexFn = std::function<std::complex<double>(double)>;

double integrate_real(const RealFn& f, const Window& w, const QuadratureSpec& q,
                      std::span<const double> breakpoints);
std::complex<double> integrate_complex(const ComplexFn& f, const Window& w,
                                       const QuadratureSpec& q,
                                       std::span<const double> breakpoints);

}  // namespace detail

// Globally adaptive Gauss-Kronrod (21-point) quadrature over the panel
// skeleton. Stops when the summed error estimate is below q.abs_tol.
// Non-finite samples throw NumericalError naming the abscissa.
template <class F>
auto integrate(F&& f, const Window& w, const QuadratureSpec& q = {},
               std::span<const double> breakpoints = {}) {
  using R = std::decay_t<decltype(f(0.0))>;
  if constexpr (std::is_same_v<R, std::complex<double>>) {
    return detail::integrate_complex(detail::ComplexFn(std::forward<F>(f)), w, q, breakpoints);
  } else {
    return detail::integrate_real(detail::RealFn(std::forward<F>(f)), w, q, breakpoints);
  }
}

}  // namespace pcl
