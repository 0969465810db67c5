#pragma once

#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pcl/quadrature.hpp"

namespace pcl {

// scale * (1 + |x|)^(-alpha), optionally cut to |x| <= cutoff.
struct PowerLaw {
  double alpha = 2.0;
  double scale = 1.0;
  double cutoff = std::numeric_limits<double>::infinity();
};

// 1 on [lo, hi), 0 elsewhere.
struct Indicator {
  double lo = 0.0;
  double hi = 1.0;
};

// exp(1 - 1/(1 - r^2)) with r = (x - center)/halfwidth; peak value 1.
struct CompactBump {
  double center = 0.0;
  double halfwidth = 1.0;
};

using KernelFamily = std::variant<PowerLaw, Indicator, CompactBump>;

// The kernel psi together with its integer shift u; evaluates psi_u(x) = psi(x - u).
class Kernel {
 public:
  explicit Kernel(KernelFamily family, long shift = 0);

  static Kernel power_law(double alpha, double scale = 1.0,
                          double cutoff = std::numeric_limits<double>::infinity());
  static Kernel indicator(double lo, double hi);
  static Kernel compact_bump(double center, double halfwidth);

  // Parses "powerlaw:alpha[,scale[,cutoff]]", "indicator:lo,hi", "bump:center,halfwidth".
  static Kernel parse(const std::string& text);

  double operator()(double x) const {
    const double y = x - static_cast<double>(shift_);
    if (const auto* p = std::get_if<PowerLaw>(&family_)) return eval_power_law(*p, y);
    if (const auto* i = std::get_if<Indicator>(&family_)) return (y >= i->lo && y < i->hi) ? 1.0 : 0.0;
    return eval_bump(std::get<CompactBump>(family_), y);
  }

  Kernel shifted(long u) const { return Kernel(family_, u); }
  long shift() const { return shift_; }
  const KernelFamily& family() const { return family_; }
  bool is_power_law() const { return std::holds_alternative<PowerLaw>(family_); }

  // Decay exponent for the envelope bound; +inf for compactly supported kernels.
  double decay_exponent() const;

  // Support of the unshifted kernel; infinite ends for an uncut power law.
  double support_lo() const;
  double support_hi() const;

  // Points (already shifted) where psi_u is non-smooth: cusps, jumps, support edges.
  std::vector<double> breakpoints() const;

  // Same kernel with a cutoff radius; only changes an uncut power law.
  Kernel truncated(double radius) const;

  // Closed-form integral of psi over the real line and of psi^2, when finite.
  double l1_norm() const;
  double l2_norm_squared() const;

  std::string describe() const;

 private:
  static double eval_power_law(const PowerLaw& p, double y);
  static double eval_bump(const CompactBump& b, double y);

  KernelFamily family_;
  long shift_ = 0;
};

inline double eval_kernel(const Kernel& spec, double x) { return spec(x); }

// (1 + |x - u|)^(-beta), beta > 0.
double envelope(double beta, long u, double x);

enum class Norm { L1, Linf };

// || Psi_{gamma,i} Psi_{gamma,j} || in L1 or Linf over the real line.
// gamma = 1 is rejected.
double envelope_inner(double gamma, long i, long j, Norm norm);

// Integral over the real line of prod_k Psi_{beta,u_k}; requires
// beta * us.size() > 1. Power-law tails beyond the outermost shift are
// integrated with the closed-form antiderivative.
double envelope_product_integral(double beta, std::span<const long> us,
                                 const QuadratureSpec& quad = {});

// floor(1 / (2 alpha - 1)) + 1, alpha > 1/2.
int d_alpha(double alpha);

// Window [u_min - L, u_max + L] such that the squared-L2 mass of every psi_u
// (u in [u_min, u_max]) outside it is at most tail_fraction of its total.
Window covering_window(const Kernel& psi, long u_min, long u_max, double tail_fraction = 1e-6);

// Radius L with 2 * int_L^inf psi^2 <= tail_fraction * int psi^2 (power law),
// or the support radius for compact kernels.
double tail_radius(const Kernel& psi, double tail_fraction);

// The kernel actually used by simulations and series: an uncut power law is
// cut at an integer radius carrying all but tail_fraction of its squared L2
// mass, never beyond max_radius.
struct KernelModel {
  Kernel psi;
  double radius;
  double tail_fraction;  // achieved neglected fraction of int psi^2
};

KernelModel effective_kernel(const Kernel& psi, double tail_fraction = 1e-6, double max_radius = 1e4);

}  // namespace pcl
