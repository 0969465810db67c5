#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "pcl/kernels.hpp"
#include "pcl/partition.hpp"
#include "pcl/process.hpp"
#include "pcl/quadrature.hpp"

namespace pcl {

using cplx = std::complex<double>;

// coefficient * f_1 (x) ... (x) f_a: one integrand of the diagram formula.
struct ProductKernel {
  cplx coefficient{1.0, 0.0};
  std::vector<std::function<cplx(double)>> factors;
  // Factors sharing a non-negative id are the same function; used to reuse
  // block integrals.
  std::vector<int> factor_ids;
  std::vector<double> breakpoints;

  static ProductKernel tensor_power(cplx coefficient, std::function<cplx(double)> g, int order, int id,
                                    std::vector<double> breakpoints = {});
  int order() const { return static_cast<int>(factors.size()); }
};

struct EnvelopeCheck {
  double beta = 0.75;
  double center = 0.0;
  double max_constant = 1e8;
  int samples = 2001;
};

// E prod_i I_{a_i}(f_i) = sum over Pi_ge2 of prod_blocks int_W prod f.
cplx moment_of_product(std::span<const ProductKernel> kernels, const GroupShape& shape, const Window& window,
                       const QuadratureSpec& quad = {}, const EnvelopeCheck& check = {});

// Direct evaluation of prod_i I_{a_i}(f_i) on a configuration (for Monte Carlo).
cplx product_of_integrals(std::span<const ProductKernel> kernels, const PointConfiguration& config,
                          const Window& window, const QuadratureSpec& quad = {});

// int prod_k Psi_{alpha,u_k}.
double r_k(std::span<const long> us, double alpha, const QuadratureSpec& quad = {});

inline constexpr double kMaxShiftGrid = 1e7;

// n^{-l/2} sum_{u in U_j} prod_blocks R_{|block|}(u_block), where u_q ranges
// over [0, [n t_{j_q}]) and block slots read the shift of their group. The
// sum runs over shift differences with multiplicity counts; the reduced grid
// (4n)^{l-1} is capped at 1e7.
double t_sigma(long n, std::span<const int> js, const Partition& sigma, const GroupShape& shape, double alpha,
               std::span<const double> times, const QuadratureSpec& quad = {});

struct BMomentSpec {
  std::vector<double> thetas;  // one frequency per factor, l = thetas.size()
  int d = 1;
  int m = 4;
  std::vector<double> b;  // fdd coefficients b_j
  std::vector<double> t;  // fdd times t_j

  void validate() const;
};

inline constexpr long kMaxBMomentN = 1L << 12;

// B_{n,l,m}(theta) for each n in `ns`; the kernel must have bounded support.
std::vector<cplx> b_moment(const BMomentSpec& spec, std::span<const long> ns, const Kernel& psi,
                           const Window& window, const QuadratureSpec& quad = {});

// Limit B~_{l,m}(theta): zero for odd l, else var^p times the pairing sum of
// sum_{k=d}^m rho_k / k!.
cplx b_moment_limit(const BMomentSpec& spec, const Kernel& psi, const Window& window, long shift_cutoff,
                    const QuadratureSpec& quad = {});

// prod_q ( n^{-1/2} sum_j b_j sum_{u < [n t_j]} T^{[d,m]} e^{i theta_q X_u} ) on one configuration.
cplx b_moment_sample(const BMomentSpec& spec, long n, const Kernel& psi, const PointConfiguration& config,
                     const QuadratureSpec& quad = {});

}  // namespace pcl
