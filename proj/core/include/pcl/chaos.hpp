#pragma once

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "pcl/kernels.hpp"
#include "pcl/nonlinearity.hpp"
#include "pcl/process.hpp"
#include "pcl/quadrature.hpp"

namespace pcl {

using cplx = std::complex<double>;

inline constexpr int kMaxChaosOrder = 30;

// exp(int_W (e^{i theta psi_u} - i theta psi_u - 1) dx).
cplx char_fn(double theta, const Kernel& spec, const Window& window, const QuadratureSpec& quad = {});

// (e_0, ..., e_{max_order}) of the multiset `values`.
std::vector<cplx> elementary_symmetric(std::span<const cplx> values, int max_order);

// coefficient * g^{(x) order}, with S = int_W g cached.
struct TensorPowerKernel {
  cplx coefficient{1.0, 0.0};
  std::function<cplx(double)> base;
  int order = 0;
  cplx base_integral{};

  static TensorPowerKernel make(cplx coefficient, std::function<cplx(double)> base, int order,
                                const Window& window, const QuadratureSpec& quad = {},
                                std::span<const double> breakpoints = {});
};

// I_0 .. I_{max_order} of g^{(x) n}, given g at the configuration points and S = int_W g.
std::vector<cplx> tensor_power_integrals(std::span<const cplx> g_at_points, cplx S, int max_order);

// kernel.coefficient * I_n(g^{(x) n}) over the configuration.
cplx multiple_integral(const PointConfiguration& config, const TensorPowerKernel& kernel);

// Chaos orders kept by a truncation operator; hi < 0 means unbounded.
struct TruncationRange {
  int lo = 0;
  int hi = -1;

  static TruncationRange at_least(int d) { return {d, -1}; }
  static TruncationRange between(int m1, int m2) { return {m1, m2}; }
  static TruncationRange at_most(int m) { return {0, m}; }

  bool unbounded() const { return hi < 0; }
  void validate() const;
};

// Chaos data of F = e^{i theta X_u} on a window: f_q = cf / q! * g^{(x) q},
// g = e^{i theta psi_u} - 1.
class ExponentialChaos {
 public:
  ExponentialChaos(double theta, Kernel psi_u, const Window& window, const QuadratureSpec& quad = {});

  double theta() const { return theta_; }
  cplx cf() const { return cf_; }
  cplx base_integral() const { return S_; }
  cplx base(double x) const { return std::exp(cplx(0.0, theta_ * psi_(x))) - 1.0; }
  const Kernel& kernel() const { return psi_; }

  TensorPowerKernel kernel_of_order(int q) const;

  cplx value(const PointConfiguration& config) const;
  cplx truncate(const PointConfiguration& config, TruncationRange range) const;

 private:
  double theta_;
  Kernel psi_;
  Window window_;
  QuadratureSpec quad_;
  double compensator_;
  cplx cf_;
  cplx S_;
};

cplx truncate_exponential(double theta, const Kernel& spec, TruncationRange range,
                          const PointConfiguration& config, const QuadratureSpec& quad = {});

// Cumulants kappa_m = int_W psi_u^m for m = 0..max_m, with kappa_1 replaced by 0
// (X_u is compensated).
std::vector<double> windowed_cumulants(const Kernel& spec, const Window& window, int max_m,
                                       const QuadratureSpec& quad = {});

// Raw moments E X^k, k = 0..cumulants.size()-1, from cumulants.
std::vector<double> moments_from_cumulants(std::span<const double> cumulants);

// Precomputed T^{>=d} phi(X_u) for one kernel shift; reusable across configurations.
class TruncatedPhi {
 public:
  TruncatedPhi(const Nonlinearity& phi, int d, Kernel psi_u, const Window& window,
               const ThetaGrid& grid, const QuadratureSpec& quad = {});

  double operator()(const PointConfiguration& config, double* imag_residue = nullptr) const;

  // E phi(X_u).
  double mean() const;

 private:
  Nonlinearity phi_;
  int d_;
  Kernel psi_;
  double compensator_ = 0.0;
  std::array<double, 4> shifted_mean_{};
  std::vector<double> raw_integrals_;
  std::vector<double> weights_;
  std::vector<ExponentialChaos> chaos_;
};

// T^{>=d} phi(X_u) on one configuration. Fourier families integrate
// truncate_exponential against phi_hat over `grid`; polynomials use closed
// forms in the moments of X_u (d <= 2). The imaginary residue of the Fourier
// route is written to *imag_residue when given.
double truncate_phi(const Nonlinearity& phi, int d, const Kernel& spec,
                    const PointConfiguration& config, const ThetaGrid& grid,
                    const QuadratureSpec& quad = {}, double* imag_residue = nullptr);

// (n! ||f_n||^2)_{n=0..m} for F = e^{i theta X_u}.
std::vector<double> chaos_kernel_norms(double theta, const Kernel& spec, const Window& window, int m,
                                       const QuadratureSpec& quad = {});

// E phi(X + v) for a polynomial phi as a polynomial in v: returns p_0..p_3
// where E phi(X + v) = sum_r p_r v^r, given raw moments of X.
std::array<double, 4> shifted_mean_polynomial(const Polynomial& phi, std::span<const double> moments);

double binomial(int n, int k);
double factorial(int n);

}  // namespace pcl
