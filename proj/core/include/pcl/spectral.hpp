#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "pcl/kernels.hpp"
#include "pcl/nonlinearity.hpp"
#include "pcl/quadrature.hpp"

namespace pcl {

using cplx = std::complex<double>;

struct CovarianceQuery {
  double theta1 = 0.0;
  double theta2 = 0.0;
  long u = 0;
  int d = 1;
  Kernel spec = Kernel::power_law(2.0);
  Window window{};
  QuadratureSpec quad{};

  void validate() const;
};

// G_u(theta1, theta2) = int_W (e^{i theta1 psi_0} - 1)(e^{i theta2 psi_u} - 1) dx.
cplx pair_integral(const CovarianceQuery& q);

// exp(z) - sum_{k<d} z^k / k!
cplx exp_remainder(cplx z, int d);

// E[T^{>=d} e^{i theta1 X_0} T^{>=d} e^{i theta2 X_u}] (bilinear, no conjugation).
cplx cov_truncated_exponential(const CovarianceQuery& q);

// E[T^{>=d} e^{i theta1 X_0} conj(T^{>=d} e^{i theta2 X_u})], for audit against
// the bilinear pairing.
cplx cov_truncated_exponential_hermitian(const CovarianceQuery& q);

struct SeriesValue {
  cplx value;
  double tail_bound;  // bound on the neglected |u| > cutoff part; +inf if not summable
};

// sum_{|u| <= cutoff} cf(theta1) cf(theta2) G_u^k.
SeriesValue rho_k(double theta1, double theta2, int k, const Kernel& spec, const Window& window,
                  long shift_cutoff, const QuadratureSpec& quad = {});

// Window covering psi_u for every |u| <= shift_cutoff (psi must have bounded support).
Window spectral_window(const Kernel& psi, long shift_cutoff);

enum class MuMethod { ChaosSeries, CovarianceSeries, MonteCarlo };

MuMethod parse_mu_method(const std::string& name);
std::string to_string(MuMethod m);

struct MuSquaredOptions {
  long shift_cutoff = 200;
  double theta_step = 0.25;
  int hermite_points = 32;
  QuadratureSpec quad{};
  // Monte Carlo route
  long n = 1L << 14;
  long reps = 2000;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct MuSquaredResult {
  MuMethod method;
  double value = 0.0;
  double std_error = 0.0;     // Monte Carlo only
  double imag_residue = 0.0;  // analytic routes
  double tail_estimate = 0.0; // extrapolated |u| > cutoff contribution
  std::vector<double> cov_by_shift;  // u = 0..cutoff (analytic routes)
};

// Limiting variance sum_u cov(T^{>=d} phi(X_0), T^{>=d} phi(X_u)). The kernel
// must have bounded support (see effective_kernel); `window` must cover every
// shift used.
MuSquaredResult mu_squared(const Nonlinearity& phi, int d, const Kernel& spec, const Window& window,
                           MuMethod method, const MuSquaredOptions& options = {});

struct DecayTable {
  std::vector<long> shifts;
  std::vector<double> abs_cov;
  double slope = 0.0;  // least-squares log-log slope over the fit range
  long fit_lo = 4;
  long fit_hi = 0;
};

// |cov(T^{>=d} phi(X_0), T^{>=d} phi(X_u))| for u = 0..u_max with the fitted
// decay slope over u in [4, u_max].
DecayTable cov_phi_decay(const Nonlinearity& phi, int d, const Kernel& spec, long u_max,
                         const MuSquaredOptions& options = {});

// Least-squares slope of log y on log x, skipping non-positive y.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace pcl
