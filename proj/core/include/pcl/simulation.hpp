#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pcl/kernels.hpp"
#include "pcl/nonlinearity.hpp"
#include "pcl/process.hpp"
#include "pcl/quadrature.hpp"

namespace pcl {

// Draws the sequence T^{>=d} phi(X_u), u = 0..n-1, from one Poisson
// configuration on [support_lo, n - 1 + support_hi]. The kernel must have
// bounded support (see effective_kernel), which makes every X_u exact.
class PathSimulator {
 public:
  PathSimulator(const Kernel& psi, const Nonlinearity& phi, int d, long n,
                const QuadratureSpec& quad = {}, double theta_step = 0.25);

  long n() const { return n_; }
  int d() const { return d_; }
  const Window& window() const { return window_; }
  double phi_mean() const { return phi_mean_; }

  std::vector<double> summands(std::uint64_t seed) const;
  std::vector<double> summands(const PointConfiguration& config) const;

  // X_u, u = 0..n-1, for one configuration.
  std::vector<double> first_chaos_sequence(const PointConfiguration& config) const;

 private:
  double truncate_one(double X, std::span<const double> psi_values) const;
  double h_value(double v) const;

  Kernel psi_;
  Nonlinearity phi_;
  int d_;
  long n_;
  Window window_;
  double compensator_;
  double phi_mean_ = 0.0;
  ThetaGrid grid_;
  // Fourier families
  std::vector<std::complex<double>> cf_;
  std::vector<std::complex<double>> S_;
  std::function<double(double)> h_interp_;
  double h_lo_ = 0.0;
  double h_step_ = 1.0;
  double h_integral_ = 0.0;
  // Polynomial family: E phi(X + v) = sum p_r v^r and J_r = int psi^r
  std::array<double, 4> p_{};
  std::array<double, 4> J_{};
};

// [n t], guarded against representation error in n * t.
long floor_index(long n, double t);

// Y_n(t) = n^{-1/2} sum_{u < [nt]} s_u
std::vector<double> partial_path(std::span<const double> summands, long n, std::span<const double> times);

// Z_n(t) = Y_n(t) + (nt - [nt]) n^{-1/2} s_{[nt]}
std::vector<double> interpolated_path(std::span<const double> summands, long n,
                                      std::span<const double> times);

// n^{-1/2} sum_j b_j sum_{u < [n t_j]} s_u
double fdd_value(std::span<const double> summands, long n, std::span<const double> b,
                 std::span<const double> t);

// Worker count: explicit request if positive, else PCL_THREADS, else 1.
int resolve_threads(int requested = 0);

// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
// visited exactly once; callers write results into per-index slots.
void parallel_for(long count, int threads, const std::function<void(long)>& body);

}  // namespace pcl
