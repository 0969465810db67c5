#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

// Composite Simpson with `intervals` (even) subintervals.
double simpson(const std::function<double(double)>& f, double a, double b, int intervals);
cplx simpson_c(const std::function<cplx(double)>& f, double a, double b, int intervals);

// I_n(g^n) from its definition: sum over subsets J of [n] of
// (-1)^{n-|J|} (sum over ordered distinct |J|-tuples of prod g) * S^{n-|J|}.
cplx multiple_integral(std::span<const double> points, const std::function<cplx(double)>& g, cplx S, int n);

// All set partitions of {0..n-1}: the block of the smallest free element is
// chosen as a subset of the remaining ones.
std::vector<std::vector<std::vector<int>>> set_partitions(int n);

// Poisson(lambda) characteristic function of the compensated count.
cplx compensated_poisson_cf(double theta, double lambda);

double double_factorial(int k);
long bell_number(int n);

}  // namespace oracle
