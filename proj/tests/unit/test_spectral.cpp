#include <gtest/gtest.h>

#include <cmath>

#include "pcl/chaos.hpp"
#include "pcl/errors.hpp"
#include "pcl/process.hpp"
#include "pcl/rng.hpp"
#include "pcl/spectral.hpp"
#include "pcl/stats.hpp"

using namespace pcl;

namespace {

const cplx I(0.0, 1.0);

CovarianceQuery query(double t1, double t2, long u, int d, const Kernel& psi, const Window& w) {
  CovarianceQuery q;
  q.theta1 = t1;
  q.theta2 = t2;
  q.u = u;
  q.d = d;
  q.spec = psi;
  q.window = w;
  return q;
}

}  // namespace

TEST(PairIntegral, Examples) {
  const auto ind = Kernel::indicator(0, 1);
  const Window w(-10, 10);
  EXPECT_EQ(std::abs(pair_integral(query(0.0, 1.0, 0, 1, ind, w))), 0.0);
  const cplx ref = (std::exp(I * 0.7) - 1.0) * (std::exp(I * -1.3) - 1.0);
  EXPECT_LT(std::abs(pair_integral(query(0.7, -1.3, 0, 1, ind, w)) - ref), 1e-12);
  EXPECT_EQ(std::abs(pair_integral(query(0.7, 1.3, 5, 1, ind, w))), 0.0);
}

TEST(PairIntegral, ShiftSymmetry) {
  const auto psi = Kernel::power_law(0.8).truncated(100);
  const Window w = spectral_window(psi, 20);
  for (long u : {1L, 3L, 17L}) {
    const cplx a = pair_integral(query(0.4, 1.1, u, 1, psi, w));
    const cplx b = pair_integral(query(1.1, 0.4, -u, 1, psi, w));
    EXPECT_LT(std::abs(a - b), 1e-11);
  }
}

TEST(ExpRemainder, MatchesSeriesAndClosedForm) {
  for (cplx z : {cplx(1e-6, 2e-7), cplx(0.3, -0.2), cplx(2.0, 1.0), cplx(-5.0, 3.0)}) {
    for (int d = 0; d <= 4; ++d) {
      cplx series = 0.0, term = 1.0;
      for (int k = 0; k < 80; ++k) {
        if (k >= d) series += term;
        term *= z / static_cast<double>(k + 1);
      }
      EXPECT_LT(std::abs(exp_remainder(z, d) - series), 1e-14 * std::max(1.0, std::abs(series)) + 1e-300)
          << z << " d=" << d;
    }
  }
}

TEST(CovTruncatedExponential, Examples) {
  const auto ind = Kernel::indicator(0, 1);
  const Window w(-10, 10);
  EXPECT_EQ(std::abs(cov_truncated_exponential(query(0.0, 1.0, 0, 1, ind, w))), 0.0);
  EXPECT_EQ(std::abs(cov_truncated_exponential(query(1.0, 1.0, 3, 1, ind, w))), 0.0);
  // d = 0: E e^{i t1 X0} e^{i t2 Xu} = cf1 cf2 exp(G)
  const auto q = query(0.5, 0.8, 0, 0, ind, w);
  const cplx joint = char_fn(1.3, ind, w);
  EXPECT_LT(std::abs(cov_truncated_exponential(q) - joint), 1e-12);
}

TEST(CovTruncatedExponential, HermitianIsBilinearAtNegatedFrequency) {
  const auto psi = Kernel::power_law(2.0).truncated(30);
  const Window w = spectral_window(psi, 5);
  for (long u : {0L, 2L}) {
    const cplx h = cov_truncated_exponential_hermitian(query(0.6, 1.4, u, 2, psi, w));
    const cplx b = cov_truncated_exponential(query(0.6, -1.4, u, 2, psi, w));
    EXPECT_LT(std::abs(h - b), 1e-14);
  }
}

TEST(CovTruncatedExponential, MatchesMonteCarlo) {
  const auto ind = Kernel::indicator(0, 1);
  const Window w(0, 1);
  const double th = 1.0;
  const cplx cf = char_fn(th, ind, w);
  std::vector<double> re, im;
  re.reserve(1000000);
  im.reserve(1000000);
  for (std::uint64_t s = 0; s < 1000000; ++s) {
    const auto c = sample_configuration(w, derive_seed(8, stream::kOracle, s));
    const double X = static_cast<double>(c.size()) - 1.0;
    const cplx t = std::exp(I * th * X) - cf;
    re.push_back((t * t).real());
    im.push_back((t * t).imag());
  }
  const cplx v = cov_truncated_exponential(query(th, th, 0, 1, ind, Window(-1, 2)));
  const auto mr = mean_with_se(re), mi = mean_with_se(im);
  EXPECT_LE(std::abs(mr.mean - v.real()), 3 * mr.se);
  EXPECT_LE(std::abs(mi.mean - v.imag()), 3 * mi.se);
}

TEST(RhoK, Examples) {
  const auto ind = Kernel::indicator(0, 1);
  const Window w = spectral_window(ind, 10);
  EXPECT_EQ(std::abs(rho_k(0.0, 1.0, 2, ind, w, 10).value), 0.0);
  const double t1 = 0.9, t2 = -0.4;
  for (int k = 1; k <= 4; ++k) {
    const cplx G = (std::exp(I * t1) - 1.0) * (std::exp(I * t2) - 1.0);
    const cplx ref = char_fn(t1, ind, w) * char_fn(t2, ind, w) * std::pow(G, k);
    const auto r = rho_k(t1, t2, k, ind, w, 10);
    EXPECT_LT(std::abs(r.value - ref), 1e-12);
    EXPECT_EQ(r.tail_bound, 0.0);
  }
}

TEST(RhoK, TailBoundDecreasesWithCutoff) {
  const auto psi = Kernel::power_law(0.8);
  double prev = INFINITY;
  for (long cut : {10L, 20L, 40L, 80L}) {
    const auto r = rho_k(1.0, -1.0, 2, psi, spectral_window(psi.truncated(2000), cut), cut);
    EXPECT_LT(r.tail_bound, prev);
    EXPECT_GE(r.tail_bound, 0.0);
    prev = r.tail_bound;
  }
}

TEST(RhoK, KSeriesConvergesToCovarianceSum) {
  // sum_{k>=d} rho_k / k! == sum_u cov_truncated_exponential(u)
  const auto psi = Kernel::power_law(2.0).truncated(40);
  const long cut = 45;
  const Window w = spectral_window(psi, cut);
  const double t1 = 0.8, t2 = -1.1;
  const int d = 2;
  cplx cov = 0.0;
  for (long u = -cut; u <= cut; ++u) cov += cov_truncated_exponential(query(t1, t2, u, d, psi, w));
  cplx series = 0.0;
  double last_gap = INFINITY;
  for (int k = d; k <= 14; ++k) {
    series += rho_k(t1, t2, k, psi, w, cut).value / factorial(k);
    const double gap = std::abs(series - cov);
    EXPECT_LE(gap, last_gap + 1e-15);
    last_gap = gap;
  }
  EXPECT_LT(last_gap, 1e-12);
}

TEST(MuSquared, ExactLinearCase) {
  const auto ind = Kernel::indicator(0, 1);
  const Window w = spectral_window(ind, 20);
  MuSquaredOptions o;
  o.shift_cutoff = 20;
  for (auto m : {MuMethod::ChaosSeries, MuMethod::CovarianceSeries}) {
    const auto r = mu_squared(Nonlinearity::parse("poly:x"), 1, ind, w, m, o);
    EXPECT_NEAR(r.value, 1.0, 1e-6) << to_string(m);
  }
}

TEST(MuSquared, ExactQuadraticCase) {
  const auto ind = Kernel::indicator(0, 1);
  const Window w = spectral_window(ind, 20);
  MuSquaredOptions o;
  o.shift_cutoff = 20;
  for (auto m : {MuMethod::ChaosSeries, MuMethod::CovarianceSeries}) {
    const auto r = mu_squared(Nonlinearity::parse("poly:x^2"), 2, ind, w, m, o);
    EXPECT_NEAR(r.value, 2.0, 1e-6) << to_string(m);
  }
}

TEST(MuSquared, PolynomialRoutesAgreeOnOverlappingKernel) {
  const auto psi = Kernel::power_law(2.0).truncated(20);
  MuSquaredOptions o;
  o.shift_cutoff = 45;
  const Window w = spectral_window(psi, o.shift_cutoff);
  for (const char* spec : {"poly:x", "poly:1,0.5,-0.3,0.2"}) {
    for (int d : {1, 2}) {
      const auto phi = Nonlinearity::parse(spec);
      const double a = mu_squared(phi, d, psi, w, MuMethod::ChaosSeries, o).value;
      const double b = mu_squared(phi, d, psi, w, MuMethod::CovarianceSeries, o).value;
      EXPECT_NEAR(a, b, 1e-7 * std::abs(a)) << spec << " d=" << d;
      EXPECT_GE(a, 0.0);
    }
  }
}

TEST(MuSquared, FourierRoutesAgree) {
  const auto psi = Kernel::power_law(2.0).truncated(30);
  MuSquaredOptions o;
  o.shift_cutoff = 40;
  const Window w = spectral_window(psi, o.shift_cutoff);
  for (int d : {1, 2, 3}) {
    const auto phi = Nonlinearity::parse("modgauss:0.7");
    const auto a = mu_squared(phi, d, psi, w, MuMethod::ChaosSeries, o);
    const auto b = mu_squared(phi, d, psi, w, MuMethod::CovarianceSeries, o);
    EXPECT_NEAR(a.value, b.value, 1e-3 * std::abs(a.value)) << "d=" << d;
    EXPECT_GT(a.value, 0.0);
    EXPECT_LT(a.imag_residue, 1e-6);
    // Decreasing in d: fewer chaoses retained.
    if (d > 1) {
      const auto prev = mu_squared(phi, d - 1, psi, w, MuMethod::ChaosSeries, o);
      EXPECT_LT(a.value, prev.value);
    }
  }
}

TEST(MuSquared, MonteCarloLinearCase) {
  const auto ind = Kernel::indicator(0, 1);
  MuSquaredOptions o;
  o.n = 1 << 14;
  o.reps = 2000;
  o.seed = 3;
  const auto r = mu_squared(Nonlinearity::parse("poly:x"), 1, ind, spectral_window(ind, 1), MuMethod::MonteCarlo, o);
  EXPECT_LE(std::abs(r.value - 1.0), 3 * r.std_error);
  EXPECT_LT(std::abs(r.value - 1.0), 0.1);
  EXPECT_GE(r.value, -3 * r.std_error);
}

TEST(MuSquared, PolynomialAboveSecondOrderRejected) {
  const auto ind = Kernel::indicator(0, 1);
  EXPECT_THROW(mu_squared(Nonlinearity::parse("poly:x^3"), 3, ind, spectral_window(ind, 5), MuMethod::ChaosSeries),
               ValidationError);
}

TEST(CovPhiDecay, DisjointIndicatorVanishesOffDiagonal) {
  MuSquaredOptions o;
  const auto t = cov_phi_decay(Nonlinearity::gaussian_bump(), 1, Kernel::indicator(0, 1), 12, o);
  ASSERT_EQ(t.abs_cov.size(), 13u);
  EXPECT_GT(t.abs_cov[0], 0.0);
  for (std::size_t u = 1; u < t.abs_cov.size(); ++u) EXPECT_EQ(t.abs_cov[u], 0.0);
}

TEST(CovPhiDecay, SummableForPowerLaw) {
  MuSquaredOptions o;
  const auto t = cov_phi_decay(Nonlinearity::gaussian_bump(), 1, Kernel::power_law(2.0), 60, o);
  double partial = 0.0, last_inc = 0.0;
  for (double v : t.abs_cov) {
    last_inc = v;
    partial += v;
  }
  EXPECT_LT(last_inc, 1e-4);
  EXPECT_LT(t.slope, -1.0);
}

TEST(LogLogSlope, ExactPowerLaw) {
  std::vector<double> x, y;
  for (int u = 4; u <= 200; ++u) {
    x.push_back(u);
    y.push_back(3.0 * std::pow(u, -1.7));
  }
  EXPECT_NEAR(loglog_slope(x, y), -1.7, 1e-12);
}
