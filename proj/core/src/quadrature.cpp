#include "pcl/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <queue>
#include <sstream>

namespace pcl {

namespace bq = boost::math::quadrature;

std::string Window::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << '[' << lo << ',' << hi << ']';
  return os.str();
}

void QuadratureSpec::validate() const {
  require(panels >= 8, "quadrature panel count must be >= 8");
  require(abs_tol > 0.0 && std::isfinite(abs_tol), "quadrature tolerance must be > 0");
  require(tail_split > 0.0, "quadrature tail split must be > 0");
  require(max_subdivisions > 0, "quadrature subdivision cap must be > 0");
}

namespace {

void split_segment(double a, double b, const QuadratureSpec& q, std::vector<double>& edges) {
  const double len = b - a;
  const double core = q.tail_split;
  const int half = std::max(1, q.panels / 2);
  if (len <= 2.0 * core) {
    const int k = std::max(1, static_cast<int>(std::ceil(q.panels * len / (2.0 * core))));
    for (int i = 1; i < k; ++i) edges.push_back(a + len * i / k);
    return;
  }
  const double mid = 0.5 * (a + b);
  const double step = core / half;
  for (int i = 1; i <= half; ++i) {
    edges.push_back(a + step * i);
    edges.push_back(b - step * i);
  }
  for (double width = core; a + core + width < mid; width *= 2.0) {
    edges.push_back(a + core + width);
    edges.push_back(b - core - width);
  }
  edges.push_back(mid);
}

template <class R>
struct Panel {
  double a;
  double b;
  R value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class R, class F>
Panel<R> gauss_kronrod_21(const F& f, double a, double b) {
  using GK = bq::gauss_kronrod<double, 21>;
  using G = bq::gauss<double, 10>;
  const auto& x = GK::abscissa();
  const auto& wk = GK::weights();
  const auto& wg = G::weights();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);

  auto sample = [&](double t) -> R {
    const double xt = c + h * t;
    R v = f(xt);
    if (!std::isfinite(std::abs(v))) {
      std::ostringstream os;
      os.precision(17);
      os << "integrand returned a non-finite value at x=" << xt;
      throw NumericalError(os.str());
    }
    return v;
  };

  R kronrod = sample(0.0) * wk[0];
  R gauss{};
  for (std::size_t i = 1; i < x.size(); ++i) {
    const R s = sample(x[i]) + sample(-x[i]);
    kronrod += s * wk[i];
    if (i % 2 == 1) gauss += s * wg[i / 2];
  }
  Panel<R> p{a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
  return p;
}

template <class R, class F>
R integrate_adaptive(const F& f, const Window& w, const QuadratureSpec& q,
                     std::span<const double> breakpoints) {
  q.validate();
  const auto edges = panel_edges(w, q, breakpoints);
  std::priority_queue<Panel<R>> heap;
  double total_error = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    auto p = gauss_kronrod_21<R>(f, edges[i], edges[i + 1]);
    total_error += p.error;
    heap.push(p);
  }
  // Roundoff floor: an absolute target below a few ulps of the integral's
  // magnitude is unreachable.
  double magnitude = 0.0;
  auto target = [&] { return std::max(q.abs_tol, 64.0 * 2.220446049250313e-16 * magnitude); };
  {
    auto copy = heap;
    while (!copy.empty()) {
      magnitude += std::abs(copy.top().value);
      copy.pop();
    }
  }
  int splits = 0;
  while (total_error > target() && splits < q.max_subdivisions) {
    Panel<R> worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval exhausted in floating point
    heap.pop();
    auto left = gauss_kronrod_21<R>(f, worst.a, mid);
    auto right = gauss_kronrod_21<R>(f, mid, worst.b);
    total_error += left.error + right.error - worst.error;
    magnitude += std::abs(left.value) + std::abs(right.value) - std::abs(worst.value);
    heap.push(left);
    heap.push(right);
    ++splits;
  }
  // Recompute from scratch; the running error sum drifts.
  std::vector<Panel<R>> done;
  done.reserve(heap.size());
  double err = 0.0;
  while (!heap.empty()) {
    done.push_back(heap.top());
    err += heap.top().error;
    heap.pop();
  }
  std::sort(done.begin(), done.end(), [](const auto& l, const auto& r) { return l.a < r.a; });
  R total{};
  for (const auto& p : done) total += p.value;
  if (err > target()) {
    std::ostringstream os;
    os << "quadrature did not converge on " << w.describe() << ": error estimate " << err
       << " exceeds tolerance " << q.abs_tol;
    throw NumericalError(os.str());
  }
  return total;
}

}  // namespace

std::vector<double> panel_edges(const Window& w, const QuadratureSpec& q,
                                std::span<const double> breakpoints) {
  q.validate();
  std::vector<double> cuts{w.lo, w.hi};
  for (double b : breakpoints)
    if (b > w.lo && b < w.hi) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<double> edges(cuts);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) split_segment(cuts[i], cuts[i + 1], q, edges);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

FixedRule make_fixed_rule(const Window& w, const QuadratureSpec& q,
                          std::span<const double> breakpoints, int points_per_panel) {
  require(points_per_panel == 20 || points_per_panel == 10,
          "fixed rules support 10 or 20 points per panel");
  const auto edges = panel_edges(w, q, breakpoints);
  std::vector<double> x;
  std::vector<double> wts;
  auto fill = [&](const auto& abscissa, const auto& weights) {
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
      const double c = 0.5 * (edges[p] + edges[p + 1]);
      const double h = 0.5 * (edges[p + 1] - edges[p]);
      for (std::size_t i = 0; i < abscissa.size(); ++i) {
        x.push_back(c - h * abscissa[i]);
        wts.push_back(h * weights[i]);
        x.push_back(c + h * abscissa[i]);
        wts.push_back(h * weights[i]);
      }
    }
  };
  if (points_per_panel == 20)
    fill(bq::gauss<double, 20>::abscissa(), bq::gauss<double, 20>::weights());
  else
    fill(bq::gauss<double, 10>::abscissa(), bq::gauss<double, 10>::weights());
  return FixedRule{std::move(x), std::move(wts)};
}

namespace detail {

double integrate_real(const RealFn& f, const Window& w, const QuadratureSpec& q,
                      std::span<const double> breakpoints) {
  return integrate_adaptive<double>(f, w, q, breakpoints);
}

std::complex<double> integrate_complex(const ComplexFn& f, const Window& w,
                                       const QuadratureSpec& q,
                                       std::span<const double> breakpoints) {
  return integrate_adaptive<std::complex<double>>(f, w, q, breakpoints);
}

}  // namespace detail
}  // namespace pcl
