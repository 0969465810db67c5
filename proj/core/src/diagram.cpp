#include "pcl/diagram.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

#include "pcl/chaos.hpp"
#include "pcl/simulation.hpp"

namespace pcl {

ProductKernel ProductKernel::tensor_power(cplx coefficient, std::function<cplx(double)> g, int order, int id,
                                          std::vector<double> breakpoints) {
  require(order >= 0, "kernel order must be non-negative");
  ProductKernel k;
  k.coefficient = coefficient;
  k.factors.assign(static_cast<std::size_t>(order), g);
  k.factor_ids.assign(static_cast<std::size_t>(order), id);
  k.breakpoints = std::move(breakpoints);
  return k;
}

namespace {

void check_kernels(std::span<const ProductKernel> kernels, const GroupShape& shape) {
  require(static_cast<int>(kernels.size()) == shape.groups(), "one kernel per group is required");
  for (int i = 0; i < shape.groups(); ++i) {
    const auto& k = kernels[static_cast<std::size_t>(i)];
    require(k.order() == shape.sizes()[static_cast<std::size_t>(i)], "kernel order must match its group size");
    require(k.factor_ids.empty() || k.factor_ids.size() == k.factors.size(), "factor ids must match factors");
  }
}

void check_envelopes(std::span<const ProductKernel> kernels, const Window& w, const EnvelopeCheck& c) {
  require(c.beta > 0.5, "envelope exponent must exceed 1/2");
  for (std::size_t i = 0; i < kernels.size(); ++i)
    for (std::size_t j = 0; j < kernels[i].factors.size(); ++j) {
      double worst = 0.0;
      for (int s = 0; s < c.samples; ++s) {
        const double x = w.lo + (w.hi - w.lo) * s / (c.samples - 1);
        const double v = std::abs(kernels[i].factors[j](x)) * std::pow(1.0 + std::abs(x - c.center), c.beta);
        if (!std::isfinite(v)) {
          worst = v;
          break;
        }
        worst = std::max(worst, v);
      }
      if (!(worst <= c.max_constant)) {
        std::ostringstream os;
        os << "kernel " << i << " factor " << j << " is not dominated by an envelope with beta = " << c.beta;
        throw ValidationError(os.str());
      }
    }
}

}  // namespace

cplx moment_of_product(std::span<const ProductKernel> kernels, const GroupShape& shape, const Window& window,
                       const QuadratureSpec& quad, const EnvelopeCheck& check) {
  check_kernels(kernels, shape);
  check_envelopes(kernels, window, check);

  // Slot -> (kernel, factor).
  std::vector<std::pair<int, int>> slot;
  for (int g = 0; g < shape.groups(); ++g)
    for (int f = 0; f < shape.sizes()[static_cast<std::size_t>(g)]; ++f) slot.emplace_back(g, f);

  std::map<std::vector<int>, cplx> cache;
  auto block_integral = [&](const std::vector<int>& block) {
    std::vector<int> ids;
    bool cacheable = true;
    for (int s : block) {
      const auto& k = kernels[static_cast<std::size_t>(slot[s].first)];
      const int id = k.factor_ids.empty() ? -1 : k.factor_ids[static_cast<std::size_t>(slot[s].second)];
      if (id < 0) cacheable = false;
      ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end());
    if (cacheable)
      if (auto it = cache.find(ids); it != cache.end()) return it->second;
    std::vector<double> bps;
    for (int s : block) {
      const auto& k = kernels[static_cast<std::size_t>(slot[s].first)];
      bps.insert(bps.end(), k.breakpoints.begin(), k.breakpoints.end());
    }
    const cplx v = integrate(
        [&](double x) {
          cplx p = 1.0;
          for (int s : block) p *= kernels[static_cast<std::size_t>(slot[s].first)].factors[static_cast<std::size_t>(slot[s].second)](x);
          return p;
        },
        window, quad, bps);
    if (cacheable) cache.emplace(ids, v);
    return v;
  };

  cplx coef = 1.0;
  for (const auto& k : kernels) coef *= k.coefficient;
  cplx total{};
  for (const auto& sigma : enumerate_partitions(shape, PartitionFilter::PiGe2)) {
    cplx prod = 1.0;
    for (const auto& b : sigma.blocks) prod *= block_integral(b);
    total += prod;
  }
  return coef * total;
}

namespace {

// I_n(f_1 (x) ... (x) f_n) on a configuration: inclusion-exclusion over which
// slots are integrated against the points, with distinct-tuple sums.
cplx product_integral(const ProductKernel& k, std::span<const double> pts, std::span<const cplx> integrals) {
  const int n = k.order();
  const bool tensor = n > 0 && !k.factor_ids.empty() && k.factor_ids[0] >= 0 &&
                      std::all_of(k.factor_ids.begin(), k.factor_ids.end(), [&](int id) { return id == k.factor_ids[0]; });
  if (n == 0) return k.coefficient;
  if (tensor) {
    std::vector<cplx> g;
    g.reserve(pts.size());
    for (double x : pts) g.push_back(k.factors[0](x));
    return k.coefficient * tensor_power_integrals(g, integrals[0], n).back();
  }
  // General product: values[j][p] = f_j(x_p).
  std::vector<std::vector<cplx>> values(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    for (double x : pts) values[static_cast<std::size_t>(j)].push_back(k.factors[static_cast<std::size_t>(j)](x));
  cplx total{};
  std::vector<char> used(pts.size(), 0);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    std::vector<int> slots;
    cplx outside = 1.0;
    for (int j = 0; j < n; ++j) {
      if (mask & (1u << j)) slots.push_back(j);
      else outside *= -integrals[static_cast<std::size_t>(j)];
    }
    // sum over distinct point tuples for the chosen slots
    std::function<cplx(std::size_t)> rec = [&](std::size_t depth) -> cplx {
      if (depth == slots.size()) return 1.0;
      cplx s{};
      for (std::size_t p = 0; p < pts.size(); ++p) {
        if (used[p]) continue;
        used[p] = 1;
        s += values[static_cast<std::size_t>(slots[depth])][p] * rec(depth + 1);
        used[p] = 0;
      }
      return s;
    };
    total += outside * rec(0);
  }
  return k.coefficient * total;
}

}  // namespace

cplx product_of_integrals(std::span<const ProductKernel> kernels, const PointConfiguration& config,
                          const Window& window, const QuadratureSpec& quad) {
  cplx prod = 1.0;
  for (const auto& k : kernels) {
    std::vector<cplx> integrals;
    for (const auto& f : k.factors) integrals.push_back(integrate(f, window, quad, k.breakpoints));
    prod *= product_integral(k, config.points(), integrals);
  }
  return prod;
}

double r_k(std::span<const long> us, double alpha, const QuadratureSpec& quad) {
  require(!us.empty(), "R_k needs at least one shift");
  require(std::isfinite(alpha) && alpha > 0.5, "R_k requires alpha > 1/2");
  require(alpha != 1.0, "alpha = 1 is excluded (log factor)");
  return envelope_product_integral(alpha, us, quad);
}

double t_sigma(long n, std::span<const int> js, const Partition& sigma, const GroupShape& shape, double alpha,
               std::span<const double> times, const QuadratureSpec& quad) {
  require(n >= 1, "n must be >= 1");
  const int l = shape.groups();
  require(static_cast<int>(js.size()) == l, "one time index per group is required");
  require(satisfies(sigma, shape, PartitionFilter::Pi), "sigma must respect the group constraint");
  std::vector<long> N(static_cast<std::size_t>(l));
  for (int q = 0; q < l; ++q) {
    const int j = js[static_cast<std::size_t>(q)];
    require(j >= 0 && j < static_cast<int>(times.size()), "time index out of range");
    N[static_cast<std::size_t>(q)] = floor_index(n, times[static_cast<std::size_t>(j)]);
  }
  const long span_max = *std::max_element(N.begin(), N.end());
  const double grid = std::pow(2.0 * static_cast<double>(span_max) + 1.0, l - 1);
  if (grid > kMaxShiftGrid) {
    std::ostringstream os;
    os << "t_sigma shift grid " << grid << " exceeds " << kMaxShiftGrid;
    throw ValidationError(os.str());
  }
  if (span_max == 0) return 0.0;

  const auto masks = block_group_masks(sigma, shape);
  std::map<std::vector<long>, double> memo;
  std::vector<double> pair_table(static_cast<std::size_t>(2 * span_max + 1), -1.0);
  auto R = [&](unsigned mask, const std::vector<long>& u) {
    std::vector<long> us;
    for (int q = 0; q < l; ++q)
      if (mask & (1u << q)) us.push_back(u[static_cast<std::size_t>(q)]);
    std::sort(us.begin(), us.end());
    const long base = us.front();
    for (long& v : us) v -= base;
    if (us.size() == 2) {
      double& slot = pair_table[static_cast<std::size_t>(us[1])];
      if (slot < 0) slot = r_k(us, alpha, quad);
      return slot;
    }
    auto it = memo.find(us);
    if (it != memo.end()) return it->second;
    const double v = r_k(us, alpha, quad);
    memo.emplace(us, v);
    return v;
  };

  // u_0 = v free, u_q = v + delta_q; sum over delta with the count of admissible v.
  double total = 0.0;
  std::vector<long> delta(static_cast<std::size_t>(l), 0);
  std::function<void(int)> rec = [&](int q) {
    if (q == l) {
      long lo = 0, hi = N[0];
      for (int i = 1; i < l; ++i) {
        lo = std::max(lo, -delta[static_cast<std::size_t>(i)]);
        hi = std::min(hi, N[static_cast<std::size_t>(i)] - delta[static_cast<std::size_t>(i)]);
      }
      if (hi <= lo) return;
      double prod = static_cast<double>(hi - lo);
      for (unsigned m : masks) prod *= R(m, delta);
      total += prod;
      return;
    }
    for (long d = -(span_max - 1); d <= span_max - 1; ++d) {
      delta[static_cast<std::size_t>(q)] = d;
      rec(q + 1);
    }
  };
  rec(1);
  return total / std::pow(static_cast<double>(n), 0.5 * l);
}

void BMomentSpec::validate() const {
  require(!thetas.empty(), "b_moment needs at least one frequency");
  require(d >= 1, "b_moment requires d >= 1");
  require(m >= d, "b_moment requires m >= d");
  require(static_cast<int>(thetas.size()) * m <= kMaxPartitionSlots, "l * m exceeds 12 (partition guard)");
  require(thetas.size() <= 4, "b_moment supports at most four frequencies");
  require(!b.empty() && b.size() == t.size(), "fdd coefficients and times must pair up");
  for (double x : t) require(x >= 0.0 && x <= 1.0, "fdd times must lie in [0,1]");
  for (double x : thetas) require(std::isfinite(x), "frequencies must be finite");
}

namespace {

// Sum over Pi_ge2(k) for all k in [d, m]^l, grouped by the multiset of block
// group-masks and weighted by 1 / prod k_q!.
std::map<std::vector<unsigned>, double> pattern_weights(int l, int d, int m) {
  std::map<std::vector<unsigned>, double> out;
  std::vector<int> k(static_cast<std::size_t>(l), d);
  for (;;) {
    double w = 1.0;
    for (int v : k) w /= factorial(v);
    for (const auto& sigma : enumerate_partitions(GroupShape(k), PartitionFilter::PiGe2)) {
      auto masks = block_group_masks(sigma, GroupShape(k));
      std::sort(masks.begin(), masks.end());
      out[masks] += w;
    }
    int i = 0;
    while (i < l && ++k[static_cast<std::size_t>(i)] > m) k[static_cast<std::size_t>(i++)] = d;
    if (i == l) break;
  }
  return out;
}

}  // namespace

std::vector<cplx> b_moment(const BMomentSpec& spec, std::span<const long> ns, const Kernel& psi,
                           const Window& window, const QuadratureSpec& quad) {
  spec.validate();
  require(std::isfinite(psi.support_lo()) && std::isfinite(psi.support_hi()),
          "b_moment needs a kernel with bounded support; cut it with effective_kernel");
  long n_max = 1;
  for (long n : ns) {
    require(n >= 1 && n <= kMaxBMomentN, "b_moment requires 1 <= n <= 2^12");
    n_max = std::max(n_max, n);
  }
  const int l = static_cast<int>(spec.thetas.size());
  const Kernel p0 = psi.shifted(0);
  cplx cf_prod = 1.0;
  for (double th : spec.thetas) cf_prod *= char_fn(th, p0, window, quad);

  const auto patterns = pattern_weights(l, spec.d, spec.m);
  std::vector<unsigned> used_masks;
  for (const auto& [pat, w] : patterns)
    for (unsigned mk : pat)
      if (std::find(used_masks.begin(), used_masks.end(), mk) == used_masks.end()) used_masks.push_back(mk);

  // Block integral int prod_{q in mask} (e^{i theta_q psi(x - u_q)} - 1) dx, memoised on
  // the mask and the shifts relative to the lowest group in it.
  std::unordered_map<std::uint64_t, cplx> memo;
  auto block = [&](unsigned mask, const std::vector<long>& u) -> cplx {
    std::uint64_t key = mask;
    long base = 0;
    bool first = true;
    double lo = window.lo, hi = window.hi;
    for (int q = 0; q < l; ++q) {
      if (!(mask & (1u << q))) continue;
      const long uq = u[static_cast<std::size_t>(q)];
      if (first) {
        base = uq;
        first = false;
      } else {
        key = (key << 16) | static_cast<std::uint64_t>((uq - base) + 32768);
      }
      lo = std::max(lo, uq + p0.support_lo());
      hi = std::min(hi, uq + p0.support_hi());
    }
    if (!(lo < hi)) return {};
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::vector<double> bps;
    std::vector<std::pair<double, Kernel>> factors;
    for (int q = 0; q < l; ++q)
      if (mask & (1u << q)) {
        const Kernel k = p0.shifted(u[static_cast<std::size_t>(q)]);
        const auto b = k.breakpoints();
        bps.insert(bps.end(), b.begin(), b.end());
        factors.emplace_back(spec.thetas[static_cast<std::size_t>(q)], k);
      }
    const cplx v = integrate(
        [&](double x) {
          cplx p = 1.0;
          for (const auto& [th, k] : factors) p *= std::exp(cplx(0.0, th * k(x))) - 1.0;
          return p;
        },
        Window(lo, hi), quad, bps);
    memo.emplace(key, v);
    return v;
  };

  // F(delta) on the difference grid; blocks chain at most l - 1 supports.
  const long width = static_cast<long>(std::ceil(p0.support_hi() - p0.support_lo()));
  const long reach = std::min<long>((l - 1) * width, n_max - 1);
  const double grid = std::pow(2.0 * reach + 1.0, l - 1);
  if (grid > 1e8) throw ValidationError("b_moment difference grid too large");

  struct Entry {
    std::vector<long> delta;
    cplx value;
  };
  std::vector<Entry> entries;
  std::vector<long> delta(static_cast<std::size_t>(l), 0);
  std::vector<cplx> mval(used_masks.size());
  std::function<void(int)> rec = [&](int q) {
    if (q == l) {
      bool any = false;
      for (std::size_t i = 0; i < used_masks.size(); ++i) {
        mval[i] = block(used_masks[i], delta);
        any = any || mval[i] != cplx{};
      }
      if (!any) return;
      cplx F{};
      for (const auto& [pat, w] : patterns) {
        cplx p = w;
        for (unsigned mk : pat) {
          const auto idx = std::find(used_masks.begin(), used_masks.end(), mk) - used_masks.begin();
          p *= mval[static_cast<std::size_t>(idx)];
          if (p == cplx{}) break;
        }
        F += p;
      }
      if (F != cplx{}) entries.push_back({delta, F});
      return;
    }
    for (long v = -reach; v <= reach; ++v) {
      delta[static_cast<std::size_t>(q)] = v;
      rec(q + 1);
    }
  };
  rec(1);

  const std::size_t J = spec.b.size();
  std::vector<cplx> out;
  for (long n : ns) {
    cplx total{};
    std::vector<std::size_t> j(static_cast<std::size_t>(l), 0);
    for (;;) {
      double bprod = 1.0;
      std::vector<long> N(static_cast<std::size_t>(l));
      for (int q = 0; q < l; ++q) {
        bprod *= spec.b[j[static_cast<std::size_t>(q)]];
        N[static_cast<std::size_t>(q)] = floor_index(n, spec.t[j[static_cast<std::size_t>(q)]]);
      }
      cplx s{};
      for (const auto& e : entries) {
        long lo = 0, hi = N[0];
        for (int q = 1; q < l; ++q) {
          lo = std::max(lo, -e.delta[static_cast<std::size_t>(q)]);
          hi = std::min(hi, N[static_cast<std::size_t>(q)] - e.delta[static_cast<std::size_t>(q)]);
        }
        if (hi > lo) s += static_cast<double>(hi - lo) * e.value;
      }
      total += bprod * s;
      int q = 0;
      while (q < l && ++j[static_cast<std::size_t>(q)] == J) j[static_cast<std::size_t>(q++)] = 0;
      if (q == l) break;
    }
    out.push_back(cf_prod * total / std::pow(static_cast<double>(n), 0.5 * l));
  }
  return out;
}

cplx b_moment_limit(const BMomentSpec& spec, const Kernel& psi, const Window& window, long shift_cutoff,
                    const QuadratureSpec& quad) {
  spec.validate();
  const int l = static_cast<int>(spec.thetas.size());
  if (l % 2 == 1) return {};
  double var = 0.0;
  for (std::size_t a = 0; a < spec.b.size(); ++a)
    for (std::size_t c = 0; c < spec.b.size(); ++c) var += spec.b[a] * spec.b[c] * std::min(spec.t[a], spec.t[c]);

  const Kernel p0 = psi.shifted(0);
  std::map<std::pair<int, int>, cplx> pair_value;
  auto pair_sum = [&](int q1, int q2) {
    const auto key = std::make_pair(q1, q2);
    if (auto it = pair_value.find(key); it != pair_value.end()) return it->second;
    const double t1 = spec.thetas[static_cast<std::size_t>(q1)], t2 = spec.thetas[static_cast<std::size_t>(q2)];
    const cplx cf = char_fn(t1, p0, window, quad) * char_fn(t2, p0, window, quad);
    cplx s{};
    for (long u = -shift_cutoff; u <= shift_cutoff; ++u) {
      const Kernel pu = p0.shifted(u);
      const double lo = std::max({window.lo, p0.support_lo(), u + p0.support_lo()});
      const double hi = std::min({window.hi, p0.support_hi(), u + p0.support_hi()});
      if (!(lo < hi)) continue;
      auto bps = p0.breakpoints();
      const auto more = pu.breakpoints();
      bps.insert(bps.end(), more.begin(), more.end());
      const cplx G = integrate(
          [&](double x) {
            return (std::exp(cplx(0.0, t1 * p0(x))) - 1.0) * (std::exp(cplx(0.0, t2 * pu(x))) - 1.0);
          },
          Window(lo, hi), quad, bps);
      cplx term = 1.0;
      for (int k = 1; k <= spec.m; ++k) {
        term *= G / static_cast<double>(k);
        if (k >= spec.d) s += term;
      }
    }
    pair_value.emplace(key, cf * s);
    return cf * s;
  };

  std::vector<int> ones(static_cast<std::size_t>(l), 1);
  cplx total{};
  for (const auto& pairing : enumerate_partitions(GroupShape(ones), PartitionFilter::PiEq2)) {
    cplx p = 1.0;
    for (const auto& b : pairing.blocks) p *= pair_sum(b[0], b[1]);
    total += p;
  }
  return std::pow(var, l / 2) * total;
}

cplx b_moment_sample(const BMomentSpec& spec, long n, const Kernel& psi, const PointConfiguration& config,
                     const QuadratureSpec& quad) {
  spec.validate();
  const Window& w = config.window();
  const Kernel p0 = psi.shifted(0);
  require(w.lo <= p0.support_lo() && static_cast<double>(n - 1) + p0.support_hi() <= w.hi,
          "configuration window must cover every shift");
  const auto bps = p0.breakpoints();
  std::vector<long> N;
  for (double t : spec.t) N.push_back(floor_index(n, t));

  cplx prod = 1.0;
  for (double th : spec.thetas) {
    const cplx cf = char_fn(th, p0, w, quad);
    const cplx S = integrate([&](double x) { return std::exp(cplx(0.0, th * p0(x))) - 1.0; }, w, quad, bps);
    std::vector<cplx> partial(static_cast<std::size_t>(n) + 1, cplx{});
    for (long u = 0; u < n; ++u) {
      std::vector<cplx> g;
      for (double x : config.points_in(u + p0.support_lo(), u + p0.support_hi()))
        g.push_back(std::exp(cplx(0.0, th * p0(x - static_cast<double>(u)))) - 1.0);
      const auto I = tensor_power_integrals(g, S, spec.m);
      cplx v{};
      for (int k = spec.d; k <= spec.m; ++k) v += cf / factorial(k) * I[static_cast<std::size_t>(k)];
      partial[static_cast<std::size_t>(u) + 1] = partial[static_cast<std::size_t>(u)] + v;
    }
    cplx y{};
    for (std::size_t j = 0; j < spec.b.size(); ++j) y += spec.b[j] * partial[static_cast<std::size_t>(N[j])];
    prod *= y / std::sqrt(static_cast<double>(n));
  }
  return prod;
}

}  // namespace pcl
