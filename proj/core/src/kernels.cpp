#include "pcl/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pcl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> parse_numbers(const std::string& body, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      require(used == item.size(), "trailing characters");
    } catch (const std::exception&) {
      throw ValidationError("cannot parse number '" + item + "' in kernel spec '" + text + "'");
    }
  }
  return out;
}

// int_{-1}^{1} exp(1 - 1/(1 - r^2)) dr
double bump_unit_integral(int power) {
  static const double one = [] {
    QuadratureSpec q;
    q.abs_tol = 1e-15;
    return integrate([](double r) { return std::abs(r) < 1 ? std::exp(1.0 - 1.0 / (1.0 - r * r)) : 0.0; },
                     Window(-1.0, 1.0), q);
  }();
  static const double two = [] {
    QuadratureSpec q;
    q.abs_tol = 1e-15;
    return integrate(
        [](double r) { return std::abs(r) < 1 ? std::exp(2.0 - 2.0 / (1.0 - r * r)) : 0.0; },
        Window(-1.0, 1.0), q);
  }();
  return power == 1 ? one : two;
}

}  // namespace

Kernel::Kernel(KernelFamily family, long shift) : family_(std::move(family)), shift_(shift) {
  if (const auto* p = std::get_if<PowerLaw>(&family_)) {
    require(std::isfinite(p->alpha) && p->alpha > 0.5, "power-law kernel requires alpha > 1/2");
    require(p->alpha != 1.0, "alpha = 1 is excluded (log factor); use alpha in (1/2,1) or (1,inf)");
    require(std::isfinite(p->scale) && p->scale > 0.0, "power-law scale must be > 0");
    require(p->cutoff > 0.0, "power-law cutoff must be > 0");
  } else if (const auto* i = std::get_if<Indicator>(&family_)) {
    require(std::isfinite(i->lo) && std::isfinite(i->hi) && i->lo < i->hi,
            "indicator kernel requires lo < hi");
  } else {
    const auto& b = std::get<CompactBump>(family_);
    require(std::isfinite(b.center) && std::isfinite(b.halfwidth) && b.halfwidth > 0.0,
            "bump kernel requires halfwidth > 0");
  }
}

Kernel Kernel::power_law(double alpha, double scale, double cutoff) {
  return Kernel(PowerLaw{alpha, scale, cutoff});
}
Kernel Kernel::indicator(double lo, double hi) { return Kernel(Indicator{lo, hi}); }
Kernel Kernel::compact_bump(double center, double halfwidth) {
  return Kernel(CompactBump{center, halfwidth});
}

Kernel Kernel::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const auto args = colon == std::string::npos ? std::vector<double>{}
                                               : parse_numbers(text.substr(colon + 1), text);
  if (name == "powerlaw" || name == "power") {
    require(!args.empty() && args.size() <= 3, "powerlaw kernel takes alpha[,scale[,cutoff]]");
    return power_law(args[0], args.size() > 1 ? args[1] : 1.0, args.size() > 2 ? args[2] : kInf);
  }
  if (name == "indicator") {
    require(args.size() == 2, "indicator kernel takes lo,hi");
    return indicator(args[0], args[1]);
  }
  if (name == "bump") {
    require(args.size() == 2, "bump kernel takes center,halfwidth");
    return compact_bump(args[0], args[1]);
  }
  throw ValidationError("unknown kernel family '" + name + "' (expected powerlaw, indicator, bump)");
}

double Kernel::eval_power_law(const PowerLaw& p, double y) {
  const double r = std::abs(y);
  if (r > p.cutoff) return 0.0;
  const double t = 1.0 + r;
  if (p.alpha == 2.0) return p.scale / (t * t);
  if (p.alpha == 3.0) return p.scale / (t * t * t);
  return p.scale * std::pow(t, -p.alpha);
}

double Kernel::eval_bump(const CompactBump& b, double y) {
  const double r = (y - b.center) / b.halfwidth;
  if (std::abs(r) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - r * r));
}

double Kernel::decay_exponent() const {
  if (const auto* p = std::get_if<PowerLaw>(&family_)) return p->alpha;
  return kInf;
}

double Kernel::support_lo() const {
  if (const auto* p = std::get_if<PowerLaw>(&family_)) return -p->cutoff;
  if (const auto* i = std::get_if<Indicator>(&family_)) return i->lo;
  const auto& b = std::get<CompactBump>(family_);
  return b.center - b.halfwidth;
}

double Kernel::support_hi() const {
  if (const auto* p = std::get_if<PowerLaw>(&family_)) return p->cutoff;
  if (const auto* i = std::get_if<Indicator>(&family_)) return i->hi;
  const auto& b = std::get<CompactBump>(family_);
  return b.center + b.halfwidth;
}

std::vector<double> Kernel::breakpoints() const {
  const double u = static_cast<double>(shift_);
  std::vector<double> out;
  if (const auto* p = std::get_if<PowerLaw>(&family_)) {
    out.push_back(u);
    if (std::isfinite(p->cutoff)) {
      out.push_back(u - p->cutoff);
      out.push_back(u + p->cutoff);
    }
  } else if (const auto* i = std::get_if<Indicator>(&family_)) {
    out.push_back(u + i->lo);
    out.push_back(u + i->hi);
  } else {
    const auto& b = std::get<CompactBump>(family_);
    out.push_back(u + b.center - b.halfwidth);
    out.push_back(u + b.center);
    out.push_back(u + b.center + b.halfwidth);
  }
  return out;
}

Kernel Kernel::truncated(double radius) const {
  require(radius > 0.0, "truncation radius must be > 0");
  if (const auto* p = std::get_if<PowerLaw>(&family_)) {
    PowerLaw cut = *p;
    cut.cutoff = std::min(p->cutoff, radius);
    return Kernel(cut, shift_);
  }
  return *this;
}

double Kernel::l1_norm() const {
  if (const auto* p = std::get_if<PowerLaw>(&family_)) {
    if (!std::isfinite(p->cutoff)) return p->alpha > 1.0 ? 2.0 * p->scale / (p->alpha - 1.0) : kInf;
    return 2.0 * p->scale * (1.0 - std::pow(1.0 + p->cutoff, 1.0 - p->alpha)) / (p->alpha - 1.0);
  }
  if (const auto* i = std::get_if<Indicator>(&family_)) return i->hi - i->lo;
  return std::get<CompactBump>(family_).halfwidth * bump_unit_integral(1);
}

double Kernel::l2_norm_squared() const {
  if (const auto* p = std::get_if<PowerLaw>(&family_)) {
    const double s2 = p->scale * p->scale;
    const double e = 2.0 * p->alpha - 1.0;
    if (!std::isfinite(p->cutoff)) return 2.0 * s2 / e;
    return 2.0 * s2 * (1.0 - std::pow(1.0 + p->cutoff, -e)) / e;
  }
  if (const auto* i = std::get_if<Indicator>(&family_)) return i->hi - i->lo;
  return std::get<CompactBump>(family_).halfwidth * bump_unit_integral(2);
}

std::string Kernel::describe() const {
  std::ostringstream os;
  os.precision(12);
  if (const auto* p = std::get_if<PowerLaw>(&family_)) {
    os << "powerlaw:" << p->alpha << ',' << p->scale;
    if (std::isfinite(p->cutoff)) os << ',' << p->cutoff;
  } else if (const auto* i = std::get_if<Indicator>(&family_)) {
    os << "indicator:" << i->lo << ',' << i->hi;
  } else {
    const auto& b = std::get<CompactBump>(family_);
    os << "bump:" << b.center << ',' << b.halfwidth;
  }
  if (shift_ != 0) os << "@u=" << shift_;
  return os.str();
}

double envelope(double beta, long u, double x) {
  require(beta > 0.0, "envelope exponent beta must be > 0");
  return std::pow(1.0 + std::abs(x - static_cast<double>(u)), -beta);
}

double envelope_product_integral(double beta, std::span<const long> us, const QuadratureSpec& quad) {
  require(!us.empty(), "envelope product needs at least one shift");
  require(beta > 0.0, "envelope exponent beta must be > 0");
  const double k = static_cast<double>(us.size());
  require(beta * k > 1.0, "envelope product is not integrable: needs beta * k > 1");

  std::vector<double> shifts(us.begin(), us.end());
  std::sort(shifts.begin(), shifts.end());
  const double lo = shifts.front();
  const double hi = shifts.back();
  const double far = 1e5 * (1.0 + hi - lo);

  auto product = [&](double x) {
    double v = 1.0;
    for (double u : shifts) v *= std::pow(1.0 + std::abs(x - u), -beta);
    return v;
  };
  const double core = integrate(product, Window(lo - far, hi + far), quad, shifts);

  // Beyond the far edge, prod_k (1 + t + delta_k)^(-beta) is integrated as
  // (1 + t + mean delta)^(-k beta); the neglected term is O((spread/far)^2).
  auto tail = [&](bool right) {
    double mean = 0.0;
    for (double u : shifts) mean += right ? (hi - u) : (u - lo);
    mean /= k;
    return std::pow(1.0 + far + mean, 1.0 - k * beta) / (k * beta - 1.0);
  };
  return core + tail(true) + tail(false);
}

double envelope_inner(double gamma, long i, long j, Norm norm) {
  require(std::isfinite(gamma) && gamma > 0.5, "envelope_inner requires gamma > 1/2");
  require(gamma != 1.0, "gamma = 1 is excluded (log factor)");
  if (norm == Norm::Linf) {
    // The product is minimised in the interior of [i, j]; the supremum sits at x = i or x = j.
    return std::pow(1.0 + std::abs(static_cast<double>(i - j)), -gamma);
  }
  if (i == j) return 2.0 / (2.0 * gamma - 1.0);
  const long us[2] = {i, j};
  return envelope_product_integral(gamma, us);
}

int d_alpha(double alpha) {
  require(std::isfinite(alpha) && alpha > 0.5, "d_alpha requires alpha > 1/2");
  return static_cast<int>(std::floor(1.0 / (2.0 * alpha - 1.0))) + 1;
}

double tail_radius(const Kernel& psi, double tail_fraction) {
  require(tail_fraction > 0.0 && tail_fraction < 1.0, "tail fraction must be in (0,1)");
  if (const auto* p = std::get_if<PowerLaw>(&psi.family())) {
    // 2 int_L^inf (1+x)^(-2a) dx / (2/(2a-1)) = (1+L)^(1-2a)
    const double radius = std::pow(tail_fraction, 1.0 / (1.0 - 2.0 * p->alpha)) - 1.0;
    return std::min(std::max(radius, 1.0), p->cutoff);
  }
  return std::max(std::abs(psi.support_lo()), std::abs(psi.support_hi()));
}

Window covering_window(const Kernel& psi, long u_min, long u_max, double tail_fraction) {
  require(u_min <= u_max, "covering_window requires u_min <= u_max");
  if (psi.is_power_law()) {
    const double radius = tail_radius(psi, tail_fraction);
    return Window(static_cast<double>(u_min) - radius, static_cast<double>(u_max) + radius);
  }
  return Window(static_cast<double>(u_min) + psi.support_lo(),
                static_cast<double>(u_max) + psi.support_hi());
}

KernelModel effective_kernel(const Kernel& psi, double tail_fraction, double max_radius) {
  require(max_radius >= 1.0, "max kernel radius must be >= 1");
  if (const auto* p = std::get_if<PowerLaw>(&psi.family())) {
    const double radius = std::min(std::ceil(tail_radius(psi, tail_fraction)), max_radius);
    if (radius >= p->cutoff) return {psi, p->cutoff, 0.0};
    return {psi.truncated(radius), radius, std::pow(1.0 + radius, 1.0 - 2.0 * p->alpha)};
  }
  return {psi, tail_radius(psi, tail_fraction), 0.0};
}

}  // namespace pcl
