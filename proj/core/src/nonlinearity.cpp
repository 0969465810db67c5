#include "pcl/nonlinearity.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pcl/errors.hpp"

namespace pcl {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

double gauss_hat(double theta) { return kInvSqrt2Pi * std::exp(-0.5 * theta * theta); }

double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ValidationError("cannot parse number '" + s + "'");
  }
  require(used == s.size(), "trailing characters in number '" + s + "'");
  return v;
}

}  // namespace

int Polynomial::degree() const {
  for (int k = 3; k >= 0; --k)
    if (coefficients[static_cast<std::size_t>(k)] != 0.0) return k;
  return 0;
}

Nonlinearity::Nonlinearity(NonlinearityFamily family, double gamma0, int m0)
    : family_(std::move(family)), gamma0_(gamma0), m0_(m0) {
  if (const auto* m = std::get_if<ModulatedGaussian>(&family_))
    require(std::isfinite(m->lambda), "modgauss lambda must be finite");
  if (const auto* p = std::get_if<Polynomial>(&family_))
    for (double c : p->coefficients) require(std::isfinite(c), "polynomial coefficients must be finite");
}

Nonlinearity Nonlinearity::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (name == "gauss") {
    require(args.empty(), "gauss takes no parameters");
    return gaussian_bump();
  }
  if (name == "modgauss") {
    require(!args.empty(), "modgauss needs a frequency: modgauss:lambda");
    return modulated_gaussian(parse_number(args));
  }
  if (name == "poly") {
    if (args == "x") return polynomial({0, 1, 0, 0});
    if (args == "x^2") return polynomial({0, 0, 1, 0});
    if (args == "x^3") return polynomial({0, 0, 0, 1});
    std::array<double, 4> c{0, 0, 0, 0};
    std::stringstream ss(args);
    std::string item;
    std::size_t k = 0;
    while (std::getline(ss, item, ',')) {
      require(k < 4, "polynomial degree is limited to 3");
      c[k++] = parse_number(item);
    }
    require(k >= 1, "poly needs coefficients: poly:c0,c1[,c2[,c3]]");
    return polynomial(c);
  }
  throw ValidationError("unknown nonlinearity '" + text + "' (expected gauss, modgauss:l, poly:...)");
}

double Nonlinearity::operator()(double x) const {
  if (std::holds_alternative<GaussianBump>(family_)) return std::exp(-0.5 * x * x);
  if (const auto* m = std::get_if<ModulatedGaussian>(&family_))
    return std::cos(m->lambda * x) * std::exp(-0.5 * x * x);
  const auto& c = std::get<Polynomial>(family_).coefficients;
  return c[0] + x * (c[1] + x * (c[2] + x * c[3]));
}

double Nonlinearity::fourier(double theta) const {
  if (std::holds_alternative<GaussianBump>(family_)) return gauss_hat(theta);
  if (const auto* m = std::get_if<ModulatedGaussian>(&family_))
    return 0.5 * (gauss_hat(theta - m->lambda) + gauss_hat(theta + m->lambda));
  throw ValidationError("polynomial nonlinearity has no Fourier representation");
}

double Nonlinearity::fourier_cutoff(double tail_mass) const {
  require(tail_mass > 0.0 && tail_mass < 1.0, "tail mass must lie in (0,1)");
  // Two-sided Gaussian tail: erfc(Theta / sqrt 2) = tail_mass.
  const double base = std::numbers::sqrt2 * boost::math::erfc_inv(tail_mass);
  if (std::holds_alternative<GaussianBump>(family_)) return base;
  if (const auto* m = std::get_if<ModulatedGaussian>(&family_)) return base + std::abs(m->lambda);
  throw ValidationError("polynomial nonlinearity has no Fourier representation");
}

std::string Nonlinearity::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (std::holds_alternative<GaussianBump>(family_)) {
    os << "gauss";
  } else if (const auto* m = std::get_if<ModulatedGaussian>(&family_)) {
    os << "modgauss:" << m->lambda;
  } else {
    const auto& c = std::get<Polynomial>(family_).coefficients;
    os << "poly:" << c[0] << ',' << c[1] << ',' << c[2] << ',' << c[3];
  }
  return os.str();
}

ThetaGrid ThetaGrid::trapezoid(const Nonlinearity& phi, double step, double tail_mass) {
  require(step > 0.0, "theta step must be positive");
  const double cut = phi.fourier_cutoff(tail_mass);
  const int half = static_cast<int>(std::ceil(cut / step));
  const double h = cut / half;
  ThetaGrid g;
  for (int k = -half; k <= half; ++k) {
    const double t = k * h;
    const double w = (std::abs(k) == half ? 0.5 : 1.0) * h;
    g.nodes.push_back(t);
    g.weights.push_back(w * phi.fourier(t));
  }
  return g;
}

ThetaGrid ThetaGrid::gauss_hermite(const Nonlinearity& phi, int points) {
  require(points >= 2 && points <= 200, "Gauss-Hermite order must lie in [2, 200]");
  // Golub-Welsch for the probabilists' Hermite weight exp(-t^2/2) / sqrt(2 pi):
  // Jacobi matrix with zero diagonal and off-diagonal sqrt(k).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(points, points);
  for (int k = 1; k < points; ++k) jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(double(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  ThetaGrid g;
  for (int k = 0; k < points; ++k) {
    const double t = eig.eigenvalues()(k);
    const double v = eig.eigenvectors()(0, k);
    // Probability weight v^2; phi_hat / standard normal density rescales it.
    g.nodes.push_back(t);
    g.weights.push_back(v * v * phi.fourier(t) / gauss_hat(t));
  }
  return g;
}

}  // namespace pcl
