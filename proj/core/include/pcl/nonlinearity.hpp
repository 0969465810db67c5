#pragma once

#include <array>
#include <string>
#include <variant>
#include <vector>

namespace pcl {

// exp(-x^2 / 2)
struct GaussianBump {};

// cos(lambda x) exp(-x^2 / 2)
struct ModulatedGaussian {
  double lambda = 1.0;
};

// c0 + c1 x + c2 x^2 + c3 x^3
struct Polynomial {
  std::array<double, 4> coefficients{0.0, 1.0, 0.0, 0.0};
  int degree() const;
};

using NonlinearityFamily = std::variant<GaussianBump, ModulatedGaussian, Polynomial>;

class Nonlinearity {
 public:
  explicit Nonlinearity(NonlinearityFamily family, double gamma0 = 1.0, int m0 = 0);

  static Nonlinearity gaussian_bump() { return Nonlinearity(GaussianBump{}); }
  static Nonlinearity modulated_gaussian(double lambda) { return Nonlinearity(ModulatedGaussian{lambda}); }
  static Nonlinearity polynomial(std::array<double, 4> c) { return Nonlinearity(Polynomial{c}); }

  // "gauss", "modgauss:lambda", "poly:x", "poly:x^2", "poly:x^3", "poly:c0,c1[,c2[,c3]]".
  static Nonlinearity parse(const std::string& text);

  double operator()(double x) const;

  const NonlinearityFamily& family() const { return family_; }
  bool has_fourier() const { return !std::holds_alternative<Polynomial>(family_); }
  const Polynomial* polynomial_family() const { return std::get_if<Polynomial>(&family_); }

  // phi_hat(theta) = (1 / 2 pi) int phi(x) e^{-i theta x} dx, so that
  // phi(x) = int phi_hat(theta) e^{i theta x} d theta. Real and even here.
  double fourier(double theta) const;

  // Theta such that int_{|theta| > Theta} |phi_hat| < tail_mass.
  double fourier_cutoff(double tail_mass = 1e-8) const;

  // Regularity class tags; carried as metadata only.
  double gamma0() const { return gamma0_; }
  int m0() const { return m0_; }

  std::string describe() const;

 private:
  NonlinearityFamily family_;
  double gamma0_;
  int m0_;
};

// Quadrature rule in the frequency variable carrying phi_hat in its weights:
// int phi_hat(theta) f(theta) d theta ~ sum_k weights[k] f(nodes[k]).
struct ThetaGrid {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }

  // Trapezoid on [-Theta, Theta] with spacing close to `step`.
  static ThetaGrid trapezoid(const Nonlinearity& phi, double step = 0.25, double tail_mass = 1e-8);

  // Gauss-Hermite nodes for the weight exp(-theta^2 / 2), reweighted by phi_hat.
  static ThetaGrid gauss_hermite(const Nonlinearity& phi, int points = 32);
};

}  // namespace pcl
