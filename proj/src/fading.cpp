#include "uvlc/fading.hpp"

#include <cmath>
#include <stdexcept>

#include "uvlc/math.hpp"

namespace uvlc {

double fading_pdf(double h, double sigma2_x) {
  if (h <= 0.0) return 0.0;
  double mu = fading_mu_x(sigma2_x);
  double z = std::log(h) - 2.0 * mu;
  return 1.0 / (2.0 * h * std::sqrt(2.0 * M_PI * sigma2_x)) *
         std::exp(-z * z / (8.0 * sigma2_x));
}

double scintillation_index(double sigma2_x) {
  return std::expm1(4.0 * sigma2_x);
}

double sample_fading(RandomStream& rng, double sigma2_x) {
  double x = fading_mu_x(sigma2_x) + std::sqrt(sigma2_x) * rng.gaussian();
  return std::exp(2.0 * x);
}

EquivalentLognormal lognormal_sum(const Eigen::ArrayXd& gains,
                                  const Eigen::ArrayXd& sigma2_x) {
  if (gains.size() != sigma2_x.size())
    throw std::invalid_argument("lognormal_sum: size mismatch");
  if ((gains < 0.0).any())
    throw std::invalid_argument("lognormal_sum: negative gain");
  EquivalentLognormal eq;
  double total = gains.sum();
  eq.mean = total;
  if (total <= 0.0) return eq;
  // Var[alpha] = sum_i G_i^2 (exp(4 sigma_i^2) - 1)
  double var = (gains.square() * (4.0 * sigma2_x).exp().unaryExpr(
                    [](double e) { return e - 1.0; })).sum();
  eq.sigma2_z = 0.25 * std::log1p(var / (total * total));
  eq.mu_z = 0.5 * std::log(total) - eq.sigma2_z;
  return eq;
}

FadingQuadrature fading_quadrature(int order, double mu, double sigma2) {
  GaussHermite gh = gauss_hermite(order);
  FadingQuadrature q;
  q.h = (2.0 * std::sqrt(2.0 * sigma2) * gh.nodes + 2.0 * mu).exp();
  q.weight = gh.weights / std::sqrt(M_PI);
  return q;
}

} // namespace uvlc
