#pragma once

#include <Eigen/Dense>

#include "uvlc/rng.hpp"

namespace uvlc {

// Turbulence-induced fading of the received optical power, modeled as a
// unit-mean lognormal: h = exp(2X) with X ~ N(mu_x, sigma2_x) and
// mu_x = -sigma2_x so that E[h] = 1.

inline double fading_mu_x(double sigma2_x) { return -sigma2_x; }

// Probability density of h > 0.
double fading_pdf(double h, double sigma2_x);

// Scintillation index sigma_I^2 = Var[h]/E[h]^2 = exp(4 sigma2_x) - 1.
double scintillation_index(double sigma2_x);

// One fading draw.
double sample_fading(RandomStream& rng, double sigma2_x);

// Moment-matched single lognormal approximating a nonnegative-weighted sum
// of independent unit-mean lognormal fades, alpha = sum_i G_i h_i.
// alpha ~ exp(2Z), Z ~ N(mu_z, sigma2_z); first two moments of alpha are
// matched exactly, so E[alpha] = sum_i G_i is preserved.
struct EquivalentLognormal {
  double mu_z = 0.0;
  double sigma2_z = 0.0;
  double mean = 0.0; // sum of gains
};

EquivalentLognormal lognormal_sum(const Eigen::ArrayXd& gains,
                                  const Eigen::ArrayXd& sigma2_x);

// Gauss-Hermite nodes mapped onto fading realizations:
// h_q = exp(2 sqrt(2 sigma2) x_q + 2 mu), weight_q = w_q / sqrt(pi).
// Weights sum to 1, and sum_q weight_q h_q reproduces E[h] to quadrature
// accuracy.
struct FadingQuadrature {
  Eigen::ArrayXd h;
  Eigen::ArrayXd weight;
};

FadingQuadrature fading_quadrature(int order, double mu, double sigma2);

inline FadingQuadrature unit_fading_quadrature(int order, double sigma2_x) {
  return fading_quadrature(order, fading_mu_x(sigma2_x), sigma2_x);
}

} // namespace uvlc
