#pragma once

#include <Eigen/Dense>
#include <functional>

namespace uvlc {

// Gaussian tail probability Q(x) = P(N(0,1) > x). Underflows to 0 near x ~ 38.
double gaussian_q(double x);

// ln Q(x), finite for all x where Q(x) > 0 mathematically; accurate to ~1e-13
// relative (in the log) out to x = 40 and beyond.
double log_gaussian_q(double x);

struct GaussHermite {
  // Physicists' convention: integral of exp(-x^2) f(x) dx ~ sum w_i f(x_i).
  Eigen::ArrayXd nodes;
  Eigen::ArrayXd weights;
};

// Nodes/weights via the Golub-Welsch tridiagonal eigenproblem.
GaussHermite gauss_hermite(int n);

// Adaptive Simpson on [a, b]; tol is an absolute tolerance on the result.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth = 48);

// Integral of g(x) against the Normal(mu, sigma2) density, adaptively refined.
// rel_tol is applied against the running magnitude of the integral.
double gaussian_expectation(const std::function<double(double)>& g, double mu,
                            double sigma2, double rel_tol = 1e-11);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Wilson score interval for a binomial proportion, z-quantile given explicitly
// (2.5758293035489004 for 99% two-sided).
Interval wilson_interval(double successes, double trials, double z);

inline constexpr double kZ99 = 2.5758293035489004;

} // namespace uvlc
