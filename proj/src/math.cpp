#include "uvlc/math.hpp"

#include <cmath>
#include <stdexcept>

namespace uvlc {

double gaussian_q(double x) { return 0.5 * std::erfc(x * M_SQRT1_2); }

namespace {

// Mills-ratio continued fraction, stable for large x:
//   Q(x) = phi(x) / (x + 1/(x + 2/(x + 3/(x + ...))))
double mills_denominator(double x, int terms) {
  double cf = 0.0;
  for (int k = terms; k >= 1; --k) cf = k / (x + cf);
  return x + cf;
}

} // namespace

double log_gaussian_q(double x) {
  if (x < 12.0) {
    double q = gaussian_q(x);
    if (q > 0.0) return std::log(q);
  }
  // log phi(x) - log denominator; 96 CF terms is far below 1e-15 at x >= 12
  double log_phi = -0.5 * x * x - 0.5 * std::log(2.0 * M_PI);
  return log_phi - std::log(mills_denominator(x, 96));
}

GaussHermite gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    double b = std::sqrt(i / 2.0);
    J(i, i - 1) = b;
    J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GaussHermite gh;
  gh.nodes = es.eigenvalues().array();
  double mu0 = std::sqrt(M_PI); // integral of exp(-x^2)
  gh.weights = mu0 * es.eigenvectors().row(0).array().square().transpose();
  return gh;
}

namespace {

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double b,
             double fa, double fm, double fb, double whole, double tol,
             int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(fa, flm, fm, m - a);
  double right = simpson(fm, frm, fb, b - m);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = simpson(fa, fm, fb, b - a);
  return adapt(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

double gaussian_expectation(const std::function<double(double)>& g, double mu,
                            double sigma2, double rel_tol) {
  if (sigma2 < 0.0)
    throw std::invalid_argument("gaussian_expectation: sigma2 < 0");
  if (sigma2 == 0.0) return g(mu);
  double sigma = std::sqrt(sigma2);
  double inv_norm = 1.0 / (sigma * std::sqrt(2.0 * M_PI));
  auto f = [&](double x) {
    double z = (x - mu) / sigma;
    return g(x) * inv_norm * std::exp(-0.5 * z * z);
  };
  // Split at the mean: the integrand is sharply peaked there and the split
  // keeps the adaptive bisection aligned with the peak.
  double span = 14.0 * sigma;
  double coarse = std::abs(adaptive_simpson(f, mu - span, mu, 1e-300, 8)) +
                  std::abs(adaptive_simpson(f, mu, mu + span, 1e-300, 8));
  double tol = std::max(coarse, 1e-300) * rel_tol;
  return adaptive_simpson(f, mu - span, mu, 0.5 * tol, 48) +
         adaptive_simpson(f, mu, mu + span, 0.5 * tol, 48);
}

Interval wilson_interval(double successes, double trials, double z) {
  if (trials <= 0.0) return {0.0, 1.0};
  double p = successes / trials;
  double z2 = z * z;
  double denom = 1.0 + z2 / trials;
  double center = (p + z2 / (2.0 * trials)) / denom;
  double half = z / denom *
                std::sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

} // namespace uvlc
