#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "uvlc/fading.hpp"
#include "uvlc/math.hpp"

using namespace uvlc;

TEST_CASE("scintillation index matches the lognormal moment identity") {
  CHECK(scintillation_index(0.16) ==
        doctest::Approx(0.8964808793049514).epsilon(1e-14));
  CHECK(scintillation_index(0.0) == doctest::Approx(0.0));
  CHECK(scintillation_index(0.04) ==
        doctest::Approx(std::expm1(0.16)).epsilon(1e-14));
}

TEST_CASE("density is normalized with unit mean") {
  const double s2 = 0.16;
  CHECK(fading_pdf(1.0, s2) ==
        doctest::Approx(0.46033767537915415).epsilon(1e-13));
  CHECK(fading_pdf(0.0, s2) == doctest::Approx(0.0));
  CHECK(fading_pdf(-1.0, s2) == doctest::Approx(0.0));

  // Piecewise panels keep the adaptive rule's probe points on the density
  // bump; the final panel reaches far enough that the tail is below 1e-12.
  auto integral = [](auto f) {
    const double cuts[] = {1e-9, 1.0, 8.0, 60.0, 1000.0};
    double total = 0.0;
    for (int i = 0; i + 1 < 5; ++i)
      total += adaptive_simpson(f, cuts[i], cuts[i + 1], 1e-13);
    return total;
  };
  double norm = integral([&](double h) { return fading_pdf(h, s2); });
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-9));
  double mean = integral([&](double h) { return h * fading_pdf(h, s2); });
  CHECK(mean == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("sampled fades reproduce the first two moments") {
  const double s2 = 0.16;
  RandomStream rng(31, StreamDomain::fading, 0);
  const int n = 400000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    double h = sample_fading(rng, s2);
    CHECK(h > 0.0);
    sum += h;
    sumsq += h * h;
  }
  double mean = sum / n;
  double m2 = sumsq / n;
  // sd(mean) = sqrt(sigma_I^2 / n) ~ 1.5e-3; allow 5 sigma.
  CHECK(std::abs(mean - 1.0) < 5.0 * std::sqrt(0.8964808793049514 / n));
  CHECK(m2 == doctest::Approx(std::exp(4.0 * s2)).epsilon(0.03));
}

TEST_CASE("quadrature weights are a probability measure with unit mean") {
  for (double s2 : {0.04, 0.16, 0.5}) {
    FadingQuadrature q = unit_fading_quadrature(30, s2);
    REQUIRE(q.h.size() == 30);
    CHECK(q.weight.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((q.weight > 0.0).all());
    CHECK((q.h > 0.0).all());
    CHECK((q.weight * q.h).sum() == doctest::Approx(1.0).epsilon(1e-10));
    // Second moment is exp(4 s2); quadrature nails lognormal polynomials in
    // exp(x) less exactly, so keep a looser band.
    CHECK((q.weight * q.h * q.h).sum() ==
          doctest::Approx(std::exp(4.0 * s2)).epsilon(1e-6));
  }
}

TEST_CASE("quadrature converges as the order grows") {
  const double s2 = 0.16;
  auto third_moment = [&](int order) {
    FadingQuadrature q = unit_fading_quadrature(order, s2);
    return (q.weight * q.h * q.h * q.h).sum();
  };
  // E[h^3] = E[exp(6X)] = exp(6 mu + 18 s2) with mu = -s2.
  const double exact = std::exp(12.0 * s2);
  double e10 = std::abs(third_moment(10) - exact);
  double e30 = std::abs(third_moment(30) - exact);
  double e60 = std::abs(third_moment(60) - exact);
  CHECK(e30 < e10);
  CHECK(e60 <= e30 * 1.01);
  CHECK(third_moment(60) == doctest::Approx(exact).epsilon(1e-8));
}

TEST_CASE("single-link lognormal sum is exact") {
  Eigen::ArrayXd gains(1), s2(1);
  gains << 3.5;
  s2 << 0.16;
  EquivalentLognormal eq = lognormal_sum(gains, s2);
  CHECK(eq.mean == doctest::Approx(3.5));
  CHECK(eq.sigma2_z == doctest::Approx(0.16).epsilon(1e-12));
  CHECK(eq.mu_z == doctest::Approx(0.5 * std::log(3.5) - 0.16).epsilon(1e-12));
}

TEST_CASE("two equal links halve the equivalent variance") {
  Eigen::ArrayXd gains(2), s2(2);
  gains << 1.0, 1.0;
  s2 << 0.16, 0.16;
  EquivalentLognormal eq = lognormal_sum(gains, s2);
  CHECK(eq.mean == doctest::Approx(2.0));
  CHECK(eq.sigma2_z == doctest::Approx(0.09258733241564725).epsilon(1e-12));
  CHECK(eq.mu_z == doctest::Approx(0.2539862578643254).epsilon(1e-12));
  // Moment check: E[alpha] and E[alpha^2] of the equivalent lognormal.
  double m1 = std::exp(2.0 * eq.mu_z + 2.0 * eq.sigma2_z);
  double m2 = std::exp(4.0 * eq.mu_z + 8.0 * eq.sigma2_z);
  CHECK(m1 == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(m2 == doctest::Approx(2.0 * std::exp(0.64) + 2.0).epsilon(1e-12));
}

TEST_CASE("degenerate lognormal sums stay well defined") {
  Eigen::ArrayXd gains(2), s2(2);
  gains << 0.0, 0.0;
  s2 << 0.16, 0.16;
  EquivalentLognormal eq = lognormal_sum(gains, s2);
  CHECK(eq.mean == doctest::Approx(0.0));

  Eigen::ArrayXd bad(1), bs(1);
  bad << -1.0;
  bs << 0.16;
  CHECK_THROWS_AS(lognormal_sum(bad, bs), std::invalid_argument);
  Eigen::ArrayXd g1(1), s3(3);
  g1 << 1.0;
  s3 << 0.1, 0.1, 0.1;
  CHECK_THROWS_AS(lognormal_sum(g1, s3), std::invalid_argument);
}

TEST_CASE("monte carlo sum agrees with the matched lognormal quantiles") {
  // Sum of three unequal links: the matched lognormal should track the
  // simulated mean exactly and the variance through the second moment.
  Eigen::ArrayXd gains(3), s2(3);
  gains << 1.0, 0.5, 0.25;
  s2 << 0.16, 0.16, 0.16;
  EquivalentLognormal eq = lognormal_sum(gains, s2);
  RandomStream rng(77, StreamDomain::fading, 1);
  const int n = 300000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    double a = 0.0;
    for (int l = 0; l < 3; ++l) a += gains[l] * sample_fading(rng, s2[l]);
    sum += a;
    sumsq += a * a;
  }
  double mean = sum / n;
  double var = sumsq / n - mean * mean;
  double eq_var = eq.mean * eq.mean * std::expm1(4.0 * eq.sigma2_z);
  CHECK(mean == doctest::Approx(eq.mean).epsilon(0.01));
  CHECK(var == doctest::Approx(eq_var).epsilon(0.05));
}
