#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "uvlc/ber_photon_counting.hpp"
#include "uvlc/scenario.hpp"

using namespace uvlc;

namespace {

Scenario pinned_scenario() {
  Scenario s;
  s.name = "pinned";
  s.water = water_preset("clear-ocean");
  s.modem.bit_rate = 1e9;
  s.noise.background_power = 1e-9;
  s.fading.sigma2_x = 0.16;
  return s;
}

FfirHistogram delta_ffir(double mass) {
  FfirHistogram f;
  f.t0 = 0.0;
  f.bin_width = 1e-20;
  f.mass = Eigen::ArrayXd(1);
  f.mass << mass;
  f.source_photons = 1;
  return f;
}

} // namespace

TEST_CASE("exact lattice tail against reference sums") {
  // scipy double sums: P(Poisson(m_p) - Poisson(m_m) + N(0, 2v) > 0).
  CHECK(exact_tail({25.0, 10.0, 100.0}) ==
        doctest::Approx(3.480596262285557e-14).epsilon(1e-8));
  CHECK(exact_tail({2.0, 0.0, 10.0}) ==
        doctest::Approx(0.0018038205119041042).epsilon(1e-9));
  CHECK(exact_tail({0.5, 3.0, 9.0}) ==
        doctest::Approx(0.04392720081326452).epsilon(1e-9));
  CHECK(exact_tail({1e4, 50.0, 600.0}) ==
        doctest::Approx(6.464464319877263e-05).epsilon(1e-8));
  // Symmetric statistic: the tail is exactly one half.
  CHECK(exact_tail({5.0, 5.0, 5.0}) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("saddle point solves the stationarity condition") {
  for (SaddleProblem p : {SaddleProblem{25.0, 10.0, 100.0},
                          SaddleProblem{1.56e6, 500.0, 9000.0},
                          SaddleProblem{0.5, 3.0, 9.0},
                          SaddleProblem{2.0, 0.0, 10.0}}) {
    SaddleSolution sol = solve_saddle(p);
    CHECK(sol.s > 0.0);
    double d1 = 2.0 * p.v * sol.s + p.m_p * std::exp(sol.s) -
                p.m_m * std::exp(-sol.s) - 1.0 / sol.s;
    // Residual scaled by the local curvature: the Newton tolerance.
    CHECK(std::abs(d1) / sol.phi2 < 1e-9);
    CHECK(sol.phi2 > 0.0);
  }
  CHECK_THROWS_AS(solve_saddle({0.0, 0.0, 5.0}), std::invalid_argument);
}

TEST_CASE("saddle approximation tracks the exact tail within five percent") {
  // Operating points spanning 1e-8 .. 1e-1 conditional error rates.
  for (SaddleProblem p : {SaddleProblem{1.56e6, 0.0, 4000.0},
                          SaddleProblem{1.56e6, 0.0, 7000.0},
                          SaddleProblem{1.56e6, 500.0, 9000.0},
                          SaddleProblem{100.0, 50.0, 150.0},
                          SaddleProblem{25.0, 10.0, 60.0},
                          SaddleProblem{0.5, 3.0, 9.0}}) {
    double exact = exact_tail(p);
    REQUIRE(exact > 1e-9);
    REQUIRE(exact < 0.2);
    double approx = saddle_tail(p);
    CHECK(std::abs(approx - exact) / exact < 0.05);
  }
}

TEST_CASE("log tail stays finite far beyond double underflow") {
  double lt = log_saddle_tail({1e6, 0.0, 1e6});
  CHECK(std::isfinite(lt));
  CHECK(lt < -1e4);
  // A symmetric problem has exact tail 1/2; the asymptotic estimate lands
  // close below and the clamp keeps it a valid probability.
  double sym = saddle_tail({5.0, 5.0, 5.0});
  CHECK(sym <= 0.5);
  CHECK(sym > 0.4);
}

TEST_CASE("counting model carries pinned noise counts") {
  Scenario s = pinned_scenario();
  std::vector<FfirHistogram> ffir = {delta_ffir(1e-5)};
  CountingBerModel m = build_counting_model(s, ffir);
  CHECK(m.v == doctest::Approx(1559769.7488466199).epsilon(1e-12));
  // (background + dark) photoelectrons per half-bit window.
  CHECK(m.m_bd == doctest::Approx(4.897305068217536).epsilon(1e-12));

  Scenario s2 = pinned_scenario();
  s2.layout.rx_count = 2;
  s2.layout.spacing = 0.25;
  std::vector<FfirHistogram> two(2, delta_ffir(1e-5));
  CountingBerModel m2 = build_counting_model(s2, two);
  // Each receiver adds its own thermal noise and dark current; the summed
  // output doubles both. Background power is a whole-array quantity.
  CHECK(m2.v == doctest::Approx(2.0 * 1559769.7488466199).epsilon(1e-12));
  double dark = 7652090125.288895, bg = 2142520011.1461778;
  CHECK(m2.m_bd == doctest::Approx((bg + 2.0 * dark) * 0.5e-9).epsilon(1e-10));
}

TEST_CASE("conditional counting error matches hand-assembled problems") {
  Scenario s = pinned_scenario();
  std::vector<FfirHistogram> ffir = {delta_ffir(1e-5)};
  CountingBerModel m = build_counting_model(s, ffir);

  // Signal counts at 0.5 W: P * 2 R mass Tc / q.
  const double sig = 0.5 * 21.42520011146178 / 1e-3;
  const double m_bd = 4.897305068217536;
  const double v = 1559769.7488466199;
  // Both bit hypotheses assemble to the same problem on this symmetric
  // channel: noise-only counts against signal-plus-noise counts.
  double by_hand = exact_tail({v, m_bd, sig + m_bd});
  Eigen::ArrayXd ones = Eigen::ArrayXd::Ones(1);
  double brute = counting_conditional_ber(m, ones, 0.5, true);
  CHECK(brute == doctest::Approx(by_hand).epsilon(1e-9));

  double fast = counting_conditional_ber(m, ones, 0.5, false);
  CHECK(std::abs(fast - brute) / brute < 0.05);
}

TEST_CASE("fading averages are consistent across methods") {
  Scenario s = pinned_scenario();
  std::vector<FfirHistogram> ffir = {delta_ffir(1e-5)};
  CountingBerModel m = build_counting_model(s, ffir);
  const double p = 0.4; // deep enough for a meaningful averaged tail

  BerEstimate g = counting_ber(m, p, FadingAverage::ghqf);
  BerEstimate q = counting_ber(m, p, FadingAverage::quadrature);
  CHECK(g.ber > 0.0);
  CHECK(std::abs(g.ber - q.ber) / q.ber < 1e-3);

  // For one link the collapsed lognormal is the same integral as the tensor
  // average, node for node.
  BerEstimate ls = counting_ber(m, p, FadingAverage::lognormal_sum);
  CHECK(ls.ber == doctest::Approx(g.ber).epsilon(1e-10));

  AveragingOptions mco;
  mco.mc_draws = 100000;
  mco.seed = 3;
  BerEstimate mc = counting_ber(m, p, FadingAverage::monte_carlo, mco);
  CHECK(std::abs(mc.ber - q.ber) < 5.0 * mc.std_error);
}

TEST_CASE("counting cost guard matches the gaussian model") {
  Scenario s = pinned_scenario();
  s.layout.rx_count = 5;
  s.layout.spacing = 0.25;
  std::vector<FfirHistogram> ffir(5, delta_ffir(1e-5));
  CountingBerModel m = build_counting_model(s, ffir);
  CHECK_THROWS_AS(counting_ber(m, 0.25, FadingAverage::ghqf), CostGuardError);
}
