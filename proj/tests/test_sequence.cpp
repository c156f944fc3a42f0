#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "uvlc/ber_analytic.hpp"
#include "uvlc/math.hpp"
#include "uvlc/scenario.hpp"
#include "uvlc/sequence_detection.hpp"

using namespace uvlc;

namespace {

// Same pinned link as the analytic BER tests: 1 Gbps, fixed background power,
// so sigma2_tc and the responsivity have frozen reference values.
Scenario pinned_scenario() {
  Scenario s;
  s.name = "pinned";
  s.water = water_preset("clear-ocean");
  s.modem.bit_rate = 1e9;
  s.noise.background_power = 1e-9;
  s.fading.sigma2_x = 0.0;
  return s;
}

// All mass in one vanishing bin at t = 0: the transmit pulses become clean
// rectangles and the link is free of intersymbol interference.
FfirHistogram delta_ffir(double mass) {
  FfirHistogram f;
  f.t0 = 0.0;
  f.bin_width = 1e-20;
  f.mass = Eigen::ArrayXd(1);
  f.mass << mass;
  f.source_photons = 1;
  return f;
}

// Two equal bins of half a chip each: a ramp-up/ramp-down pulse whose sample
// values are exact rationals times the peak amplitude.
FfirHistogram ramp_ffir() {
  FfirHistogram f;
  f.t0 = 0.0;
  f.bin_width = 0.25e-9;
  f.mass = Eigen::ArrayXd(2);
  f.mass << 0.5, 0.5;
  f.source_photons = 1;
  return f;
}

} // namespace

TEST_CASE("detector names round-trip") {
  CHECK(detector_from_string("sbsd") == DetectorKind::sbsd);
  CHECK(detector_from_string("gmsd") == DetectorKind::gmsd);
  CHECK(detector_from_string("msd") == DetectorKind::msd);
  CHECK(to_string(DetectorKind::sbsd) == "sbsd");
  CHECK(to_string(DetectorKind::gmsd) == "gmsd");
  CHECK(to_string(DetectorKind::msd) == "msd");
  CHECK_THROWS_AS((void)detector_from_string("mlsd"), std::invalid_argument);
}

TEST_CASE("waveform model turns the delta channel into rectangles") {
  const Scenario s = pinned_scenario();
  const double mass = 1e-5;
  WaveformModel wm = build_waveform_model(s, delta_ffir(mass), 0.25, 32);

  CHECK(wm.dt == doctest::Approx(0.5e-9 / 32).epsilon(1e-14));
  CHECK(wm.samples_per_bit == 64);
  // sqrt(sigma2_tc / (chip * dt)) for the pinned front end.
  CHECK(wm.sigma_sample ==
        doctest::Approx(2.2638430111606318e-6).epsilon(1e-12));
  // Two chips plus a vanishing span: 64 samples + 2 guard samples.
  REQUIRE(wm.proto_len == 66);
  CHECK(wm.memory == 1);

  const double level = 1.7163477498679126e-6; // 2 R P * mass
  for (int m = 0; m < 32; ++m) {
    CHECK(wm.proto0[m] == doctest::Approx(level).epsilon(1e-12));
    CHECK(wm.proto1[m] == 0.0);
    CHECK(wm.proto0[32 + m] == 0.0);
    CHECK(wm.proto1[32 + m] == doctest::Approx(level).epsilon(1e-12));
  }
  CHECK(wm.proto0[65] == 0.0);
  CHECK(wm.proto1[65] == 0.0);

  CHECK_THROWS_AS((void)build_waveform_model(s, delta_ffir(mass), 0.25, 3),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)build_waveform_model(s, delta_ffir(mass), 0.25, 257),
                  std::invalid_argument);
}

TEST_CASE("waveform model convolves a spread response correctly") {
  const Scenario s = pinned_scenario();
  const double P = 0.25;
  WaveformModel wm = build_waveform_model(s, ramp_ffir(), P, 32);
  const double amp = 2.0 * 0.3432695499735825 * P;

  // proto0[m] = amp * (F(t) - F(t - chip)) at t = (m + 0.5) dt, where F is
  // the piecewise-linear cumulative of two equal half-chip bins.
  CHECK(wm.proto0[0] == doctest::Approx(amp * 0.015625).epsilon(1e-12));
  // m = 48: F(t) saturated at 1, F(t - chip) = 0.5 + 0.5 * (0.5 / 16).
  CHECK(wm.proto0[48] == doctest::Approx(amp * 0.484375).epsilon(1e-12));
  // Midpoint sums are exact for piecewise-linear integrands: the pulse area
  // equals amp * chip * total_mass for both pulse positions.
  const double area = amp * 0.5e-9 * 1.0;
  CHECK(wm.proto0.sum() * wm.dt == doctest::Approx(area).epsilon(1e-12));
  CHECK(wm.proto1.sum() * wm.dt == doctest::Approx(area).epsilon(1e-12));
  // The second pulse is the first shifted by one chip.
  CHECK(wm.proto1[32] == doctest::Approx(wm.proto0[0]).epsilon(1e-12));
  CHECK(wm.proto1[80] == doctest::Approx(wm.proto0[48]).epsilon(1e-12));
}

TEST_CASE("genie-aided detection at high signal level makes no errors") {
  const Scenario s = pinned_scenario();
  FfirHistogram f = delta_ffir(1e-5);

  SequenceDetectorConfig det;
  det.kind = DetectorKind::gmsd;
  det.window = 4;
  det.fixed_gain = 1.0;

  SequenceRunConfig run;
  run.seed = 2;
  run.max_bits = 5000;
  run.target_errors = 1000000;

  // Decision argument ~ 12 standard deviations: any error would be a bug.
  SequenceSimResult res = simulate_sequence_ber(s, f, 1.0, det, run);
  CHECK(res.bits == 5088); // 53 bursts of 24 windows x 4 bits
  CHECK(res.errors == 0);
  CHECK(res.ber == 0.0);
  CHECK(res.fallback_windows == 0);
  CHECK(res.bursts == 53);
}

TEST_CASE("window-1 sequence detectors reproduce symbol-by-symbol decisions") {
  const Scenario s = pinned_scenario();
  FfirHistogram f = delta_ffir(1e-5);
  const double P = 0.25; // decision argument 3.03, BER about 1.2e-3

  SequenceRunConfig run;
  run.seed = 9;
  run.max_bits = 100000;
  run.target_errors = 1000000;

  SequenceDetectorConfig sbsd;
  sbsd.kind = DetectorKind::sbsd;
  sbsd.window = 1;
  SequenceSimResult base = simulate_sequence_ber(s, f, P, sbsd, run);

  REQUIRE(base.bits == 100008);
  REQUIRE(base.errors > 0);
  CHECK(base.ber == doctest::Approx(double(base.errors) / base.bits));
  CHECK(base.ci99.lo <= base.ber);
  CHECK(base.ci99.hi >= base.ber);

  // On a channel without intersymbol interference the window-1 quadratic
  // metric ranks candidates exactly like the per-bit comparator (falling
  // back to it when no candidate has positive matched output), and the
  // window-1 sequence likelihood is a monotone map of the same statistic.
  // All three runs share the per-burst bit and noise streams, so the
  // decisions must agree bit for bit.
  SequenceDetectorConfig gmsd = sbsd;
  gmsd.kind = DetectorKind::gmsd;
  SequenceSimResult g = simulate_sequence_ber(s, f, P, gmsd, run);
  CHECK(g.bits == base.bits);
  CHECK(g.errors == base.errors);
  CHECK(g.ber == doctest::Approx(base.ber));

  SequenceDetectorConfig msd = sbsd;
  msd.kind = DetectorKind::msd;
  SequenceSimResult m = simulate_sequence_ber(s, f, P, msd, run);
  CHECK(m.bits == base.bits);
  CHECK(m.errors == base.errors);

  // The same closed form the analytic path uses: Q(P * 2 R mass Tc /
  // sqrt(2 sigma2_tc)) at P = 0.25. The waveform estimate must bracket it.
  const double reference = 0.0012121760775309124;
  CHECK(base.ci99.lo < reference);
  CHECK(base.ci99.hi > reference);
}

TEST_CASE("windows without usable signal fall back to symbol decisions") {
  const Scenario s = pinned_scenario();
  FfirHistogram f = delta_ffir(1e-5);

  SequenceDetectorConfig det;
  det.kind = DetectorKind::gmsd;
  det.window = 2;

  SequenceRunConfig run;
  run.seed = 4;
  run.max_bits = 240;
  run.target_errors = 1000000;

  SUBCASE("zero power rejects every candidate") {
    SequenceSimResult res = simulate_sequence_ber(s, f, 0.0, det, run);
    // All template energies are zero, so every window must take the
    // fallback path, and pure noise decisions are coin flips.
    CHECK(res.fallback_windows == res.bits / det.window);
    CHECK(res.ber > 0.25);
    CHECK(res.ber < 0.75);
  }

  SUBCASE("vanishing power falls back only on uninformative windows") {
    // A 1e-30 W signal is drowned by noise: about a quarter of the windows
    // show nonpositive matched output for every candidate.
    SequenceSimResult res = simulate_sequence_ber(s, f, 1e-30, det, run);
    CHECK(res.fallback_windows > 0);
    CHECK(res.fallback_windows < res.bits / det.window);
  }
}

TEST_CASE("error rate decreases with transmit power under fading") {
  Scenario s = pinned_scenario();
  s.fading.sigma2_x = 0.16;
  FfirHistogram f = delta_ffir(1e-5);

  SequenceDetectorConfig det;
  det.kind = DetectorKind::gmsd;
  det.window = 2;

  SequenceRunConfig run;
  run.seed = 6;
  run.max_bits = 30000;
  run.target_errors = 400;

  SequenceSimResult lo = simulate_sequence_ber(s, f, 0.15, det, run);
  SequenceSimResult hi = simulate_sequence_ber(s, f, 0.45, det, run);
  CHECK(lo.errors > 0);
  CHECK(hi.ber < lo.ber);
}

TEST_CASE("cost and layout guards") {
  const Scenario s = pinned_scenario();
  FfirHistogram f = delta_ffir(1e-5);
  SequenceRunConfig run;

  SequenceDetectorConfig det;
  det.kind = DetectorKind::gmsd;
  det.window = 13;
  CHECK_THROWS_AS((void)simulate_sequence_ber(s, f, 0.25, det, run),
                  CostGuardError);

  det.kind = DetectorKind::msd;
  det.window = 9;
  CHECK_THROWS_AS((void)simulate_sequence_ber(s, f, 0.25, det, run),
                  CostGuardError);

  Scenario mimo = pinned_scenario();
  mimo.layout.rx_count = 3;
  det.kind = DetectorKind::sbsd;
  det.window = 1;
  CHECK_THROWS_AS((void)simulate_sequence_ber(mimo, f, 0.25, det, run),
                  std::invalid_argument);
}
