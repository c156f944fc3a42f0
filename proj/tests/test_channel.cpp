#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <vector>

#include "uvlc/channel.hpp"

using namespace uvlc;

namespace {

// Three-bin histogram with unit bin width and masses 1/2, 1/4, 1/4.
// Every cumulative below is an exact rational, worked out by hand from the
// piecewise-constant density.
FfirHistogram make_tri() {
  FfirHistogram f;
  f.t0 = 10.0;
  f.bin_width = 1.0;
  f.mass = Eigen::ArrayXd(3);
  f.mass << 0.5, 0.25, 0.25;
  f.source_photons = 1000;
  return f;
}

std::vector<DetectedPhoton> three_photons() {
  // Arrival times 1, 2, 4 s; weights 0.5, 0.25, 0.25.
  return {{1.0, 0, 0, 0, 0.5}, {2.0, 0, 0, 0, 0.25}, {4.0, 0, 0, 0, 0.25}};
}

} // namespace

TEST_CASE("cumulative is exact piecewise linear") {
  FfirHistogram f = make_tri();
  CHECK(f.cumulative(-1.0) == doctest::Approx(0.0));
  CHECK(f.cumulative(0.5) == doctest::Approx(0.25));
  CHECK(f.cumulative(1.0) == doctest::Approx(0.5));
  CHECK(f.cumulative(1.5) == doctest::Approx(0.625));
  CHECK(f.cumulative(2.5) == doctest::Approx(0.875));
  CHECK(f.cumulative(3.0) == doctest::Approx(1.0));
  CHECK(f.cumulative(99.0) == doctest::Approx(1.0));
}

TEST_CASE("cumulative2 is exact piecewise quadratic") {
  FfirHistogram f = make_tri();
  CHECK(f.cumulative2(0.0) == doctest::Approx(0.0));
  // int_0^1 0.5 u du = 0.25
  CHECK(f.cumulative2(1.0) == doctest::Approx(0.25));
  // + int_1^2 (0.5 + 0.25 (u-1)) du = 0.625
  CHECK(f.cumulative2(2.0) == doctest::Approx(0.875));
  // + int_2^2.5 (0.75 + 0.25 (u-2)) du = 0.40625
  CHECK(f.cumulative2(2.5) == doctest::Approx(1.28125));
  CHECK(f.cumulative2(3.0) == doctest::Approx(1.75));
  // Past the support H = 1, so H2 grows linearly.
  CHECK(f.cumulative2(5.0) == doctest::Approx(3.75));
}

TEST_CASE("loss coefficients telescope to the total mass") {
  FfirHistogram f = make_tri();
  LossProfile lp = loss_coefficients(f, 1.0, 6);
  CHECK(lp.rho[0] == doctest::Approx(0.25));
  CHECK(lp.rho[1] == doctest::Approx(0.375));
  CHECK(lp.rho[2] == doctest::Approx(0.25));
  CHECK(lp.rho[3] == doctest::Approx(0.125));
  CHECK(lp.rho[4] == doctest::Approx(0.0));
  CHECK(lp.rho.sum() == doctest::Approx(f.total_mass()));
  for (int k = 0; k < 6; ++k) CHECK(lp.rho[k] >= 0.0);
}

TEST_CASE("loss coefficients cover the mass for any slot") {
  FfirHistogram f = make_tri();
  for (double slot : {0.3, 0.7, 2.0, 11.0}) {
    int count = static_cast<int>(std::ceil(f.span() / slot)) + 2;
    LossProfile lp = loss_coefficients(f, slot, count);
    CHECK(lp.rho.sum() == doctest::Approx(f.total_mass()).epsilon(1e-12));
    for (int k = 0; k < count; ++k) CHECK(lp.rho[k] >= 0.0);
  }
}

TEST_CASE("binning preserves mass and span") {
  auto ph = three_photons();
  FfirHistogram f = bin_ffir(ph, 10, 4);
  CHECK(f.bins() == 4);
  CHECK(f.total_mass() == doctest::Approx(0.1)); // 1.0 weight / 10 photons
  CHECK(f.t0 == doctest::Approx(1.0));
  // Last arrival must land inside the final bin.
  CHECK(f.t0 + f.span() >= 4.0);
  CHECK(f.bin_width > 0.0);
}

TEST_CASE("single-arrival histogram has a degenerate but usable shape") {
  std::vector<DetectedPhoton> ph = {{2.5, 0, 0, 0, 1.0}};
  FfirHistogram f = bin_ffir(ph, 4, 100);
  CHECK(f.total_mass() == doctest::Approx(0.25));
  CHECK(f.cumulative(f.span() + 1.0) == doctest::Approx(0.25));
  DelaySpread d = rms_delay_spread(f);
  CHECK(d.mean_delay == doctest::Approx(2.5).epsilon(1e-6));
  // All mass in one bin: the spread is the bin quantization floor w/sqrt(12).
  CHECK(d.rms == doctest::Approx(f.bin_width / std::sqrt(12.0)).epsilon(1e-9));
}

TEST_CASE("delay spread of a hand-built two-bin split") {
  // Masses 3/4 and 1/4 in adjacent unit bins centered at 0.5 and 1.5.
  // Intensity-squared weights: 9/16 and 1/16 -> mean = (9*0.5 + 1*1.5)/10.
  FfirHistogram f;
  f.t0 = 0.0;
  f.bin_width = 1.0;
  f.mass = Eigen::ArrayXd(2);
  f.mass << 0.75, 0.25;
  f.source_photons = 1;
  DelaySpread d = rms_delay_spread(f);
  CHECK(d.mean_delay == doctest::Approx(0.6));
  // var = sum q^2 ((tc-mean)^2 + 1/12) / sum q^2
  double var = (0.5625 * (0.01 + 1.0 / 12.0) + 0.0625 * (0.81 + 1.0 / 12.0)) /
               0.625;
  CHECK(d.rms == doctest::Approx(std::sqrt(var)));
}

TEST_CASE("channel memory walks the rho tail") {
  FfirHistogram f = make_tri();
  // slot = 10: everything lands in the first slot coefficient pair.
  CHECK(channel_memory(f, 10.0) <= 1);
  // slot = 0.5: mass spreads over ~7 coefficients.
  int l = channel_memory(f, 0.5);
  CHECK(l >= 4);
  CHECK(l <= 8);
  // Tighter tolerance cannot shrink the memory.
  CHECK(channel_memory(f, 0.5, 1e-6) >= l);
}

TEST_CASE("ffir cache files round-trip exactly") {
  FfirHistogram f = make_tri();
  FfirCacheMeta meta;
  meta.scenario_hash = 0x0123456789abcdefULL;
  meta.seed = 42;
  meta.photons = 1000;
  const char* path = "test_channel_cache.bin";
  write_ffir_cache(path, f, meta);

  FfirCacheMeta back;
  FfirHistogram g = read_ffir_cache(path, back);
  CHECK(back.scenario_hash == meta.scenario_hash);
  CHECK(back.seed == meta.seed);
  CHECK(back.photons == meta.photons);
  CHECK(g.t0 == f.t0);
  CHECK(g.bin_width == f.bin_width);
  CHECK(g.source_photons == f.source_photons);
  REQUIRE(g.bins() == f.bins());
  for (int i = 0; i < f.bins(); ++i) CHECK(g.mass[i] == f.mass[i]);
  std::remove(path);
}

TEST_CASE("corrupt cache file raises instead of returning junk") {
  const char* path = "test_channel_cache_bad.bin";
  FILE* fp = std::fopen(path, "wb");
  REQUIRE(fp != nullptr);
  std::fputs("not a cache file", fp);
  std::fclose(fp);
  FfirCacheMeta meta;
  CHECK_THROWS_AS(read_ffir_cache(path, meta), std::runtime_error);
  std::remove(path);
}

TEST_CASE("spatial map integrates the gated window") {
  // Two photons: one at the center inside the window, one far out in space.
  std::vector<DetectedPhoton> ph = {{5.0, 0.0, 0.0, 0.0, 1.0},
                                    {5.0, 10.0, 10.0, 0.0, 1.0}};
  SpatialMapConfig cfg;
  cfg.extent = 2.0;
  cfg.pixels = 4;
  cfg.window = 1.0;
  SpatialMap m = spatial_map(ph, 10, cfg);
  CHECK(m.db.rows() == 4);
  CHECK(m.db.cols() == 4);
  CHECK(m.gate_start == doctest::Approx(5.0));
  // Center photon: weight fraction 0.1 -> -10 dB in exactly one pixel.
  int hits = 0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      if (m.db(r, c) > cfg.floor_db + 1.0) {
        ++hits;
        CHECK(m.db(r, c) == doctest::Approx(-10.0));
      }
  CHECK(hits == 1);
}
