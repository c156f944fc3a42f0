#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "uvlc/transport.hpp"

namespace uvlc {

// Fractional-energy impulse response of one link: per-bin detected weight
// divided by the launched photon count. Mass is dimensionless; the density
// form is mass / bin_width.
struct FfirHistogram {
  double t0 = 0.0;        // absolute time of the first bin edge, s
  double bin_width = 0.0; // s
  Eigen::ArrayXd mass;    // per-bin energy fraction
  uint64_t source_photons = 0;

  int bins() const { return static_cast<int>(mass.size()); }
  double total_mass() const { return mass.size() ? mass.sum() : 0.0; }
  double span() const { return bin_width * bins(); }

  // H(u): cumulative mass up to relative time u (u = 0 at t0). Piecewise
  // linear, exact.
  double cumulative(double u) const;
  // Integral of H from 0 to u; piecewise quadratic, exact. Zero for u <= 0.
  double cumulative2(double u) const;
};

FfirHistogram bin_ffir(const std::vector<DetectedPhoton>& photons,
                       uint64_t source_photons, int bins = 100);

struct LossProfile {
  Eigen::ArrayXd rho; // slot loss coefficients, k = 0..K-1
  double slot = 0.0;  // s
};

// Slot coefficients: rectangular unit pulse of one slot convolved with the
// response, averaged per slot. Exact in the piecewise representation.
LossProfile loss_coefficients(const FfirHistogram& f, double slot, int count);

struct DelaySpread {
  double mean_delay = 0.0; // absolute first moment of h0^2 weighting, s
  double rms = 0.0;        // s
};

DelaySpread rms_delay_spread(const FfirHistogram& f);

// Number of past bits whose slot coefficients still matter: smallest L with
// sum_{k>L} rho_k < tol * sum_k rho_k.
int channel_memory(const FfirHistogram& f, double slot, double tol = 1e-3);

struct SpatialMapConfig {
  double extent = 3.0;     // full side of the mapped square, m
  int pixels = 40;
  double window = 1e-9;    // integration window after the gate, s
  double floor_db = -330.0; // marker for empty pixels
};

struct SpatialMap {
  Eigen::MatrixXd db;      // pixels x pixels, 10*log10(weight fraction)
  double gate_start = 0.0; // absolute time of the first detected photon, s
  double window = 0.0;
};

SpatialMap spatial_map(const std::vector<DetectedPhoton>& records,
                       uint64_t source_photons, const SpatialMapConfig& cfg);

// ---- FFIR cache files ----

struct FfirCacheMeta {
  uint64_t scenario_hash = 0;
  uint64_t seed = 0;
  uint64_t photons = 0;
};

void write_ffir_cache(const std::string& path, const FfirHistogram& f,
                      const FfirCacheMeta& meta);

// Throws std::runtime_error on malformed content.
FfirHistogram read_ffir_cache(const std::string& path, FfirCacheMeta& meta);

} // namespace uvlc
