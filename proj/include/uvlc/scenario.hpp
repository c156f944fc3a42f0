#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uvlc/constants.hpp"

namespace uvlc {

struct WaterProperties {
  std::string preset;        // informational; empty for custom waters
  double absorption = 0.0;   // a, 1/m
  double scattering = 0.0;   // b, 1/m
  double kd = 0.0;           // diffuse attenuation for ambient light, 1/m
  double refractive_index = 1.331;

  double attenuation() const { return absorption + scattering; }
  double albedo() const { return scattering / attenuation(); }
};

WaterProperties water_preset(const std::string& name);

enum class SourceKind { collimated_gaussian, lambertian };

struct SourceModel {
  SourceKind kind = SourceKind::collimated_gaussian;
  double wavelength = 532e-9;   // m
  double divergence = 0.75e-3;  // rad, Rayleigh scale of the launch zenith
  double spot_radius = 1e-3;    // m, 1/e^2 intensity radius of the launch spot
  double half_angle = 15.0 * M_PI / 180.0; // rad, half-intensity half angle

  // Order m solving cos^m(half_angle) = 1/2.
  double lambertian_order() const;
};

struct MimoLayout {
  int tx_count = 1;
  int rx_count = 1;
  double spacing = 0.25;     // m, center-to-center within each array
  double link_length = 60.0; // m, transmitter plane to receiver plane

  // Element positions along one transverse axis, medial element first:
  // 0, +l, -l, +2l, -2l, ... so that index 1 is the aimed/medial element.
  static std::vector<double> element_offsets(int count, double spacing);
  // Which receiver transmitter i (0-based) aims at: min(i, N-1).
  int aim_of_tx(int i) const { return i < rx_count ? i : rx_count - 1; }
};

struct ReceiverModel {
  double aperture_diameter = 0.20;          // m, shared-area budget D0
  double fov_half_angle = 40.0 * M_PI / 180.0; // rad
  // Optional per-receiver aperture area override (m^2). When set, every
  // receiver uses this collecting area directly and the sqrt(N) diameter
  // rule is bypassed.
  std::optional<double> aperture_area;

  // Per-receiver radius under the shared-area rule D0/sqrt(N).
  double element_radius(int rx_count) const;
};

struct ModemConfig {
  double bit_rate = 1e9; // bits/s
  int history_cap = 12;  // enumerate 2^L histories up to this L

  double bit_duration() const { return 1.0 / bit_rate; }
  double chip_duration() const { return 0.5 / bit_rate; }
};

struct NoiseEnvironment {
  double quantum_efficiency = 0.8;
  double temperature = 290.0;    // K
  double load_resistance = 100.0; // ohm
  double dark_current = 1.226e-9; // A
  // Collected ambient optical power; if unset it is derived from the water's
  // kd as 25.57 nW * exp(-30 kd).
  std::optional<double> background_power;

  double responsivity(double wavelength) const;
  double background_power_or_default(double kd) const;
};

struct FadingSpec {
  double sigma2_x = 0.16; // log-amplitude variance, applied to every link
  // Sparse per-link overrides keyed by (tx, rx), 0-based.
  std::map<std::pair<int, int>, double> per_link;

  double sigma2_for(int i, int j) const {
    auto it = per_link.find({i, j});
    return it == per_link.end() ? sigma2_x : it->second;
  }
};

struct TransportConfig {
  uint64_t photon_count = 2'000'000;
  uint64_t seed = 1;
  double weight_threshold = 1e-6;
  double hg_g = 0.924;    // Henyey-Greenstein asymmetry
  int bins = 100;         // FFIR histogram bins
  // Radius of the dump capture disc; 0 = derive from layout and map extent.
  double capture_radius = 0.0;
};

struct Scenario {
  std::string name;
  WaterProperties water;
  SourceModel source;
  MimoLayout layout;
  ReceiverModel receiver;
  ModemConfig modem;
  NoiseEnvironment noise;
  FadingSpec fading;
  TransportConfig transport;
};

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

ValidationReport validate_scenario(const Scenario& s);

// 64-bit FNV-1a over a canonical serialization of every field that affects
// photon transport. BER-only knobs (noise, fading, modem) do not participate.
uint64_t scenario_hash(const Scenario& s);

std::string hash_hex(uint64_t h);

} // namespace uvlc
