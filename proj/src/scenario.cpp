#include "uvlc/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace uvlc {

WaterProperties water_preset(const std::string& name) {
  WaterProperties w;
  w.preset = name;
  if (name == "clear-ocean") {
    w.absorption = 0.114;
    w.scattering = 0.037;
    w.kd = 0.08;
  } else if (name == "coastal") {
    w.absorption = 0.179;
    w.scattering = 0.219;
    w.kd = 0.2;
  } else if (name == "turbid-harbor") {
    w.absorption = 0.366;
    w.scattering = 1.824;
    w.kd = 1.1;
  } else {
    throw std::invalid_argument("unknown water preset: " + name);
  }
  return w;
}

double SourceModel::lambertian_order() const {
  return std::log(0.5) / std::log(std::cos(half_angle));
}

std::vector<double> MimoLayout::element_offsets(int count, double spacing) {
  std::vector<double> out;
  out.reserve(count);
  out.push_back(0.0);
  for (int k = 1; static_cast<int>(out.size()) < count; ++k) {
    out.push_back(k * spacing);
    if (static_cast<int>(out.size()) < count) out.push_back(-k * spacing);
  }
  return out;
}

double ReceiverModel::element_radius(int rx_count) const {
  if (aperture_area) return std::sqrt(*aperture_area / M_PI);
  return 0.5 * aperture_diameter / std::sqrt(static_cast<double>(rx_count));
}

double NoiseEnvironment::responsivity(double wavelength) const {
  double photon_energy = kPlanck * kSpeedOfLight / wavelength;
  return quantum_efficiency * kElementaryCharge / photon_energy;
}

double NoiseEnvironment::background_power_or_default(double kd) const {
  if (background_power) return *background_power;
  return 25.57e-9 * std::exp(-30.0 * kd);
}

ValidationReport validate_scenario(const Scenario& s) {
  ValidationReport r;
  auto err = [&](const std::string& m) { r.errors.push_back(m); };
  auto warn = [&](const std::string& m) { r.warnings.push_back(m); };

  if (!(s.water.absorption > 0.0)) err("water: absorption must be > 0");
  if (s.water.scattering < 0.0) err("water: scattering must be >= 0");
  if (!(s.water.refractive_index >= 1.0))
    err("water: refractive index must be >= 1");
  if (s.water.kd < 0.0) err("water: kd must be >= 0");
  if (s.water.absorption > 0.0 && s.water.scattering >= 0.0) {
    double alb = s.water.albedo();
    if (!(alb >= 0.0 && alb < 1.0)) err("water: albedo must lie in [0, 1)");
  }

  if (!(s.source.wavelength > 0.0)) err("source: wavelength must be > 0");
  if (s.source.kind == SourceKind::collimated_gaussian) {
    if (!(s.source.divergence > 0.0)) err("source: divergence must be > 0");
    if (!(s.source.spot_radius > 0.0)) err("source: spot radius must be > 0");
  } else {
    if (!(s.source.half_angle > 0.0 && s.source.half_angle < M_PI / 2))
      err("source: half angle must lie in (0, 90) degrees");
  }

  if (s.layout.tx_count < 1) err("layout: tx count must be >= 1");
  if (s.layout.rx_count < 1) err("layout: rx count must be >= 1");
  if (!(s.layout.link_length > 0.0)) err("layout: length must be > 0");
  if ((s.layout.tx_count > 1 || s.layout.rx_count > 1) &&
      !(s.layout.spacing > 0.0))
    err("layout: spacing must be > 0 for arrays");

  if (!(s.receiver.aperture_diameter > 0.0) && !s.receiver.aperture_area)
    err("layout: aperture diameter must be > 0");
  if (s.receiver.aperture_area && !(*s.receiver.aperture_area > 0.0))
    err("layout: aperture area must be > 0");
  if (!(s.receiver.fov_half_angle > 0.0 && s.receiver.fov_half_angle <= M_PI / 2))
    err("layout: field of view must lie in (0, 90] degrees");

  if (!(s.modem.bit_rate > 0.0)) err("modem: bit rate must be > 0");
  if (s.modem.history_cap < 0) err("modem: history cap must be >= 0");

  if (!(s.noise.quantum_efficiency > 0.0 && s.noise.quantum_efficiency <= 1.0))
    err("noise: quantum efficiency must lie in (0, 1]");
  if (!(s.noise.temperature > 0.0)) err("noise: temperature must be > 0");
  if (!(s.noise.load_resistance > 0.0)) err("noise: load resistance must be > 0");
  if (s.noise.dark_current < 0.0) err("noise: dark current must be >= 0");
  if (s.noise.background_power && *s.noise.background_power < 0.0)
    err("noise: background power must be >= 0");

  if (s.fading.sigma2_x < 0.0) err("fading: sigma2_x must be >= 0");
  for (const auto& [key, v] : s.fading.per_link) {
    if (v < 0.0) err("fading: per-link sigma2_x must be >= 0");
    if (key.first < 0 || key.first >= s.layout.tx_count || key.second < 0 ||
        key.second >= s.layout.rx_count)
      err("fading: per-link override outside layout");
  }

  if (s.transport.photon_count < 1) err("transport: photons must be >= 1");
  if (!(s.transport.weight_threshold > 0.0 && s.transport.weight_threshold < 1.0))
    err("transport: weight threshold must lie in (0, 1)");
  if (!(s.transport.hg_g > -1.0 && s.transport.hg_g < 1.0))
    err("transport: scattering asymmetry g must lie in (-1, 1)");
  if (s.transport.bins < 2) err("transport: bins must be >= 2");
  if (s.transport.capture_radius < 0.0)
    err("transport: capture radius must be >= 0");

  double albedo = s.water.attenuation() > 0 ? s.water.albedo() : 0.0;
  if (albedo > 0.95)
    warn("water: albedo > 0.95, photon lifetimes may be long");
  if (s.transport.photon_count > 200'000'000ull)
    warn("transport: very large photon count requested");
  return r;
}

namespace {

inline void fnv_bytes(uint64_t& h, const void* data, size_t n) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
}

} // namespace

uint64_t scenario_hash(const Scenario& s) {
  uint64_t h = 1469598103934665603ull; // FNV offset basis
  auto d = [&](double v) {
    if (v == 0.0) v = 0.0;
    fnv_bytes(h, &v, sizeof(v));
  };
  auto u = [&](uint64_t v) { fnv_bytes(h, &v, sizeof(v)); };

  u(0x5556'4C43'0001ull); // format tag
  d(s.water.absorption);
  d(s.water.scattering);
  d(s.water.refractive_index);
  u(static_cast<uint64_t>(s.source.kind));
  d(s.source.wavelength);
  if (s.source.kind == SourceKind::collimated_gaussian) {
    d(s.source.divergence);
    d(s.source.spot_radius);
  } else {
    d(s.source.half_angle);
  }
  u(static_cast<uint64_t>(s.layout.tx_count));
  u(static_cast<uint64_t>(s.layout.rx_count));
  d(s.layout.spacing);
  d(s.layout.link_length);
  d(s.receiver.element_radius(s.layout.rx_count));
  d(s.receiver.fov_half_angle);
  u(s.transport.photon_count);
  u(s.transport.seed);
  d(s.transport.weight_threshold);
  d(s.transport.hg_g);
  u(static_cast<uint64_t>(s.transport.bins));
  d(s.transport.capture_radius);
  return h;
}

std::string hash_hex(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

} // namespace uvlc
