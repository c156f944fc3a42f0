#include "uvlc/scenario_io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace uvlc {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& file, int line, const std::string& v) {
  char* end = nullptr;
  double out = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0' || !std::isfinite(out))
    throw ConfigError(file, line, "expected a number, got '" + v + "'");
  return out;
}

int64_t parse_int(const std::string& file, int line, const std::string& v) {
  char* end = nullptr;
  long long out = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError(file, line, "expected an integer, got '" + v + "'");
  return out;
}

struct Assignment {
  std::string section;
  std::string key;
  std::string value;
  int line;
};

// Applies one parsed key. `file` names the source for error messages.
void apply_key(Scenario& s, const std::string& file, const Assignment& a) {
  const std::string& sec = a.section;
  const std::string& key = a.key;
  const std::string& val = a.value;
  int line = a.line;
  auto num = [&] { return parse_number(file, line, val); };
  auto integer = [&] { return parse_int(file, line, val); };
  auto bad_key = [&]() -> ConfigError {
    return ConfigError(file, line, "unknown key '" + key + "' in [" + sec + "]");
  };

  if (sec == "water") {
    if (key == "preset") {
      try {
        WaterProperties w = water_preset(val);
        w.refractive_index = s.water.refractive_index;
        s.water = w;
      } catch (const std::invalid_argument& e) {
        throw ConfigError(file, line, e.what());
      }
    } else if (key == "absorption") {
      s.water.absorption = num();
      s.water.preset.clear();
    } else if (key == "scattering") {
      s.water.scattering = num();
      s.water.preset.clear();
    } else if (key == "kd") {
      s.water.kd = num();
    } else if (key == "refractive_index") {
      s.water.refractive_index = num();
    } else {
      throw bad_key();
    }
  } else if (sec == "source") {
    if (key == "type") {
      if (val == "laser")
        s.source.kind = SourceKind::collimated_gaussian;
      else if (val == "led")
        s.source.kind = SourceKind::lambertian;
      else
        throw ConfigError(file, line, "source type must be laser or led");
    } else if (key == "wavelength_nm") {
      s.source.wavelength = num() * 1e-9;
    } else if (key == "divergence_mrad") {
      s.source.divergence = num() * 1e-3;
    } else if (key == "spot_radius_mm") {
      s.source.spot_radius = num() * 1e-3;
    } else if (key == "half_angle_deg") {
      s.source.half_angle = num() * M_PI / 180.0;
    } else {
      throw bad_key();
    }
  } else if (sec == "layout") {
    if (key == "tx") {
      s.layout.tx_count = static_cast<int>(integer());
    } else if (key == "rx") {
      s.layout.rx_count = static_cast<int>(integer());
    } else if (key == "spacing_cm") {
      s.layout.spacing = num() * 1e-2;
    } else if (key == "length_m") {
      s.layout.link_length = num();
    } else if (key == "aperture_diameter_cm") {
      s.receiver.aperture_diameter = num() * 1e-2;
    } else if (key == "aperture_area_cm2") {
      s.receiver.aperture_area = num() * 1e-4;
    } else if (key == "fov_half_angle_deg") {
      s.receiver.fov_half_angle = num() * M_PI / 180.0;
    } else {
      throw bad_key();
    }
  } else if (sec == "modem") {
    if (key == "bit_rate_mbps") {
      s.modem.bit_rate = num() * 1e6;
    } else if (key == "history_cap") {
      s.modem.history_cap = static_cast<int>(integer());
    } else {
      throw bad_key();
    }
  } else if (sec == "noise") {
    if (key == "quantum_efficiency") {
      s.noise.quantum_efficiency = num();
    } else if (key == "temperature_k") {
      s.noise.temperature = num();
    } else if (key == "load_ohm") {
      s.noise.load_resistance = num();
    } else if (key == "dark_current_a") {
      s.noise.dark_current = num();
    } else if (key == "background_power_w") {
      s.noise.background_power = num();
    } else {
      throw bad_key();
    }
  } else if (sec == "fading") {
    if (key == "sigma2_x") {
      s.fading.sigma2_x = num();
    } else if (key.rfind("sigma2_x_", 0) == 0 && key.size() == 11) {
      int i = key[9] - '1';
      int j = key[10] - '1';
      if (i < 0 || i > 8 || j < 0 || j > 8)
        throw ConfigError(file, line, "bad per-link fading key '" + key + "'");
      s.fading.per_link[{i, j}] = num();
    } else {
      throw bad_key();
    }
  } else if (sec == "transport") {
    if (key == "photons") {
      s.transport.photon_count = static_cast<uint64_t>(num());
    } else if (key == "seed") {
      s.transport.seed = static_cast<uint64_t>(integer());
    } else if (key == "weight_threshold") {
      s.transport.weight_threshold = num();
    } else if (key == "hg_g") {
      s.transport.hg_g = num();
    } else if (key == "bins") {
      s.transport.bins = static_cast<int>(integer());
    } else if (key == "capture_radius_m") {
      s.transport.capture_radius = num();
    } else {
      throw bad_key();
    }
  } else {
    throw ConfigError(file, line, "unknown section [" + sec + "]");
  }
}

Scenario parse(const std::string& text, const std::string& file,
               const std::string& name) {
  Scenario s;
  s.name = name;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  bool water_seen = false;
  while (std::getline(in, raw)) {
    ++line;
    std::string t = trim(raw);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError(file, line, "unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty()) throw ConfigError(file, line, "empty section name");
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(file, line, "expected key=value");
    if (section.empty())
      throw ConfigError(file, line, "key outside of any [section]");
    Assignment a{section, trim(t.substr(0, eq)), trim(t.substr(eq + 1)), line};
    if (a.key.empty()) throw ConfigError(file, line, "empty key");
    if (a.section == "water" &&
        (a.key == "preset" || a.key == "absorption" || a.key == "scattering"))
      water_seen = true;
    apply_key(s, file, a);
  }
  if (!water_seen)
    throw ConfigError(file, line,
                      "missing [water] preset or absorption/scattering");
  return s;
}

} // namespace

Scenario parse_scenario_text(const std::string& text, const std::string& name) {
  return parse(text, name, name);
}

Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string base = path;
  size_t slash = base.find_last_of('/');
  if (slash != std::string::npos) base = base.substr(slash + 1);
  size_t dot = base.find_last_of('.');
  if (dot != std::string::npos) base = base.substr(0, dot);
  return parse(buf.str(), path, base);
}

void apply_override(Scenario& s, const std::string& assignment) {
  size_t dot = assignment.find('.');
  size_t eq = assignment.find('=');
  if (dot == std::string::npos || eq == std::string::npos || dot > eq)
    throw ConfigError("<override>", 0,
                      "override must look like section.key=value");
  Assignment a{trim(assignment.substr(0, dot)),
               trim(assignment.substr(dot + 1, eq - dot - 1)),
               trim(assignment.substr(eq + 1)), 0};
  apply_key(s, "<override>", a);
}

} // namespace uvlc
