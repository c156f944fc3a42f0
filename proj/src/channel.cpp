#include "uvlc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace uvlc {

double FfirHistogram::cumulative(double u) const {
  const int n = bins();
  if (n == 0 || u <= 0.0) return 0.0;
  double end = span();
  if (u >= end) return total_mass();
  int i = std::min(static_cast<int>(u / bin_width), n - 1);
  double left = i * bin_width;
  double acc = 0.0;
  for (int j = 0; j < i; ++j) acc += mass[j];
  return acc + mass[i] * (u - left) / bin_width;
}

double FfirHistogram::cumulative2(double u) const {
  const int n = bins();
  if (n == 0 || u <= 0.0) return 0.0;
  double end = span();
  // Prefix sums are small (100 bins); recompute on demand for clarity.
  double acc_mass = 0.0;  // mass before current bin
  double acc_h2 = 0.0;    // integral of H over completed bins
  if (u >= end) {
    for (int j = 0; j < n; ++j) {
      acc_h2 += acc_mass * bin_width + 0.5 * mass[j] * bin_width;
      acc_mass += mass[j];
    }
    return acc_h2 + acc_mass * (u - end);
  }
  int i = std::min(static_cast<int>(u / bin_width), n - 1);
  for (int j = 0; j < i; ++j) {
    acc_h2 += acc_mass * bin_width + 0.5 * mass[j] * bin_width;
    acc_mass += mass[j];
  }
  double d = u - i * bin_width;
  return acc_h2 + acc_mass * d + 0.5 * mass[i] * d * d / bin_width;
}

FfirHistogram bin_ffir(const std::vector<DetectedPhoton>& photons,
                       uint64_t source_photons, int bins) {
  FfirHistogram f;
  f.source_photons = source_photons;
  f.mass = Eigen::ArrayXd::Zero(bins);
  if (photons.empty()) {
    f.t0 = 0.0;
    f.bin_width = 1e-12;
    return f;
  }
  double lo = photons.front().t, hi = photons.front().t;
  for (const auto& p : photons) {
    lo = std::min(lo, p.t);
    hi = std::max(hi, p.t);
  }
  f.t0 = lo;
  double span = hi - lo;
  f.bin_width = span > 0.0 ? span / bins : 1e-12;
  const double inv_n = 1.0 / static_cast<double>(source_photons);
  for (const auto& p : photons) {
    int idx = std::min(static_cast<int>((p.t - lo) / f.bin_width), bins - 1);
    f.mass[idx] += p.weight * inv_n;
  }
  return f;
}

LossProfile loss_coefficients(const FfirHistogram& f, double slot, int count) {
  LossProfile lp;
  lp.slot = slot;
  lp.rho = Eigen::ArrayXd::Zero(count);
  for (int k = 0; k < count; ++k) {
    double a = f.cumulative2((k + 1) * slot);
    double b = f.cumulative2(k * slot);
    double c = f.cumulative2((k - 1) * slot);
    // cumulative2 is convex, so the second difference is nonnegative up to
    // rounding; clamp the float noise so downstream Poisson means stay valid.
    lp.rho[k] = std::max(0.0, (a - 2.0 * b + c) / slot);
  }
  return lp;
}

DelaySpread rms_delay_spread(const FfirHistogram& f) {
  DelaySpread d;
  const int n = f.bins();
  if (n == 0) return d;
  const double w = f.bin_width;
  double e0 = 0.0, e1 = 0.0;
  for (int i = 0; i < n; ++i) {
    double q = f.mass[i] / w; // density
    double tc = (i + 0.5) * w;
    e0 += q * q * w;
    e1 += q * q * w * tc;
  }
  if (e0 <= 0.0) return d;
  double tau0 = e1 / e0;
  double var = 0.0;
  for (int i = 0; i < n; ++i) {
    double q = f.mass[i] / w;
    double tc = (i + 0.5) * w;
    var += q * q * w * ((tc - tau0) * (tc - tau0) + w * w / 12.0);
  }
  d.mean_delay = f.t0 + tau0;
  d.rms = std::sqrt(var / e0);
  return d;
}

int channel_memory(const FfirHistogram& f, double slot, double tol) {
  double total = f.total_mass();
  if (total <= 0.0) return 0;
  int k_max = static_cast<int>(std::ceil(f.span() / slot)) + 2;
  LossProfile lp = loss_coefficients(f, slot, k_max + 1);
  double tail = lp.rho.sum();
  // rho sums to total over the full support; walk forward until the
  // remaining tail is negligible.
  for (int k = 0; k <= k_max; ++k) {
    tail -= lp.rho[k];
    if (tail < tol * total) return k;
  }
  return k_max;
}

SpatialMap spatial_map(const std::vector<DetectedPhoton>& records,
                       uint64_t source_photons, const SpatialMapConfig& cfg) {
  SpatialMap m;
  m.window = cfg.window;
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(cfg.pixels, cfg.pixels);
  if (records.empty()) {
    m.db = Eigen::MatrixXd::Constant(cfg.pixels, cfg.pixels, cfg.floor_db);
    return m;
  }
  double gate = records.front().t;
  for (const auto& r : records) gate = std::min(gate, r.t);
  m.gate_start = gate;
  const double half = 0.5 * cfg.extent;
  const double px = cfg.extent / cfg.pixels;
  const double inv_n = 1.0 / static_cast<double>(source_photons);
  for (const auto& r : records) {
    if (r.t < gate || r.t > gate + cfg.window) continue;
    if (r.x < -half || r.x >= half || r.y < -half || r.y >= half) continue;
    int col = std::min(static_cast<int>((r.x + half) / px), cfg.pixels - 1);
    int row = std::min(static_cast<int>((r.y + half) / px), cfg.pixels - 1);
    sum(row, col) += r.weight * inv_n;
  }
  m.db = Eigen::MatrixXd::Constant(cfg.pixels, cfg.pixels, cfg.floor_db);
  for (int r = 0; r < cfg.pixels; ++r)
    for (int c = 0; c < cfg.pixels; ++c)
      if (sum(r, c) > 0.0) m.db(r, c) = 10.0 * std::log10(sum(r, c));
  return m;
}

void write_ffir_cache(const std::string& path, const FfirHistogram& f,
                      const FfirCacheMeta& meta) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write cache file: " + path);
  char buf[256];
  out << "# uvlc-ffir v1\n";
  std::snprintf(buf, sizeof(buf), "# scenario_hash=%016llx\n",
                static_cast<unsigned long long>(meta.scenario_hash));
  out << buf;
  std::snprintf(buf, sizeof(buf), "# photons=%llu\n",
                static_cast<unsigned long long>(meta.photons));
  out << buf;
  std::snprintf(buf, sizeof(buf), "# seed=%llu\n",
                static_cast<unsigned long long>(meta.seed));
  out << buf;
  std::snprintf(buf, sizeof(buf), "# bin_width=%.17g\n", f.bin_width);
  out << buf;
  std::snprintf(buf, sizeof(buf), "# t0=%.17g\n", f.t0);
  out << buf;
  std::snprintf(buf, sizeof(buf), "# bins=%d\n", f.bins());
  out << buf;
  out << "t_start,mass\n";
  for (int i = 0; i < f.bins(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", f.t0 + i * f.bin_width,
                  f.mass[i]);
    out << buf;
  }
  if (!out) throw std::runtime_error("short write to cache file: " + path);
}

namespace {

// Parses "# key=value"; returns empty on mismatch.
std::string header_value(const std::string& line, const std::string& key) {
  std::string prefix = "# " + key + "=";
  if (line.rfind(prefix, 0) != 0) return "";
  return line.substr(prefix.size());
}

} // namespace

FfirHistogram read_ffir_cache(const std::string& path, FfirCacheMeta& meta) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open cache file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "# uvlc-ffir v1")
    throw std::runtime_error("bad cache header: " + path);
  FfirHistogram f;
  int bins = -1;
  auto need = [&](const char* key) {
    if (!std::getline(in, line))
      throw std::runtime_error("truncated cache header: " + path);
    std::string v = header_value(line, key);
    if (v.empty())
      throw std::runtime_error(std::string("missing cache key ") + key + ": " +
                               path);
    return v;
  };
  meta.scenario_hash = std::stoull(need("scenario_hash"), nullptr, 16);
  meta.photons = std::stoull(need("photons"));
  meta.seed = std::stoull(need("seed"));
  f.bin_width = std::stod(need("bin_width"));
  f.t0 = std::stod(need("t0"));
  bins = std::stoi(need("bins"));
  if (bins < 1 || bins > 1'000'000)
    throw std::runtime_error("implausible bin count in cache: " + path);
  if (!std::getline(in, line) || line != "t_start,mass")
    throw std::runtime_error("missing cache column header: " + path);
  f.mass = Eigen::ArrayXd::Zero(bins);
  f.source_photons = meta.photons;
  for (int i = 0; i < bins; ++i) {
    if (!std::getline(in, line))
      throw std::runtime_error("truncated cache rows: " + path);
    size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("malformed cache row: " + path);
    f.mass[i] = std::stod(line.substr(comma + 1));
  }
  return f;
}

} // namespace uvlc
