#include "uvlc/transport.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace uvlc {

ReceiverGeometry receiver_geometry(const Scenario& s) {
  const int M = s.layout.tx_count;
  const int N = s.layout.rx_count;
  std::vector<double> rx = MimoLayout::element_offsets(N, s.layout.spacing);
  double radius = s.receiver.element_radius(N);

  ReceiverGeometry g;
  g.link_class.resize(M, N);
  for (int i = 0; i < M; ++i) {
    double aim = rx[s.layout.aim_of_tx(i)];
    for (int j = 0; j < N; ++j) {
      double off = std::abs(rx[j] - aim);
      int idx = -1;
      for (size_t k = 0; k < g.classes.size(); ++k) {
        if (std::abs(g.classes[k].cx - off) < 1e-12) {
          idx = static_cast<int>(k);
          break;
        }
      }
      if (idx < 0) {
        g.classes.push_back(ReceiverClass{off, radius});
        idx = static_cast<int>(g.classes.size()) - 1;
      }
      g.link_class(i, j) = idx;
    }
  }
  return g;
}

double sample_collimated_zenith(double theta_div, double u) {
  return theta_div * std::sqrt(-std::log1p(-u));
}

double sample_lambertian_zenith(double m, double u) {
  return std::acos(std::pow(1.0 - u, 1.0 / (m + 1.0)));
}

double sample_hg_costheta(double g, double u) {
  if (std::abs(g) < 1e-9) return 1.0 - 2.0 * u;
  double frac = (1.0 - g * g) / (1.0 - g + 2.0 * g * u);
  double ct = (1.0 + g * g - frac * frac) / (2.0 * g);
  return std::clamp(ct, -1.0, 1.0);
}

Eigen::Vector3d rotate_direction(const Eigen::Vector3d& dir, double cos_theta,
                                 double phi) {
  double st = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
  double cp = std::cos(phi), sp = std::sin(phi);
  Eigen::Vector3d out;
  if (std::abs(dir.z()) > 0.999999) {
    double sign = dir.z() >= 0.0 ? 1.0 : -1.0;
    out << st * cp, sign * st * sp, sign * cos_theta;
  } else {
    double denom = std::sqrt(1.0 - dir.z() * dir.z());
    out << st * (dir.x() * dir.z() * cp - dir.y() * sp) / denom +
             dir.x() * cos_theta,
        st * (dir.y() * dir.z() * cp + dir.x() * sp) / denom +
            dir.y() * cos_theta,
        -denom * st * cp + dir.z() * cos_theta;
  }
  out.normalize();
  return out;
}

LaunchState launch_photon(const SourceModel& source, RandomStream& rng) {
  LaunchState st;
  if (source.kind == SourceKind::collimated_gaussian) {
    // Gaussian intensity spot with 1/e^2 radius spot_radius.
    double ur = rng.uniform01();
    double up = rng.uniform01();
    double r = source.spot_radius * std::sqrt(-0.5 * std::log1p(-ur));
    double a = 2.0 * M_PI * up;
    st.position << r * std::cos(a), r * std::sin(a), 0.0;
    double theta = sample_collimated_zenith(source.divergence, rng.uniform01());
    double phi = 2.0 * M_PI * rng.uniform01();
    double stheta = std::sin(theta);
    st.direction << stheta * std::cos(phi), stheta * std::sin(phi),
        std::cos(theta);
  } else {
    st.position.setZero();
    double m = source.lambertian_order();
    double theta = sample_lambertian_zenith(m, rng.uniform01());
    double phi = 2.0 * M_PI * rng.uniform01();
    double stheta = std::sin(theta);
    st.direction << stheta * std::cos(phi), stheta * std::sin(phi),
        std::cos(theta);
  }
  return st;
}

namespace {

struct ChunkOutput {
  std::vector<std::vector<DetectedPhoton>> per_class;
  std::vector<DetectedPhoton> capture;
  uint64_t crossing_count = 0;
  double crossing_weight = 0.0;
};

void trace_chunk(const Scenario& s, const ReceiverGeometry& geo,
                 const TraceOptions& opt, uint64_t first, uint64_t count,
                 ChunkOutput& out) {
  const double c_att = s.water.attenuation();
  const double albedo = s.water.albedo();
  const double w_th = s.transport.weight_threshold;
  const double d0 = s.layout.link_length;
  const double g = s.transport.hg_g;
  const double slow = s.water.refractive_index / kSpeedOfLight;
  const double cos_fov = std::cos(s.receiver.fov_half_angle);
  const double cap2 = opt.capture_radius * opt.capture_radius;
  const bool want_capture = opt.capture_radius > 0.0;
  const size_t n_classes = geo.classes.size();

  out.per_class.assign(n_classes, {});

  for (uint64_t p = 0; p < count; ++p) {
    RandomStream rng(s.transport.seed, StreamDomain::photon, first + p);
    LaunchState st = launch_photon(s.source, rng);
    Eigen::Vector3d pos = st.position;
    Eigen::Vector3d dir = st.direction;
    double weight = 1.0;
    double t = 0.0;

    for (;;) {
      double step = rng.exponential() / c_att;
      if (dir.z() > 0.0) {
        double to_plane = (d0 - pos.z()) / dir.z();
        if (to_plane <= step) {
          // Exact ray-plane crossing inside this step: record and terminate.
          if (dir.z() >= cos_fov) {
            double cx = pos.x() + dir.x() * to_plane;
            double cy = pos.y() + dir.y() * to_plane;
            double ct = t + to_plane * slow;
            double zenith = std::acos(std::min(1.0, dir.z()));
            DetectedPhoton ph{ct, cx, cy, zenith, weight};
            for (size_t k = 0; k < n_classes; ++k) {
              double dx = cx - geo.classes[k].cx;
              double r = geo.classes[k].radius;
              if (dx * dx + cy * cy <= r * r) out.per_class[k].push_back(ph);
            }
            if (want_capture && cx * cx + cy * cy <= cap2)
              out.capture.push_back(ph);
          }
          out.crossing_count += 1;
          out.crossing_weight += weight;
          break;
        }
      }
      pos += dir * step;
      t += step * slow;
      weight *= albedo;
      if (weight < w_th) break;
      double ctheta = sample_hg_costheta(g, rng.uniform01());
      double phi = 2.0 * M_PI * rng.uniform01();
      dir = rotate_direction(dir, ctheta, phi);
    }
  }
}

} // namespace

TraceResult trace_photons(const Scenario& s, const TraceOptions& opt) {
  TraceResult res;
  res.geometry = receiver_geometry(s);
  const size_t n_classes = res.geometry.classes.size();
  res.per_class.assign(n_classes, {});
  res.launched = s.transport.photon_count;

  const uint64_t total = s.transport.photon_count;
  const uint64_t chunk = 1u << 16;
  const uint64_t n_chunks = (total + chunk - 1) / chunk;
  unsigned hw = std::thread::hardware_concurrency();
  unsigned n_threads = opt.threads > 0 ? static_cast<unsigned>(opt.threads)
                                       : (hw ? hw : 1);
  n_threads = std::min<uint64_t>(n_threads, n_chunks);

  std::vector<ChunkOutput> outputs(n_chunks);
  std::atomic<uint64_t> next{0};
  auto worker = [&] {
    for (;;) {
      uint64_t k = next.fetch_add(1);
      if (k >= n_chunks) return;
      uint64_t first = k * chunk;
      uint64_t count = std::min(chunk, total - first);
      trace_chunk(s, res.geometry, opt, first, count, outputs[k]);
    }
  };
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Merge in chunk order: the result is independent of the thread count.
  for (uint64_t k = 0; k < n_chunks; ++k) {
    ChunkOutput& o = outputs[k];
    for (size_t c = 0; c < n_classes; ++c) {
      auto& dst = res.per_class[c];
      dst.insert(dst.end(), o.per_class[c].begin(), o.per_class[c].end());
    }
    res.capture.insert(res.capture.end(), o.capture.begin(), o.capture.end());
    res.crossing_count += o.crossing_count;
    res.crossing_weight += o.crossing_weight;
  }
  return res;
}

namespace {
constexpr char kDumpMagic[8] = {'U', 'V', 'L', 'C', 'D', 'M', 'P', '1'};
}

void write_photon_dump(const std::string& path, const PhotonDumpHeader& h,
                       const std::vector<DetectedPhoton>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open dump for writing: " + path);
  PhotonDumpHeader hh = h;
  hh.record_count = records.size();
  out.write(kDumpMagic, 8);
  out.write(reinterpret_cast<const char*>(&hh.scenario_hash), 8);
  out.write(reinterpret_cast<const char*>(&hh.seed), 8);
  out.write(reinterpret_cast<const char*>(&hh.photon_count), 8);
  out.write(reinterpret_cast<const char*>(&hh.capture_radius), 8);
  out.write(reinterpret_cast<const char*>(&hh.record_count), 8);
  for (const DetectedPhoton& r : records) {
    double rec[5] = {r.t, r.x, r.y, r.zenith, r.weight};
    out.write(reinterpret_cast<const char*>(rec), sizeof(rec));
  }
  if (!out) throw std::runtime_error("short write to dump: " + path);
}

PhotonDumpHeader read_photon_dump(const std::string& path,
                                  std::vector<DetectedPhoton>& records) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dump: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kDumpMagic, 8) != 0)
    throw std::runtime_error("not a photon dump: " + path);
  PhotonDumpHeader h;
  in.read(reinterpret_cast<char*>(&h.scenario_hash), 8);
  in.read(reinterpret_cast<char*>(&h.seed), 8);
  in.read(reinterpret_cast<char*>(&h.photon_count), 8);
  in.read(reinterpret_cast<char*>(&h.capture_radius), 8);
  in.read(reinterpret_cast<char*>(&h.record_count), 8);
  if (!in) throw std::runtime_error("truncated dump header: " + path);
  records.clear();
  records.reserve(h.record_count);
  for (uint64_t i = 0; i < h.record_count; ++i) {
    double rec[5];
    in.read(reinterpret_cast<char*>(rec), sizeof(rec));
    if (!in) throw std::runtime_error("truncated dump records: " + path);
    records.push_back(DetectedPhoton{rec[0], rec[1], rec[2], rec[3], rec[4]});
  }
  return h;
}

} // namespace uvlc
