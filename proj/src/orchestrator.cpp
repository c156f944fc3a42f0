#include "uvlc/orchestrator.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "uvlc/ber_photon_counting.hpp"
#include "uvlc/constants.hpp"

namespace fs = std::filesystem;

namespace uvlc {

std::string cache_root() {
  if (const char* env = std::getenv("UVLC_CACHE_DIR"); env && *env)
    return env;
  return ".uvlc-cache";
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Radius of the dump capture disc: wide enough for the default spatial map
// and for every receiver disc.
double derived_capture_radius(const Scenario& s, const ReceiverGeometry& g) {
  double r = SpatialMapConfig{}.extent * M_SQRT1_2; // circumscribes the map
  for (const auto& c : g.classes)
    r = std::max(r, std::abs(c.cx) + c.radius);
  return r;
}

void update_index(const Scenario& s, uint64_t hash, bool has_dump,
                  size_t classes, std::ostream& log) {
  const fs::path path = fs::path(cache_root()) / "index.json";
  nlohmann::json idx;
  if (fs::exists(path)) {
    std::ifstream in(path);
    try {
      in >> idx;
    } catch (const nlohmann::json::exception&) {
      log << "warning: rebuilding unreadable cache index " << path.string()
          << "\n";
      idx = nlohmann::json::object();
    }
  }
  if (!idx.is_object()) idx = nlohmann::json::object();
  nlohmann::json entry;
  entry["scenario"] = s.name;
  entry["photons"] = s.transport.photon_count;
  entry["seed"] = s.transport.seed;
  entry["classes"] = classes;
  entry["dump"] = has_dump;
  idx[hash_hex(hash)] = entry;
  std::ofstream out(path);
  out << idx.dump(2) << "\n";
}

struct Report {
  std::ofstream file;
  std::ostream* out;
  explicit Report(const std::string& path) {
    if (path.empty() || path == "-") {
      out = &std::cout;
    } else {
      file.open(path);
      if (!file)
        throw std::runtime_error("cannot open output file: " + path);
      out = &file;
    }
  }
  template <typename T>
  Report& operator<<(const T& v) {
    *out << v;
    return *this;
  }
};

void write_preamble(Report& r, const char* kind, const Scenario& s,
                    uint64_t hash) {
  r << "# " << kind << "\n";
  r << "# code=" << kCodeVersion << "\n";
  r << "# scenario=" << s.name << "\n";
  r << "# hash=" << hash_hex(hash) << "\n";
  r << "# seed=" << s.transport.seed << "\n";
  r << "# photons=" << s.transport.photon_count << "\n";
}

} // namespace

ChannelData ensure_ffirs(const Scenario& s, const EnsureOptions& opt,
                         std::ostream& log) {
  ValidationReport vr = validate_scenario(s);
  if (!vr.ok()) {
    std::string what = "invalid scenario:";
    for (const auto& e : vr.errors) what += "\n  " + e;
    throw std::invalid_argument(what);
  }
  for (const auto& w : vr.warnings) log << "warning: " << w << "\n";

  ChannelData data;
  data.hash = scenario_hash(s);
  data.geometry = receiver_geometry(s);
  const size_t n_classes = data.geometry.classes.size();
  const fs::path dir = fs::path(cache_root()) / hash_hex(data.hash);
  const fs::path dump_path = dir / "photons.dump";

  bool have_cache = !opt.force_retrace;
  if (have_cache && opt.dump_photons && !fs::exists(dump_path)) {
    have_cache = false;
    log << "note: cached responses lack a photon dump; re-tracing\n";
  }
  if (have_cache) {
    std::vector<FfirHistogram> loaded;
    for (size_t k = 0; k < n_classes && have_cache; ++k) {
      const fs::path p = dir / ("class" + std::to_string(k) + ".ffir");
      if (!fs::exists(p)) {
        have_cache = false;
        break;
      }
      try {
        FfirCacheMeta meta;
        FfirHistogram f = read_ffir_cache(p.string(), meta);
        if (meta.scenario_hash != data.hash ||
            meta.seed != s.transport.seed ||
            meta.photons != s.transport.photon_count) {
          log << "warning: stale cache entry " << p.string()
              << "; re-tracing\n";
          have_cache = false;
        } else {
          loaded.push_back(std::move(f));
        }
      } catch (const std::exception& e) {
        log << "warning: corrupt cache entry " << p.string() << " ("
            << e.what() << "); re-tracing\n";
        have_cache = false;
      }
    }
    if (have_cache && loaded.size() == n_classes) {
      data.class_ffir = std::move(loaded);
      data.from_cache = true;
    } else {
      have_cache = false;
    }
  }

  if (!have_cache) {
    TraceOptions topt;
    topt.threads = opt.threads;
    if (opt.dump_photons)
      topt.capture_radius = s.transport.capture_radius > 0.0
                                ? s.transport.capture_radius
                                : derived_capture_radius(s, data.geometry);
    TraceResult tr = trace_photons(s, topt);
    data.class_ffir.reserve(n_classes);
    for (size_t k = 0; k < n_classes; ++k)
      data.class_ffir.push_back(bin_ffir(tr.per_class[k],
                                         s.transport.photon_count,
                                         s.transport.bins));
    fs::create_directories(dir);
    FfirCacheMeta meta;
    meta.scenario_hash = data.hash;
    meta.seed = s.transport.seed;
    meta.photons = s.transport.photon_count;
    for (size_t k = 0; k < n_classes; ++k)
      write_ffir_cache((dir / ("class" + std::to_string(k) + ".ffir")).string(),
                       data.class_ffir[k], meta);
    if (opt.dump_photons) {
      PhotonDumpHeader h;
      h.scenario_hash = data.hash;
      h.seed = s.transport.seed;
      h.photon_count = s.transport.photon_count;
      h.capture_radius = topt.capture_radius;
      h.record_count = tr.capture.size();
      write_photon_dump(dump_path.string(), h, tr.capture);
    }
    update_index(s, data.hash, fs::exists(dump_path), n_classes, log);
  }

  data.link_ffir.reserve(s.layout.tx_count * s.layout.rx_count);
  for (int i = 0; i < s.layout.tx_count; ++i)
    for (int j = 0; j < s.layout.rx_count; ++j)
      data.link_ffir.push_back(
          data.class_ffir[data.geometry.link_class(i, j)]);
  return data;
}

SweepSpec parse_sweep(const std::string& text) {
  SweepSpec sp;
  char c1 = 0, c2 = 0, tail = 0;
  std::istringstream in(text);
  if (!(in >> sp.start >> c1 >> sp.step >> c2 >> sp.stop) || c1 != ':' ||
      c2 != ':' || (in >> tail))
    throw std::invalid_argument("sweep must look like start:step:stop, got '" +
                                text + "'");
  if (sp.step <= 0.0)
    throw std::invalid_argument("sweep step must be positive");
  if (sp.stop < sp.start)
    throw std::invalid_argument("sweep stop must be >= start");
  return sp;
}

std::vector<double> sweep_points(const SweepSpec& sweep) {
  std::vector<double> pts;
  const int n =
      static_cast<int>(std::floor((sweep.stop - sweep.start) / sweep.step +
                                  1e-9)) +
      1;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) pts.push_back(sweep.start + i * sweep.step);
  return pts;
}

int run_validate(const Scenario& s, std::ostream& log) {
  ValidationReport vr = validate_scenario(s);
  for (const auto& e : vr.errors) log << "error: " << e << "\n";
  for (const auto& w : vr.warnings) log << "warning: " << w << "\n";
  if (vr.ok()) {
    log << "ok: scenario '" << s.name << "' hash " << hash_hex(scenario_hash(s))
        << "\n";
    return kExitOk;
  }
  return kExitConfig;
}

int run_simulate_channel(const Scenario& s, const EnsureOptions& opt,
                         const std::string& out_path, std::ostream& log) {
  ChannelData data = ensure_ffirs(s, opt, log);
  const double slot = s.modem.bit_duration();
  Report r(out_path);
  write_preamble(r, "uvlc-channel v1", s, data.hash);
  r << "# bit_rate=" << fmt(s.modem.bit_rate) << "\n";
  r << "tx,rx,class,rho0,rho1,rho2,rho3,rho4,mean_delay_s,rms_delay_s,"
       "memory_bits\n";
  for (int i = 0; i < s.layout.tx_count; ++i) {
    for (int j = 0; j < s.layout.rx_count; ++j) {
      const int cls = data.geometry.link_class(i, j);
      const FfirHistogram& f = data.class_ffir[cls];
      LossProfile lp = loss_coefficients(f, slot, 5);
      DelaySpread ds = rms_delay_spread(f);
      r << i << "," << j << "," << cls;
      for (int k = 0; k < 5; ++k) r << "," << fmt(lp.rho[k]);
      r << "," << fmt(ds.mean_delay) << "," << fmt(ds.rms) << ","
        << channel_memory(f, slot) << "\n";
    }
  }
  return kExitOk;
}

int run_analyze_ber(const Scenario& s, const std::string& method,
                    const SweepSpec& sweep, const AveragingOptions& avg,
                    const std::string& out_path, std::ostream& log) {
  const auto dash = method.find('-');
  if (dash == std::string::npos)
    throw std::invalid_argument(
        "method must be family-averaging, e.g. analytic-ghqf or "
        "counting-lognormal-sum");
  const std::string family = method.substr(0, dash);
  const FadingAverage fa = fading_average_from_string(method.substr(dash + 1));
  if (family != "analytic" && family != "counting")
    throw std::invalid_argument("unknown method family: " + family);

  ChannelData data = ensure_ffirs(s, EnsureOptions{}, log);
  Report r(out_path);
  write_preamble(r, "uvlc-ber v1", s, data.hash);
  r << "# method=" << method << "\n";
  r << "# bit_rate=" << fmt(s.modem.bit_rate) << "\n";
  r << "power_dbm,ber,std_error\n";
  if (family == "analytic") {
    AnalyticBerModel model = build_analytic_model(s, data.link_ffir);
    for (double dbm : sweep_points(sweep)) {
      BerEstimate e = analytic_ber(model, dbm_to_watt(dbm), fa, avg);
      r << fmt(dbm) << "," << fmt(e.ber) << "," << fmt(e.std_error) << "\n";
    }
  } else {
    CountingBerModel model = build_counting_model(s, data.link_ffir);
    for (double dbm : sweep_points(sweep)) {
      BerEstimate e = counting_ber(model, dbm_to_watt(dbm), fa, avg);
      r << fmt(dbm) << "," << fmt(e.ber) << "," << fmt(e.std_error) << "\n";
    }
  }
  return kExitOk;
}

int run_simulate_ber(const Scenario& s, const SequenceDetectorConfig& det,
                     const SequenceRunConfig& run, const SweepSpec& sweep,
                     const std::string& out_path, std::ostream& log) {
  ChannelData data = ensure_ffirs(s, EnsureOptions{}, log);
  const FfirHistogram& f = data.link_ffir.at(0);
  Report r(out_path);
  write_preamble(r, "uvlc-waveform-ber v1", s, data.hash);
  r << "# detector=" << to_string(det.kind) << "\n";
  r << "# window=" << det.window << "\n";
  r << "# run_seed=" << run.seed << "\n";
  r << "power_dbm,ber,errors,bits,bursts,ci_lo,ci_hi,fallback_windows\n";
  for (double dbm : sweep_points(sweep)) {
    SequenceSimResult res =
        simulate_sequence_ber(s, f, dbm_to_watt(dbm), det, run);
    r << fmt(dbm) << "," << fmt(res.ber) << "," << res.errors << ","
      << res.bits << "," << res.bursts << "," << fmt(res.ci99.lo) << ","
      << fmt(res.ci99.hi) << "," << res.fallback_windows << "\n";
  }
  return kExitOk;
}

int run_spatial_map(const Scenario& s, const SpatialMapConfig& cfg,
                    const std::string& out_path, std::ostream&) {
  const uint64_t hash = scenario_hash(s);
  const fs::path dump_path =
      fs::path(cache_root()) / hash_hex(hash) / "photons.dump";
  if (!fs::exists(dump_path))
    throw MissingPrerequisite(
        "no photon dump for scenario hash " + hash_hex(hash) +
        "; run simulate-channel --dump-photons first");
  std::vector<DetectedPhoton> records;
  PhotonDumpHeader h = read_photon_dump(dump_path.string(), records);
  if (h.scenario_hash != hash)
    throw MissingPrerequisite(
        "photon dump " + dump_path.string() +
        " belongs to a different scenario; re-run simulate-channel "
        "--dump-photons");
  SpatialMap map = spatial_map(records, h.photon_count, cfg);
  Report r(out_path);
  write_preamble(r, "uvlc-spatial v1", s, hash);
  r << "# extent_m=" << fmt(cfg.extent) << "\n";
  r << "# pixels=" << cfg.pixels << "\n";
  r << "# window_s=" << fmt(map.window) << "\n";
  r << "# gate_start_s=" << fmt(map.gate_start) << "\n";
  r << "# rows are y from -extent/2 up, columns x from -extent/2 right\n";
  for (int row = 0; row < map.db.rows(); ++row) {
    for (int col = 0; col < map.db.cols(); ++col) {
      if (col) r << ",";
      r << fmt(map.db(row, col));
    }
    r << "\n";
  }
  return kExitOk;
}

} // namespace uvlc
