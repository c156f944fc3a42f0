#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "uvlc/ber_analytic.hpp"
#include "uvlc/channel.hpp"
#include "uvlc/scenario.hpp"
#include "uvlc/sequence_detection.hpp"
#include "uvlc/transport.hpp"

namespace uvlc {

// Process exit codes shared with the command line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitCostGuard = 3;
inline constexpr int kExitMissingPrereq = 4;

// Raised when a command needs an artifact that has not been produced yet
// (e.g. a spatial map without a photon dump).
struct MissingPrerequisite : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// $UVLC_CACHE_DIR, or ".uvlc-cache" under the working directory.
std::string cache_root();

struct ChannelData {
  ReceiverGeometry geometry;
  std::vector<FfirHistogram> class_ffir; // one per receiver class
  std::vector<FfirHistogram> link_ffir;  // row-major tx*rx_count + rx
  uint64_t hash = 0;
  bool from_cache = false;
};

struct EnsureOptions {
  bool dump_photons = false;
  bool force_retrace = false;
  int threads = 0; // 0 = hardware concurrency
};

// Returns cached per-class responses when the cache directory holds a
// complete, matching set; otherwise traces the scenario and refreshes the
// cache. Corrupt cache entries are reported to `log` and rebuilt.
ChannelData ensure_ffirs(const Scenario& s, const EnsureOptions& opt,
                         std::ostream& log);

struct SweepSpec {
  double start = 0.0; // dBm
  double step = 1.0;
  double stop = 0.0;
};

SweepSpec parse_sweep(const std::string& text); // "start:step:stop"
std::vector<double> sweep_points(const SweepSpec& sweep);

// Report writers. out_path "-" or "" writes to stdout. All reports embed the
// code version, the scenario name, its transport hash, and the seed; repeated
// runs produce byte-identical files.
int run_validate(const Scenario& s, std::ostream& log);
int run_simulate_channel(const Scenario& s, const EnsureOptions& opt,
                         const std::string& out_path, std::ostream& log);
int run_analyze_ber(const Scenario& s, const std::string& method,
                    const SweepSpec& sweep, const AveragingOptions& avg,
                    const std::string& out_path, std::ostream& log);
int run_simulate_ber(const Scenario& s, const SequenceDetectorConfig& det,
                     const SequenceRunConfig& run, const SweepSpec& sweep,
                     const std::string& out_path, std::ostream& log);
int run_spatial_map(const Scenario& s, const SpatialMapConfig& cfg,
                    const std::string& out_path, std::ostream& log);

} // namespace uvlc
