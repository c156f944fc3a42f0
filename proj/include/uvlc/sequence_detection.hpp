#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "uvlc/ber_analytic.hpp"
#include "uvlc/channel.hpp"
#include "uvlc/math.hpp"
#include "uvlc/scenario.hpp"

namespace uvlc {

enum class DetectorKind { sbsd, gmsd, msd };

DetectorKind detector_from_string(const std::string& name);
std::string to_string(DetectorKind k);

struct SequenceDetectorConfig {
  DetectorKind kind = DetectorKind::gmsd;
  int window = 4;           // bits decided jointly per window
  int samples_per_chip = 32;
  int ghqf_order = 30;      // fading quadrature order inside the msd metric
  // Genie aid: evaluate the sequence metric at this fixed channel gain
  // instead of maximizing/averaging over it.
  std::optional<double> fixed_gain;
};

// Sampled-waveform machinery shared by the simulator and the detectors.
// Sample m sits at (m + 0.5) * dt in the receiver clock whose origin is the
// first arrival of the channel response.
struct WaveformModel {
  double dt = 0.0;        // sample spacing, s
  double sigma_sample = 0.0; // per-sample noise standard deviation, A
  int samples_per_bit = 0;
  int proto_len = 0;      // support length of one pulse response, samples
  Eigen::ArrayXd proto0;  // noiseless current of a bit-0 pulse at bit slot 0
  Eigen::ArrayXd proto1;  // same for a bit-1 pulse
  int memory = 0;         // past bits whose tails still reach a window
};

WaveformModel build_waveform_model(const Scenario& s, const FfirHistogram& f,
                                   double power_w, int samples_per_chip = 32);

struct SequenceRunConfig {
  uint64_t seed = 1;
  uint64_t max_bits = 2'000'000;
  uint64_t target_errors = 200; // stop after the burst reaching this count
  int windows_per_burst = 24;
};

struct SequenceSimResult {
  uint64_t bits = 0;
  uint64_t errors = 0;
  uint64_t bursts = 0;
  uint64_t fallback_windows = 0; // gmsd windows decided by the fallback rule
  double ber = 0.0;
  Interval ci99; // Wilson score interval at 99% confidence
};

// Monte Carlo bit error rate of the configured detector over synthesized
// bursts. Each burst sees one fading realization, a known warm-up prefix of
// `memory` zero bits, then windows_per_burst * window data bits. Detection is
// window-by-window with decision feedback of previously decided bits.
SequenceSimResult simulate_sequence_ber(const Scenario& s,
                                        const FfirHistogram& f, double power_w,
                                        const SequenceDetectorConfig& det,
                                        const SequenceRunConfig& run);

} // namespace uvlc
