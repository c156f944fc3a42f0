#include "uvlc/sequence_detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "uvlc/fading.hpp"
#include "uvlc/rng.hpp"

namespace uvlc {

DetectorKind detector_from_string(const std::string& name) {
  if (name == "sbsd") return DetectorKind::sbsd;
  if (name == "gmsd") return DetectorKind::gmsd;
  if (name == "msd") return DetectorKind::msd;
  throw std::invalid_argument("unknown detector: " + name);
}

std::string to_string(DetectorKind k) {
  switch (k) {
    case DetectorKind::sbsd: return "sbsd";
    case DetectorKind::gmsd: return "gmsd";
    case DetectorKind::msd: return "msd";
  }
  return "?";
}

WaveformModel build_waveform_model(const Scenario& s, const FfirHistogram& f,
                                   double power_w, int samples_per_chip) {
  if (samples_per_chip < 4 || samples_per_chip > 256)
    throw std::invalid_argument("samples_per_chip out of range [4, 256]");
  WaveformModel wm;
  DetectionFrontEnd fe = detection_front_end(s);
  const double chip = fe.chip;
  wm.dt = chip / samples_per_chip;
  wm.samples_per_bit = 2 * samples_per_chip;
  wm.sigma_sample = std::sqrt(fe.sigma2_tc / (chip * wm.dt));
  wm.proto_len =
      static_cast<int>((2.0 * chip + f.span()) / wm.dt) + 2;
  wm.proto0 = Eigen::ArrayXd::Zero(wm.proto_len);
  wm.proto1 = Eigen::ArrayXd::Zero(wm.proto_len);
  const double amp = 2.0 * fe.responsivity * power_w; // peak current per unit H
  for (int m = 0; m < wm.proto_len; ++m) {
    const double t = (m + 0.5) * wm.dt;
    wm.proto0[m] = amp * (f.cumulative(t) - f.cumulative(t - chip));
    wm.proto1[m] =
        amp * (f.cumulative(t - chip) - f.cumulative(t - 2.0 * chip));
  }
  wm.memory = std::max(0, (wm.proto_len - 1) / wm.samples_per_bit);
  return wm;
}

namespace {

struct CandidateTables {
  // Cross energies of window-bit templates truncated at the window end:
  // x[v][v'](j, j') with j <= j', v the value at j, v' at j'.
  Eigen::MatrixXd x[2][2];
  Eigen::ArrayXd d_ww; // composite template energy per candidate
};

CandidateTables build_candidate_tables(const WaveformModel& wm, int window) {
  const int spb = wm.samples_per_bit;
  const int w_len = window * spb;
  CandidateTables t;
  for (auto& row : t.x)
    for (auto& m : row) m = Eigen::MatrixXd::Zero(window, window);
  const Eigen::ArrayXd* proto[2] = {&wm.proto0, &wm.proto1};
  for (int j = 0; j < window; ++j) {
    for (int jp = j; jp < window; ++jp) {
      const int off = (jp - j) * spb;
      if (off >= wm.proto_len) continue;
      const int lim =
          std::min(wm.proto_len - off, std::min(wm.proto_len, w_len - jp * spb));
      if (lim <= 0) continue;
      for (int v = 0; v < 2; ++v)
        for (int vp = 0; vp < 2; ++vp)
          t.x[v][vp](j, jp) = (proto[v]->segment(off, lim) *
                               proto[vp]->segment(0, lim))
                                  .sum();
    }
  }
  const int count = 1 << window;
  t.d_ww = Eigen::ArrayXd::Zero(count);
  for (int c = 0; c < count; ++c) {
    double d = 0.0;
    for (int j = 0; j < window; ++j) {
      const int bj = (c >> (window - 1 - j)) & 1;
      d += t.x[bj][bj](j, j);
      for (int jp = j + 1; jp < window; ++jp) {
        const int bp = (c >> (window - 1 - jp)) & 1;
        d += 2.0 * t.x[bj][bp](j, jp);
      }
    }
    t.d_ww[c] = d;
  }
  return t;
}

int sbsd_bit(const Eigen::ArrayXd& r, long base, int spc) {
  const double first = r.segment(base, spc).sum();
  const double second = r.segment(base + spc, spc).sum();
  return second > first ? 1 : 0; // tie resolves to 0
}

} // namespace

SequenceSimResult simulate_sequence_ber(const Scenario& s,
                                        const FfirHistogram& f, double power_w,
                                        const SequenceDetectorConfig& det,
                                        const SequenceRunConfig& run) {
  if (s.layout.tx_count != 1 || s.layout.rx_count != 1)
    throw std::invalid_argument(
        "sequence detection simulates single-transmitter, single-receiver "
        "links");
  const bool windowed = det.kind != DetectorKind::sbsd;
  if (windowed && det.window < 1)
    throw std::invalid_argument("window must be >= 1");
  if (det.kind == DetectorKind::gmsd && det.window > 12)
    throw CostGuardError("gmsd window capped at 12 bits (2^P candidates)");
  if (det.kind == DetectorKind::msd && det.window > 8)
    throw CostGuardError("msd window capped at 8 bits (2^P candidates times "
                         "quadrature nodes)");

  const WaveformModel wm = build_waveform_model(s, f, power_w,
                                                det.samples_per_chip);
  const int spb = wm.samples_per_bit;
  const int spc = spb / 2;
  const int window = det.window;
  const int w_len = window * spb;
  const int memory = wm.memory;
  const int data_bits = run.windows_per_burst * window;
  const int total_bits = memory + data_bits;
  const long sig_len = static_cast<long>(total_bits) * spb;

  const double sigma2_x = s.fading.sigma2_for(0, 0);
  // Channel-gain hypotheses for the msd metric.
  Eigen::ArrayXd h_nodes(1), ln_w(1);
  h_nodes[0] = 1.0;
  ln_w[0] = 0.0;
  if (det.kind == DetectorKind::msd && sigma2_x > 0.0) {
    FadingQuadrature q = unit_fading_quadrature(det.ghqf_order, sigma2_x);
    h_nodes = q.h;
    ln_w = q.weight.log();
  }
  const double inv_2s2 =
      1.0 / (2.0 * wm.sigma_sample * wm.sigma_sample);

  CandidateTables tables;
  if (windowed) tables = build_candidate_tables(wm, window);
  const int n_cand = windowed ? (1 << window) : 0;
  const Eigen::ArrayXd* proto[2] = {&wm.proto0, &wm.proto1};

  SequenceSimResult res;
  Eigen::ArrayXd sig(sig_len), r(sig_len), past(w_len);
  Eigen::ArrayXd a_t(2 * std::max(window, 1)), u_t(2 * std::max(window, 1));
  std::vector<int> bits(total_bits), decided(total_bits);

  for (uint64_t burst = 0;; ++burst) {
    if (res.errors >= run.target_errors || res.bits >= run.max_bits) break;

    RandomStream bit_rng(run.seed, StreamDomain::waveform_bits, burst);
    RandomStream noise_rng(run.seed, StreamDomain::waveform_noise, burst);
    RandomStream fade_rng(run.seed, StreamDomain::waveform_fading, burst);
    const double gain =
        sigma2_x > 0.0 ? sample_fading(fade_rng, sigma2_x) : 1.0;

    for (int k = 0; k < memory; ++k) bits[k] = 0; // known warm-up prefix
    for (int k = memory; k < total_bits; ++k)
      bits[k] = bit_rng.uniform01() < 0.5 ? 0 : 1;

    sig.setZero();
    for (int k = 0; k < total_bits; ++k) {
      const long base = static_cast<long>(k) * spb;
      const int lim = static_cast<int>(
          std::min<long>(wm.proto_len, sig_len - base));
      if (lim > 0)
        sig.segment(base, lim) += gain * proto[bits[k]]->segment(0, lim);
    }
    for (long m = 0; m < sig_len; ++m)
      r[m] = sig[m] + wm.sigma_sample * noise_rng.gaussian();

    for (int k = 0; k < memory; ++k) decided[k] = 0;

    if (!windowed) {
      for (int k = memory; k < total_bits; ++k) {
        const int b = sbsd_bit(r, static_cast<long>(k) * spb, spc);
        res.errors += (b != bits[k]);
      }
      res.bits += data_bits;
      res.bursts += 1;
      continue;
    }

    for (int w = 0; w < run.windows_per_burst; ++w) {
      const int k0 = memory + w * window;
      const long base = static_cast<long>(k0) * spb;

      // Unit-gain feedback template: the channel gain is unknown to the
      // detector, so the metrics scale past and window jointly by the same
      // hypothesis gain.
      past.setZero();
      for (int d = 1; d <= std::min(memory, k0); ++d) {
        const int off = d * spb;
        if (off >= wm.proto_len) break;
        const int lim = std::min(wm.proto_len - off, w_len);
        past.segment(0, lim) += proto[decided[k0 - d]]->segment(off, lim);
      }
      const double a_past = (r.segment(base, w_len) * past).sum();
      const double d_pp = past.square().sum();

      for (int j = 0; j < window; ++j) {
        const int lim = std::min(wm.proto_len, w_len - j * spb);
        for (int v = 0; v < 2; ++v) {
          a_t[2 * j + v] = (r.segment(base + j * spb, lim) *
                            proto[v]->segment(0, lim))
                               .sum();
          u_t[2 * j + v] =
              (past.segment(j * spb, lim) * proto[v]->segment(0, lim)).sum();
        }
      }

      double best = -std::numeric_limits<double>::infinity();
      int best_c = -1;
      // The h-maximized quadratic metric is zero for every candidate whose
      // matched output is nonpositive; when that happens across the board the
      // window carries no sequence information and the fallback rule decides.
      bool informative = false;
      for (int c = 0; c < n_cand; ++c) {
        double a_cand = 0.0, u_cand = 0.0;
        for (int j = 0; j < window; ++j) {
          const int bj = (c >> (window - 1 - j)) & 1;
          a_cand += a_t[2 * j + bj];
          u_cand += u_t[2 * j + bj];
        }
        const double a_tot = a_past + a_cand;
        const double d_tot = d_pp + 2.0 * u_cand + tables.d_ww[c];
        double metric;
        if (det.fixed_gain) {
          const double h = *det.fixed_gain;
          metric = 2.0 * h * a_tot - h * h * d_tot;
          if (det.kind == DetectorKind::msd) metric *= inv_2s2;
        } else if (det.kind == DetectorKind::gmsd) {
          if (d_tot <= 0.0) continue; // degenerate candidate, rejected
          metric = a_tot > 0.0 ? a_tot * a_tot / d_tot : 0.0;
          if (metric > 0.0) informative = true;
        } else {
          // log of the fading-averaged likelihood, up to a shared constant
          double peak = -std::numeric_limits<double>::infinity();
          for (int q = 0; q < h_nodes.size(); ++q) {
            const double h = h_nodes[q];
            peak = std::max(peak, ln_w[q] + inv_2s2 * (2.0 * h * a_tot -
                                                       h * h * d_tot));
          }
          double acc = 0.0;
          for (int q = 0; q < h_nodes.size(); ++q) {
            const double h = h_nodes[q];
            acc += std::exp(ln_w[q] +
                            inv_2s2 * (2.0 * h * a_tot - h * h * d_tot) -
                            peak);
          }
          metric = peak + std::log(acc);
        }
        if (metric > best) { // strict: ties keep the smallest candidate
          best = metric;
          best_c = c;
        }
      }
      if (det.kind == DetectorKind::gmsd && !det.fixed_gain && !informative)
        best_c = -1;

      if (best_c < 0) {
        res.fallback_windows += 1;
        for (int j = 0; j < window; ++j)
          decided[k0 + j] = sbsd_bit(r, base + j * spb, spc);
      } else {
        for (int j = 0; j < window; ++j)
          decided[k0 + j] = (best_c >> (window - 1 - j)) & 1;
      }
      for (int j = 0; j < window; ++j)
        res.errors += (decided[k0 + j] != bits[k0 + j]);
      res.bits += window;
    }
    res.bursts += 1;
  }

  res.ber = res.bits ? static_cast<double>(res.errors) / res.bits : 0.0;
  res.ci99 = wilson_interval(static_cast<double>(res.errors),
                             static_cast<double>(res.bits), kZ99);
  return res;
}

} // namespace uvlc
