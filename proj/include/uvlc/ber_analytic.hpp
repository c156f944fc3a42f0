#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "uvlc/channel.hpp"
#include "uvlc/scenario.hpp"

namespace uvlc {

// Raised when a request exceeds a deliberate computational cost ceiling
// (tensor quadrature dimensions, sequence-detection window width).
struct CostGuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Receiver front-end quantities shared by the Gaussian and photon-counting
// error models. All per one chip integration window of duration `chip`.
struct DetectionFrontEnd {
  double bit = 0.0;          // T, s
  double chip = 0.0;         // Tc = T/2, s
  double bandwidth = 0.0;    // B = 1/T, Hz
  double responsivity = 0.0; // A/W
  double sigma2_tc = 0.0;    // integrated-current noise variance, C^2
  double sigma2_th = 0.0;    // thermal part alone, photoelectron counts^2
  double background_rate = 0.0; // ambient photoelectrons/s, whole array
  double dark_rate = 0.0;       // dark photoelectrons/s, per receiver
};

DetectionFrontEnd detection_front_end(const Scenario& s);

// Chip-window overlap integrals of one link's impulse response against the
// binary PPM pulse alphabet, per unit average transmit power. The pulse peaks
// at twice the average power (half duty cycle), and that factor is included.
// Units: C/W (charge per chip window per watt of average transmit power).
struct GammaCoefficients {
  double f_s0 = 0.0, s_s0 = 0.0; // current bit 0: first/second chip windows
  double f_s1 = 0.0, s_s1 = 0.0; // current bit 1
  // Interference of the bit k slots in the past (index k-1), by its value.
  Eigen::ArrayXd f_i0, s_i0;
  Eigen::ArrayXd f_i1, s_i1;

  int memory() const { return static_cast<int>(f_i0.size()); }
};

GammaCoefficients gamma_from_ffir(const FfirHistogram& f, double chip,
                                  double responsivity, int memory);

// Per-history, per-link charge gains for the two chip windows under each
// current-bit hypothesis, folded over the interfering bit pattern. Rows are
// histories, columns are links in row-major (tx*rx_count + rx) order. The
// 1/tx_count power split is included, so entries are per unit total average
// transmit power.
struct LinkGainTable {
  Eigen::MatrixXd f0, s0; // current bit 0
  Eigen::MatrixXd f1, s1; // current bit 1
  Eigen::ArrayXd weight;  // per-history probability, sums to 1
  int memory = 0;
  bool sampled = false; // true when histories were sampled, not enumerated
};

LinkGainTable link_gain_table(const std::vector<GammaCoefficients>& links,
                              int tx_count, uint64_t seed, int history_cap,
                              int sample_count = 4096);

struct AnalyticBerModel {
  DetectionFrontEnd fe;
  LinkGainTable table;
  int tx_count = 1;
  int rx_count = 1;
  Eigen::ArrayXd sigma2; // per-link log-amplitude variance, row-major
};

// link_ffir holds one response per link, row-major (tx*rx_count + rx).
AnalyticBerModel build_analytic_model(const Scenario& s,
                                      const std::vector<FfirHistogram>& link_ffir);

// Error probability for one fade realization per link (unit fades = no
// fading), averaged over the interference histories.
double analytic_conditional_ber(const AnalyticBerModel& m,
                                const Eigen::ArrayXd& fades, double power_w);

enum class FadingAverage { none, ghqf, quadrature, lognormal_sum, monte_carlo };

FadingAverage fading_average_from_string(const std::string& name);
std::string to_string(FadingAverage m);

struct BerEstimate {
  double ber = 0.0;
  double std_error = 0.0; // nonzero only for monte_carlo
};

struct AveragingOptions {
  int ghqf_order = 30;
  uint64_t mc_draws = 10'000'000;
  uint64_t seed = 1;
  double quadrature_rel_tol = 1e-11;
  // Tensor quadrature cost guard: refuse more than this many fading
  // dimensions (30^d conditional evaluations).
  int max_ghqf_dims = 4;
};

BerEstimate analytic_ber(const AnalyticBerModel& m, double power_w,
                         FadingAverage method, const AveragingOptions& opt = {});

inline double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w / 1e-3); }

} // namespace uvlc
