#pragma once

#include "uvlc/ber_analytic.hpp"

namespace uvlc {

// Tail probability machinery for the photon-counting decision statistic
// X = K_p - K_m + G with K_p ~ Poisson(m_p), K_m ~ Poisson(m_m), and
// G ~ N(0, 2v) Gaussian thermal noise. An error corresponds to X > 0 where
// m_p is the count mean of the chip window that should lose.
struct SaddleProblem {
  double v = 0.0;   // half the total Gaussian variance, counts^2
  double m_p = 0.0; // Poisson mean entering with +1
  double m_m = 0.0; // Poisson mean entering with -1
};

struct SaddleSolution {
  double s = 0.0;    // saddle point, > 0
  double phi = 0.0;  // Phi(s) = ln E[exp(sX)] - ln s
  double phi2 = 0.0; // Phi''(s)
};

// Solves Phi'(s) = 0 on s > 0; Phi is strictly convex there.
SaddleSolution solve_saddle(const SaddleProblem& p);

// ln P(X > 0) by the saddle-point approximation (unclamped).
double log_saddle_tail(const SaddleProblem& p);

// P(X > 0), clamped to [0, 0.5].
double saddle_tail(const SaddleProblem& p);

// Exact reference for the same tail: the Poisson difference lattice summed
// against the Gaussian tail, truncated where the neglected probability mass
// falls below tail_eps.
double exact_tail(const SaddleProblem& p, double tail_eps = 1e-14);

struct CountingBerModel {
  DetectionFrontEnd fe;
  LinkGainTable table; // charge gains shared with the Gaussian model
  int tx_count = 1;
  int rx_count = 1;
  Eigen::ArrayXd sigma2; // per-link log-amplitude variance
  double v = 0.0;        // rx_count * per-receiver thermal counts^2
  double m_bd = 0.0;     // background+dark counts per chip window, whole array
};

CountingBerModel build_counting_model(const Scenario& s,
                                      const std::vector<FfirHistogram>& link_ffir);

// Error probability for one fade realization per link, averaged over the
// interference histories; each term via the saddle-point tail. Set
// brute_force to use the exact lattice sum instead.
double counting_conditional_ber(const CountingBerModel& m,
                                const Eigen::ArrayXd& fades, double power_w,
                                bool brute_force = false);

// Fading-averaged photon-counting error probability. lognormal_sum collapses
// the per-link fades onto one equivalent lognormal scaling of the total count
// (exact for a single link, first-two-moments matched for arrays).
BerEstimate counting_ber(const CountingBerModel& m, double power_w,
                         FadingAverage method, const AveragingOptions& opt = {},
                         bool brute_force = false);

} // namespace uvlc
