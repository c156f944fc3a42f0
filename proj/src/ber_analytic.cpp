#include "uvlc/ber_analytic.hpp"

#include <cmath>
#include <stdexcept>

#include "uvlc/constants.hpp"
#include "uvlc/fading.hpp"
#include "uvlc/math.hpp"
#include "uvlc/rng.hpp"

namespace uvlc {

DetectionFrontEnd detection_front_end(const Scenario& s) {
  DetectionFrontEnd fe;
  fe.bit = s.modem.bit_duration();
  fe.chip = s.modem.chip_duration();
  fe.bandwidth = s.modem.bit_rate;
  fe.responsivity = s.noise.responsivity(s.source.wavelength);
  const double pbg = s.noise.background_power_or_default(s.water.kd);
  const double tc2 = fe.chip * fe.chip;
  const double thermal = 4.0 * kBoltzmann * s.noise.temperature *
                         fe.bandwidth * tc2 / s.noise.load_resistance;
  const double shot_bg = 2.0 * kElementaryCharge * fe.responsivity * pbg *
                         fe.bandwidth * tc2;
  const double shot_dark = 2.0 * kElementaryCharge * s.noise.dark_current *
                           fe.bandwidth * tc2;
  fe.sigma2_tc = thermal + shot_bg + shot_dark;
  fe.sigma2_th = thermal / (kElementaryCharge * kElementaryCharge);
  const double photon_energy = kPlanck * kSpeedOfLight / s.source.wavelength;
  fe.background_rate = s.noise.quantum_efficiency * pbg / photon_energy;
  fe.dark_rate = s.noise.dark_current / kElementaryCharge;
  return fe;
}

GammaCoefficients gamma_from_ffir(const FfirHistogram& f, double chip,
                                  double responsivity, int memory) {
  // Integral over the window [a, b] of the response to a rectangular pulse
  // occupying chip slot l, including the 2x peak-to-average power ratio.
  auto J = [&](double a, double b, int l) {
    return 2.0 * (f.cumulative2(b - l * chip) - f.cumulative2(a - l * chip) -
                  f.cumulative2(b - (l + 1) * chip) +
                  f.cumulative2(a - (l + 1) * chip));
  };
  GammaCoefficients g;
  g.f_s0 = responsivity * J(0.0, chip, 0);
  g.s_s0 = responsivity * J(chip, 2.0 * chip, 0);
  g.f_s1 = responsivity * J(0.0, chip, 1);
  g.s_s1 = responsivity * J(chip, 2.0 * chip, 1);
  g.f_i0 = Eigen::ArrayXd::Zero(memory);
  g.s_i0 = Eigen::ArrayXd::Zero(memory);
  g.f_i1 = Eigen::ArrayXd::Zero(memory);
  g.s_i1 = Eigen::ArrayXd::Zero(memory);
  for (int k = 1; k <= memory; ++k) {
    const double fa = 2.0 * k * chip, fb = (2.0 * k + 1.0) * chip;
    const double sa = fb, sb = (2.0 * k + 2.0) * chip;
    g.f_i0[k - 1] = responsivity * J(fa, fb, 0);
    g.s_i0[k - 1] = responsivity * J(sa, sb, 0);
    g.f_i1[k - 1] = responsivity * J(fa, fb, 1);
    g.s_i1[k - 1] = responsivity * J(sa, sb, 1);
  }
  return g;
}

LinkGainTable link_gain_table(const std::vector<GammaCoefficients>& links,
                              int tx_count, uint64_t seed, int history_cap,
                              int sample_count) {
  const int nl = static_cast<int>(links.size());
  if (nl == 0) throw std::invalid_argument("link_gain_table: no links");
  int memory = 0;
  for (const auto& g : links) memory = std::max(memory, g.memory());

  LinkGainTable t;
  t.memory = memory;
  t.sampled = memory > history_cap;
  const int rows = t.sampled ? sample_count : (1 << memory);
  t.f0.resize(rows, nl);
  t.s0.resize(rows, nl);
  t.f1.resize(rows, nl);
  t.s1.resize(rows, nl);
  t.weight = Eigen::ArrayXd::Constant(rows, 1.0 / rows);

  RandomStream bits(seed, StreamDomain::history, 0);
  const double split = 1.0 / tx_count;
  std::vector<int> pattern(memory, 0);
  for (int p = 0; p < rows; ++p) {
    for (int k = 1; k <= memory; ++k)
      pattern[k - 1] = t.sampled ? (bits.uniform01() < 0.5 ? 1 : 0)
                                 : ((p >> (k - 1)) & 1);
    for (int l = 0; l < nl; ++l) {
      const GammaCoefficients& g = links[l];
      double fw = 0.0, sw = 0.0; // interference folded into each window
      for (int k = 1; k <= g.memory(); ++k) {
        if (pattern[k - 1]) {
          fw += g.f_i1[k - 1];
          sw += g.s_i1[k - 1];
        } else {
          fw += g.f_i0[k - 1];
          sw += g.s_i0[k - 1];
        }
      }
      t.f0(p, l) = split * (g.f_s0 + fw);
      t.s0(p, l) = split * (g.s_s0 + sw);
      t.f1(p, l) = split * (g.f_s1 + fw);
      t.s1(p, l) = split * (g.s_s1 + sw);
    }
  }
  return t;
}

AnalyticBerModel build_analytic_model(
    const Scenario& s, const std::vector<FfirHistogram>& link_ffir) {
  const int m_tx = s.layout.tx_count, n_rx = s.layout.rx_count;
  if (static_cast<int>(link_ffir.size()) != m_tx * n_rx)
    throw std::invalid_argument("build_analytic_model: need one response per link");
  AnalyticBerModel m;
  m.fe = detection_front_end(s);
  m.tx_count = m_tx;
  m.rx_count = n_rx;
  int memory = 0;
  for (const auto& f : link_ffir)
    memory = std::max(memory, channel_memory(f, m.fe.bit));
  std::vector<GammaCoefficients> gamma;
  gamma.reserve(link_ffir.size());
  for (const auto& f : link_ffir)
    gamma.push_back(gamma_from_ffir(f, m.fe.chip, m.fe.responsivity, memory));
  m.table = link_gain_table(gamma, m_tx, s.transport.seed, s.modem.history_cap);
  m.sigma2 = Eigen::ArrayXd::Zero(m_tx * n_rx);
  for (int i = 0; i < m_tx; ++i)
    for (int j = 0; j < n_rx; ++j)
      m.sigma2[i * n_rx + j] = s.fading.sigma2_for(i, j);
  return m;
}

namespace {

// History-averaged error probability for fixed per-link fades, using
// precomputed decision-margin matrices (rows: histories, cols: links).
double ber_for_fades(const Eigen::MatrixXd& diff0, const Eigen::MatrixXd& diff1,
                     const Eigen::ArrayXd& weight, const Eigen::VectorXd& fades,
                     double scale) {
  Eigen::ArrayXd m0 = (diff0 * fades).array();
  Eigen::ArrayXd m1 = (diff1 * fades).array();
  double ber = 0.0;
  for (int p = 0; p < m0.size(); ++p)
    ber += weight[p] *
           0.5 * (gaussian_q(scale * m0[p]) + gaussian_q(scale * m1[p]));
  return ber;
}

} // namespace

double analytic_conditional_ber(const AnalyticBerModel& m,
                                const Eigen::ArrayXd& fades, double power_w) {
  if (fades.size() != m.table.f0.cols())
    throw std::invalid_argument("analytic_conditional_ber: one fade per link");
  const double scale =
      power_w / std::sqrt(2.0 * m.rx_count * m.fe.sigma2_tc);
  return ber_for_fades(m.table.f0 - m.table.s0, m.table.s1 - m.table.f1,
                       m.table.weight, fades.matrix(), scale);
}

FadingAverage fading_average_from_string(const std::string& name) {
  if (name == "none") return FadingAverage::none;
  if (name == "ghqf") return FadingAverage::ghqf;
  if (name == "quadrature") return FadingAverage::quadrature;
  if (name == "lognormal-sum") return FadingAverage::lognormal_sum;
  if (name == "mc" || name == "monte-carlo") return FadingAverage::monte_carlo;
  throw std::invalid_argument("unknown fading average: " + name);
}

std::string to_string(FadingAverage m) {
  switch (m) {
    case FadingAverage::none: return "none";
    case FadingAverage::ghqf: return "ghqf";
    case FadingAverage::quadrature: return "quadrature";
    case FadingAverage::lognormal_sum: return "lognormal-sum";
    case FadingAverage::monte_carlo: return "mc";
  }
  return "?";
}

BerEstimate analytic_ber(const AnalyticBerModel& m, double power_w,
                         FadingAverage method, const AveragingOptions& opt) {
  const int links = static_cast<int>(m.sigma2.size());
  const double scale =
      power_w / std::sqrt(2.0 * m.rx_count * m.fe.sigma2_tc);
  const Eigen::MatrixXd diff0 = m.table.f0 - m.table.s0;
  const Eigen::MatrixXd diff1 = m.table.s1 - m.table.f1;

  if (method == FadingAverage::none || m.sigma2.maxCoeff() <= 0.0) {
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(links);
    return {ber_for_fades(diff0, diff1, m.table.weight, ones, scale), 0.0};
  }

  switch (method) {
    case FadingAverage::ghqf: {
      if (links > opt.max_ghqf_dims)
        throw CostGuardError(
            "tensor quadrature limited to " +
            std::to_string(opt.max_ghqf_dims) +
            " fading dimensions; use lognormal-sum or mc for larger arrays");
      std::vector<FadingQuadrature> q(links);
      for (int l = 0; l < links; ++l)
        q[l] = unit_fading_quadrature(opt.ghqf_order, m.sigma2[l]);
      const int n = opt.ghqf_order;
      std::vector<int> idx(links, 0);
      Eigen::VectorXd fades(links);
      double ber = 0.0;
      while (true) {
        double w = 1.0;
        for (int l = 0; l < links; ++l) {
          fades[l] = q[l].h[idx[l]];
          w *= q[l].weight[idx[l]];
        }
        ber += w * ber_for_fades(diff0, diff1, m.table.weight, fades, scale);
        int d = 0;
        while (d < links && ++idx[d] == n) idx[d++] = 0;
        if (d == links) break;
      }
      return {ber, 0.0};
    }
    case FadingAverage::quadrature: {
      if (links != 1)
        throw std::invalid_argument(
            "exact quadrature handles a single fading dimension; use ghqf, "
            "lognormal-sum, or mc for arrays");
      const double s2 = m.sigma2[0];
      Eigen::VectorXd fades(1);
      auto g = [&](double x) {
        fades[0] = std::exp(2.0 * x);
        return ber_for_fades(diff0, diff1, m.table.weight, fades, scale);
      };
      return {gaussian_expectation(g, fading_mu_x(s2), s2,
                                   opt.quadrature_rel_tol),
              0.0};
    }
    case FadingAverage::lognormal_sum: {
      double ber = 0.0;
      for (int p = 0; p < diff0.rows(); ++p) {
        double half = 0.0;
        for (const Eigen::MatrixXd* d : {&diff0, &diff1}) {
          Eigen::ArrayXd gains = d->row(p).transpose().array();
          const double lo = gains.minCoeff(), hi = gains.maxCoeff();
          if (lo < -1e-9 * std::max(hi, 0.0))
            throw std::runtime_error(
                "lognormal-sum needs nonnegative per-link decision gains "
                "(interference too severe); use ghqf or mc");
          gains = gains.max(0.0);
          EquivalentLognormal eq = lognormal_sum(gains, m.sigma2);
          if (eq.mean <= 0.0) {
            half += 0.25;
            continue;
          }
          FadingQuadrature fq =
              fading_quadrature(opt.ghqf_order, eq.mu_z, eq.sigma2_z);
          double b = 0.0;
          for (int qi = 0; qi < fq.h.size(); ++qi)
            b += fq.weight[qi] * gaussian_q(scale * fq.h[qi]);
          half += 0.5 * b;
        }
        ber += m.table.weight[p] * half;
      }
      return {ber, 0.0};
    }
    case FadingAverage::monte_carlo: {
      RandomStream fade_rng(opt.seed, StreamDomain::fading, 0);
      RandomStream pick_rng(opt.seed, StreamDomain::mc_integration, 0);
      const int rows = static_cast<int>(diff0.rows());
      Eigen::VectorXd fades(links);
      double sum = 0.0, sumsq = 0.0;
      const uint64_t n = opt.mc_draws;
      for (uint64_t it = 0; it < n; ++it) {
        int p = std::min(static_cast<int>(pick_rng.uniform01() * rows),
                         rows - 1);
        for (int l = 0; l < links; ++l)
          fades[l] = sample_fading(fade_rng, m.sigma2[l]);
        double m0 = diff0.row(p).dot(fades);
        double m1 = diff1.row(p).dot(fades);
        double v = 0.5 * (gaussian_q(scale * m0) + gaussian_q(scale * m1));
        sum += v;
        sumsq += v * v;
      }
      double mean = sum / n;
      double var = std::max(0.0, sumsq / n - mean * mean);
      return {mean, std::sqrt(var / (n > 1 ? n - 1 : 1))};
    }
    default:
      throw std::logic_error("unreachable fading average");
  }
}

} // namespace uvlc
