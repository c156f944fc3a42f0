#include "uvlc/ber_photon_counting.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "uvlc/constants.hpp"
#include "uvlc/fading.hpp"
#include "uvlc/math.hpp"
#include "uvlc/rng.hpp"

namespace uvlc {

namespace {

double phi(const SaddleProblem& p, double s) {
  return p.v * s * s + p.m_p * std::expm1(s) + p.m_m * std::expm1(-s) -
         std::log(s);
}

double phi1(const SaddleProblem& p, double s) {
  return 2.0 * p.v * s + p.m_p * std::exp(s) - p.m_m * std::exp(-s) - 1.0 / s;
}

double phi2(const SaddleProblem& p, double s) {
  return 2.0 * p.v + p.m_p * std::exp(s) + p.m_m * std::exp(-s) +
         1.0 / (s * s);
}

} // namespace

SaddleSolution solve_saddle(const SaddleProblem& p) {
  if (!(p.v > 0.0) && !(p.m_p > 0.0))
    throw std::invalid_argument("solve_saddle: needs v > 0 or m_p > 0");
  double lo = 1e-12;
  for (int i = 0; i < 100 && phi1(p, lo) > 0.0; ++i) lo *= 1e-3;
  double hi = 1.0;
  while (hi < 700.0 && phi1(p, hi) < 0.0) hi = std::min(2.0 * hi, 700.0);

  double x = std::min(1.0, 0.5 * (lo + hi));
  for (int it = 0; it < 200; ++it) {
    double f = phi1(p, x);
    double f2 = phi2(p, x);
    if (std::isfinite(f)) {
      if (f > 0.0)
        hi = x;
      else
        lo = x;
    }
    double step = f / f2;
    if (std::isfinite(step) && std::abs(step) < 1e-10) break;
    double xn = x - step;
    if (!std::isfinite(xn) || xn <= lo || xn >= hi) xn = 0.5 * (lo + hi);
    if (hi - lo < 1e-15 * std::max(1.0, x)) break;
    x = xn;
  }
  SaddleSolution sol;
  sol.s = x;
  sol.phi = phi(p, x);
  sol.phi2 = phi2(p, x);
  return sol;
}

double log_saddle_tail(const SaddleProblem& p) {
  SaddleSolution sol = solve_saddle(p);
  return sol.phi - 0.5 * std::log(2.0 * M_PI * sol.phi2);
}

double saddle_tail(const SaddleProblem& p) {
  return std::min(0.5, std::exp(log_saddle_tail(p)));
}

namespace {

// Index window holding all but < eps of a Poisson(m) pmf.
void poisson_window(double m, long& lo, long& hi) {
  if (m <= 0.0) {
    lo = hi = 0;
    return;
  }
  const double z = 10.0;
  lo = std::max(0L, static_cast<long>(std::floor(m - z * std::sqrt(m) - 30.0)));
  hi = static_cast<long>(std::ceil(m + z * std::sqrt(m) + 30.0));
}

std::vector<double> poisson_pmf(double m, long lo, long hi) {
  std::vector<double> p(hi - lo + 1);
  if (m <= 0.0) {
    for (auto& v : p) v = 0.0;
    if (lo == 0) p[0] = 1.0;
    return p;
  }
  const double lm = std::log(m);
  for (long k = lo; k <= hi; ++k)
    p[k - lo] = std::exp(-m + k * lm - std::lgamma(k + 1.0));
  return p;
}

} // namespace

double exact_tail(const SaddleProblem& p, double) {
  long plo, phi_, mlo, mhi;
  poisson_window(p.m_p, plo, phi_);
  poisson_window(p.m_m, mlo, mhi);
  std::vector<double> pp = poisson_pmf(p.m_p, plo, phi_);
  std::vector<double> pm = poisson_pmf(p.m_m, mlo, mhi);
  const double sigma = std::sqrt(2.0 * p.v);
  // P(X > 0 | k_p, k_m) depends only on d = k_m - k_p.
  const long dlo = mlo - phi_, dhi = mhi - plo;
  std::vector<double> qd(dhi - dlo + 1);
  for (long d = dlo; d <= dhi; ++d)
    qd[d - dlo] = sigma > 0.0 ? gaussian_q(d / sigma) : (d < 0 ? 1.0 : 0.0);
  double total = 0.0;
  for (long kp = plo; kp <= phi_; ++kp) {
    double inner = 0.0;
    for (long km = mlo; km <= mhi; ++km)
      inner += pm[km - mlo] * qd[km - kp - dlo];
    total += pp[kp - plo] * inner;
  }
  return total;
}

CountingBerModel build_counting_model(
    const Scenario& s, const std::vector<FfirHistogram>& link_ffir) {
  AnalyticBerModel a = build_analytic_model(s, link_ffir);
  CountingBerModel m;
  m.fe = a.fe;
  m.table = std::move(a.table);
  m.tx_count = a.tx_count;
  m.rx_count = a.rx_count;
  m.sigma2 = std::move(a.sigma2);
  m.v = m.rx_count * m.fe.sigma2_th;
  m.m_bd = (m.fe.background_rate + m.rx_count * m.fe.dark_rate) * m.fe.chip;
  return m;
}

namespace {

double row_ber(const CountingBerModel& m, const Eigen::VectorXd& counts_scale,
               int row, double power_w, bool brute) {
  // counts_scale = fades / q elementwise; count mean = P * gain . counts_scale
  const double mf0 = power_w * m.table.f0.row(row).dot(counts_scale) + m.m_bd;
  const double ms0 = power_w * m.table.s0.row(row).dot(counts_scale) + m.m_bd;
  const double mf1 = power_w * m.table.f1.row(row).dot(counts_scale) + m.m_bd;
  const double ms1 = power_w * m.table.s1.row(row).dot(counts_scale) + m.m_bd;
  SaddleProblem b0{m.v, ms0, mf0}; // bit 0 loses when the s window wins
  SaddleProblem b1{m.v, mf1, ms1};
  if (brute) return 0.5 * (exact_tail(b0) + exact_tail(b1));
  return 0.5 * (saddle_tail(b0) + saddle_tail(b1));
}

double ber_for_fades(const CountingBerModel& m, const Eigen::ArrayXd& fades,
                     double power_w, bool brute) {
  Eigen::VectorXd cs = (fades / kElementaryCharge).matrix();
  double ber = 0.0;
  for (int p = 0; p < m.table.f0.rows(); ++p)
    ber += m.table.weight[p] * row_ber(m, cs, p, power_w, brute);
  return ber;
}

} // namespace

double counting_conditional_ber(const CountingBerModel& m,
                                const Eigen::ArrayXd& fades, double power_w,
                                bool brute_force) {
  if (fades.size() != m.table.f0.cols())
    throw std::invalid_argument("counting_conditional_ber: one fade per link");
  return ber_for_fades(m, fades, power_w, brute_force);
}

BerEstimate counting_ber(const CountingBerModel& m, double power_w,
                         FadingAverage method, const AveragingOptions& opt,
                         bool brute_force) {
  const int links = static_cast<int>(m.sigma2.size());
  if (method == FadingAverage::none || m.sigma2.maxCoeff() <= 0.0) {
    return {ber_for_fades(m, Eigen::ArrayXd::Ones(links), power_w,
                          brute_force),
            0.0};
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
      Eigen::ArrayXd fades(links);
      double ber = 0.0;
      while (true) {
        double w = 1.0;
        for (int l = 0; l < links; ++l) {
          fades[l] = q[l].h[idx[l]];
          w *= q[l].weight[idx[l]];
        }
        ber += w * ber_for_fades(m, fades, power_w, brute_force);
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
      Eigen::ArrayXd fades(1);
      auto g = [&](double x) {
        fades[0] = std::exp(2.0 * x);
        return ber_for_fades(m, fades, power_w, brute_force);
      };
      return {gaussian_expectation(g, fading_mu_x(s2), s2,
                                   opt.quadrature_rel_tol),
              0.0};
    }
    case FadingAverage::lognormal_sum: {
      // Scalar collapse: one equivalent lognormal scales the summed window
      // charge; the f/s split keeps its unfaded ratio. Exact for one link.
      double ber = 0.0;
      for (int p = 0; p < m.table.f0.rows(); ++p) {
        double half = 0.0;
        struct Windows {
          const Eigen::MatrixXd *f, *s;
          bool err_in_f; // the window an error favors
        };
        const Windows hyp[2] = {{&m.table.f0, &m.table.s0, false},
                                {&m.table.f1, &m.table.s1, true}};
        for (const Windows& h : hyp) {
          Eigen::ArrayXd wf = h.f->row(p).transpose().array();
          Eigen::ArrayXd ws = h.s->row(p).transpose().array();
          Eigen::ArrayXd w = wf + ws;
          const double total = w.sum();
          if (total <= 0.0) {
            SaddleProblem deg{m.v, m.m_bd, m.m_bd};
            half += 0.5 * (brute_force ? exact_tail(deg) : saddle_tail(deg));
            continue;
          }
          const double share_f = wf.sum() / total;
          EquivalentLognormal eq = lognormal_sum(w, m.sigma2);
          FadingQuadrature fq =
              fading_quadrature(opt.ghqf_order, eq.mu_z, eq.sigma2_z);
          double b = 0.0;
          for (int qi = 0; qi < fq.h.size(); ++qi) {
            const double charge = power_w * fq.h[qi] / kElementaryCharge;
            const double mf = charge * share_f + m.m_bd;
            const double ms = charge * (1.0 - share_f) + m.m_bd;
            SaddleProblem sp{m.v, h.err_in_f ? mf : ms, h.err_in_f ? ms : mf};
            b += fq.weight[qi] *
                 (brute_force ? exact_tail(sp) : saddle_tail(sp));
          }
          half += 0.5 * b;
        }
        ber += m.table.weight[p] * half;
      }
      return {ber, 0.0};
    }
    case FadingAverage::monte_carlo: {
      RandomStream fade_rng(opt.seed, StreamDomain::fading, 0);
      RandomStream pick_rng(opt.seed, StreamDomain::mc_integration, 0);
      const int rows = static_cast<int>(m.table.f0.rows());
      Eigen::VectorXd cs(links);
      double sum = 0.0, sumsq = 0.0;
      const uint64_t n = opt.mc_draws;
      for (uint64_t it = 0; it < n; ++it) {
        int p = std::min(static_cast<int>(pick_rng.uniform01() * rows),
                         rows - 1);
        for (int l = 0; l < links; ++l)
          cs[l] = sample_fading(fade_rng, m.sigma2[l]) / kElementaryCharge;
        double v = row_ber(m, cs, p, power_w, brute_force);
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
