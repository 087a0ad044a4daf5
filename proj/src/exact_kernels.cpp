#include "gaprec/exact_kernels.hpp"

#include "gaprec/errors.hpp"
#include "gaprec/multiprecision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gaprec {

namespace {

constexpr int kMaxHorizon = 60;  // C(60, k) still fits in a long

double max_real_exponent(const PredictorParams& p) {
  const double g = p.gamma();
  const double a = p.alpha();
  auto re_u = [&](double w) {
    const double c = std::cos(w);
    const double d = 1.0 + 2.0 * a * c + a * a;
    if (d < 1e-300) throw PoleAtZ("exponent pole on the unit circle");
    return -g * (c + a) / d;
  };
  double best = re_u(kPi);
  constexpr int kScan = 8192;
  for (int j = 0; j < kScan; ++j) best = std::max(best, re_u(2.0 * kPi * j / kScan));
  return best;
}

double log_sum_exp(const std::vector<double>& logs, std::size_t lo, std::size_t hi) {
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = lo; i < hi; ++i) top = std::max(top, logs[i]);
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (std::size_t i = lo; i < hi; ++i) acc += std::exp(logs[i] - top);
  return top + std::log(acc);
}

struct HorizonState {
  int m;
  std::vector<long> coeff;  // C(m, k) (-1)^k, k = 0..m
  MpReal sum;
  MpReal tail;
  Index quiet = 0;
  std::vector<double> log_sq;  // 2 ln|tap_j|
  std::vector<double> taps;
};

}  // namespace

const ExactHorizon& ExactResult::at(int m) const {
  for (const auto& h : horizons) {
    if (h.m == m) return h;
  }
  throw ConfigError("no exact result for horizon " + std::to_string(m));
}

mpfr_prec_t exact_precision_bits(int m_max, const PredictorParams& p) {
  const double re_u = std::max(0.0, max_real_exponent(p));
  const double log_mag = m_max * (re_u + std::log(2.0));
  const double lk = std::max(log_mag, max_log_kernel_transfer(m_max, p));
  return static_cast<mpfr_prec_t>(std::ceil(lk / std::log(2.0))) + 192;
}

ExactResult exact_predict(const PredictorParams& p, std::vector<int> horizons, const LagSampler& y,
                          const ExactOptions& options) {
  std::sort(horizons.begin(), horizons.end());
  horizons.erase(std::unique(horizons.begin(), horizons.end()), horizons.end());
  if (horizons.empty()) return {};
  if (horizons.front() < 1 || horizons.back() > kMaxHorizon) {
    throw ConfigError("exact horizons must lie in [1, " + std::to_string(kMaxHorizon) + "]");
  }
  if (options.n_taps < 0 || options.max_taps < 1 || options.quiet_run < 1) {
    throw ConfigError("exact options out of range");
  }
  const int m_min = horizons.front();
  const int m_max = horizons.back();
  const mpfr_prec_t bits =
      options.precision_bits > 0 ? options.precision_bits : exact_precision_bits(m_max, p);

  // E_c(w) = exp(-c w / (1 + alpha w)), c = k gamma, w = 1/z; (zV)^m = z^m sum_k C(m,k) (-1)^k E_{k gamma}.
  // (1 + alpha w)^2 E' = -c E gives
  // e_{n+1} = [-(c + 2 alpha n) e_n - alpha^2 (n - 1) e_{n-1}] / (n + 1).
  MpReal gamma(bits, p.gamma());
  MpReal alpha(bits);
  {
    MpReal rh(bits, p.r_hat());
    mpfr_pow(alpha.get(), gamma.get(), rh.get(), MPFR_RNDN);
    mpfr_ui_div(alpha.get(), 1, alpha.get(), MPFR_RNDN);
    mpfr_ui_sub(alpha.get(), 1, alpha.get(), MPFR_RNDN);
  }
  MpReal alpha_sq(bits);
  mpfr_sqr(alpha_sq.get(), alpha.get(), MPFR_RNDN);
  MpReal two_alpha(bits);
  mpfr_mul_2ui(two_alpha.get(), alpha.get(), 1, MPFR_RNDN);

  std::vector<MpReal> prev, cur, c;
  for (int k = 0; k <= m_max; ++k) {
    prev.emplace_back(bits, 0.0);
    cur.emplace_back(bits, 1.0);
    c.emplace_back(bits);
    mpfr_mul_ui(c.back().get(), gamma.get(), static_cast<unsigned long>(k), MPFR_RNDN);
  }

  std::vector<HorizonState> hs;
  for (int m : horizons) {
    HorizonState h{m, {}, MpReal(bits), MpReal(bits), 0, {}, {}};
    long b = 1;
    for (int k = 0; k <= m; ++k) {
      h.coeff.push_back(k % 2 == 0 ? b : -b);
      b = b * (m - k) / (k + 1);
    }
    hs.push_back(std::move(h));
  }

  const auto ring_size = static_cast<std::size_t>(m_max + 1);
  std::vector<MpReal> ring(ring_size, MpReal(bits));
  MpReal tap(bits), tmp(bits), coef(bits), next(bits);

  const bool fixed = options.n_taps > 0;
  Index n_taps = fixed ? options.n_taps : -1;
  Index extension = 0;
  const double log_tol = std::log(options.tap_tolerance);

  for (Index n = 0;; ++n) {
    // cur[k] holds e_n for c_k.
    const Index j_new = n - m_min;
    if (j_new >= 0 && (n_taps < 0 || j_new < n_taps)) {
      y(ring[static_cast<std::size_t>(j_new) % ring_size].get(), j_new);
    }
    bool all_quiet = true;
    bool any_active = false;
    for (auto& h : hs) {
      const Index j = n - h.m;
      if (j < 0) {
        all_quiet = false;
        continue;
      }
      if (n_taps >= 0 && j >= n_taps + extension) continue;
      any_active = true;
      mpfr_set_zero(tap.get(), 1);
      for (int k = 1; k <= h.m; ++k) {
        mpfr_mul_si(tmp.get(), cur[static_cast<std::size_t>(k)].get(), h.coeff[static_cast<std::size_t>(k)], MPFR_RNDN);
        mpfr_add(tap.get(), tap.get(), tmp.get(), MPFR_RNDN);
      }
      if (n_taps >= 0 && j >= n_taps) {
        mpfr_abs(tmp.get(), tap.get(), MPFR_RNDN);
        mpfr_add(h.tail.get(), h.tail.get(), tmp.get(), MPFR_RNDN);
        continue;
      }
      mpfr_fma(h.sum.get(), tap.get(), ring[static_cast<std::size_t>(j) % ring_size].get(), h.sum.get(), MPFR_RNDN);
      const double lg = mpfr_zero_p(tap.get()) ? -std::numeric_limits<double>::infinity()
                                                : log10_abs(tap.get()) * std::log(10.0);
      h.log_sq.push_back(2.0 * lg);
      if (options.record_taps) h.taps.push_back(mpfr_get_d(tap.get(), MPFR_RNDN));
      h.quiet = lg < log_tol ? h.quiet + 1 : 0;
      if (h.quiet < options.quiet_run) all_quiet = false;
    }
    if (n_taps < 0) {
      if (all_quiet && n >= 2 * options.quiet_run) {
        n_taps = n - m_min + 1;
        extension = std::max<Index>(4 * options.quiet_run, n_taps / 8);
      } else if (n - m_min + 1 >= options.max_taps) {
        throw SeriesNotConverged("exact taps for gamma = " + std::to_string(p.gamma()) +
                                 " still above tolerance after " + std::to_string(options.max_taps) + " lags");
      }
    } else if (extension == 0 && fixed) {
      extension = std::max<Index>(4 * options.quiet_run, n_taps / 8);
    }
    if (n_taps >= 0 && !any_active && n > m_max) break;

    for (int k = 1; k <= m_max; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      mpfr_mul_ui(coef.get(), two_alpha.get(), static_cast<unsigned long>(n), MPFR_RNDN);
      mpfr_add(coef.get(), coef.get(), c[ku].get(), MPFR_RNDN);
      mpfr_mul(next.get(), coef.get(), cur[ku].get(), MPFR_RNDN);
      if (n >= 1) {
        mpfr_mul(tmp.get(), alpha_sq.get(), prev[ku].get(), MPFR_RNDN);
        mpfr_mul_ui(tmp.get(), tmp.get(), static_cast<unsigned long>(n - 1), MPFR_RNDN);
        mpfr_add(next.get(), next.get(), tmp.get(), MPFR_RNDN);
      }
      mpfr_neg(next.get(), next.get(), MPFR_RNDN);
      mpfr_div_ui(next.get(), next.get(), static_cast<unsigned long>(n + 1), MPFR_RNDN);
      mpfr_swap(prev[ku].get(), cur[ku].get());
      mpfr_swap(cur[ku].get(), next.get());
    }
  }

  ExactResult out;
  out.n_taps = n_taps;
  out.precision_bits = bits;
  for (auto& h : hs) {
    ExactHorizon r;
    r.m = h.m;
    r.estimate = h.sum.to_double();
    const std::size_t len = h.log_sq.size();
    const double total = log_sum_exp(h.log_sq, 0, len);
    r.log10_l2_norm = 0.5 * total / std::log(10.0);
    r.tail_fraction = std::isfinite(total) ? std::exp(log_sum_exp(h.log_sq, len / 2, len) - total) : 0.0;
    r.tail_l1 = h.tail.to_double();
    r.taps = std::move(h.taps);
    out.horizons.push_back(std::move(r));
  }
  return out;
}

std::vector<double> exact_taps(int m, const PredictorParams& p, Index n_taps, mpfr_prec_t bits) {
  if (n_taps < 1) throw ConfigError("exact_taps: N must be >= 1");
  ExactOptions opt;
  opt.precision_bits = bits;
  opt.n_taps = n_taps;
  opt.record_taps = true;
  opt.quiet_run = 1;
  return exact_predict(p, {m}, [](mpfr_ptr out, Index) { mpfr_set_zero(out, 1); }, opt).at(m).taps;
}

}  // namespace gaprec
