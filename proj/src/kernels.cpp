#include "gaprec/kernels.hpp"

#include "gaprec/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace gaprec {

namespace {

// e^u - 1 for complex u, accurate for small |u|.
Complex cexpm1(Complex u) {
  const double a = u.real();
  const double b = u.imag();
  const double s = std::sin(b / 2.0);
  return {std::expm1(a) * std::cos(b) - 2.0 * s * s, std::exp(a) * std::sin(b)};
}

// log(1 + w) for complex w, accurate for small |w|.
Complex clog1p(Complex w) {
  const double re = 0.5 * std::log1p(2.0 * w.real() + std::norm(w));
  const double im = std::atan2(w.imag(), 1.0 + w.real());
  return {re, im};
}

Complex ipow(Complex base, int m) {
  Complex result(1.0, 0.0);
  while (m > 0) {
    if (m & 1) result *= base;
    base *= base;
    m >>= 1;
  }
  return result;
}

// u = -gamma / (z + alpha), the exponent of V.
Complex exponent_of(Complex z, const PredictorParams& p) {
  const Complex d = z + p.alpha();
  if (std::abs(d) < 1e-300) throw PoleAtZ("z = -alpha is a pole of the exponent of V");
  return -p.gamma() / d;
}

Complex unit(double omega) { return {std::cos(omega), std::sin(omega)}; }

void require_horizon(int m) {
  if (m < 0) throw ConfigError("horizon m must be >= 0");
}

}  // namespace

PredictorParams::PredictorParams(double gamma, double r_hat) : gamma_(gamma), r_hat_(r_hat) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be positive");
  if (!(r_hat > 0.0) || !std::isfinite(r_hat)) throw ConfigError("r_hat must be positive");
}

double PredictorParams::alpha() const { return 1.0 - std::pow(gamma_, -r_hat_); }

TransferValue v_transfer(Complex z, const PredictorParams& p) {
  const Complex u = exponent_of(z, p);
  if (u.real() > kSaturationExponent) {
    return {1.0 - std::exp(Complex(kSaturationExponent, u.imag())), true};
  }
  return {-cexpm1(u), false};
}

TransferValue kernel_transfer(double omega, int m, const PredictorParams& p) {
  require_horizon(m);
  if (m == 0) return {Complex(1.0, 0.0), false};
  const Complex z = unit(omega);
  const Complex u = exponent_of(z, p);
  double log_mag;
  double phase;
  bool saturated = false;
  if (u.real() > kSaturationExponent) {
    // V ~ -e^u once e^u dominates the 1.
    saturated = true;
    log_mag = u.real();
    phase = u.imag() + kPi;
  } else {
    const Complex v = -cexpm1(u);
    if (v == Complex(0.0, 0.0)) return {Complex(0.0, 0.0), false};
    if (m * std::log(std::abs(v)) <= kSaturationExponent) return {ipow(z * v, m), false};
    log_mag = std::log(std::abs(v));
    phase = std::arg(v);
  }
  const double total = m * log_mag;
  if (total > kSaturationExponent) saturated = true;
  return {std::polar(std::exp(std::min(total, kSaturationExponent)), m * (omega + phase)), saturated};
}

Complex shift_defect(double omega, int m, const PredictorParams& p) {
  require_horizon(m);
  if (m == 0) return {0.0, 0.0};
  const Complex u = exponent_of(unit(omega), p);
  if (u.real() > kSaturationExponent) {
    return {std::numeric_limits<double>::infinity(), 0.0};
  }
  const Complex e = std::exp(u);
  Complex d;
  if (std::abs(e) <= 0.5) {
    d = cexpm1(static_cast<double>(m) * clog1p(-e));
  } else {
    if (m * std::log(std::abs(1.0 - e) + 1e-300) > kSaturationExponent) {
      return {std::numeric_limits<double>::infinity(), 0.0};
    }
    d = ipow(1.0 - e, m) - 1.0;
  }
  return unit(omega * m) * d;
}

double freq_error(const PredictorParams& p, int m, const SpectralGap& gap, std::size_t grid_size) {
  if (grid_size < 2 || !is_power_of_two(grid_size)) throw ConfigError("freq_error: grid size must be a power of two");
  require_horizon(m);
  if (m == 0) return 0.0;
  double worst = 0.0;
  for (std::size_t j = 0; j < grid_size; ++j) {
    const double w = grid_omega(j, grid_size);
    if (in_gap(w, gap)) continue;
    const double e = std::abs(shift_defect(w, m, p));
    if (!(e <= worst)) worst = e;  // also propagates inf
  }
  return worst;
}

double kernel_dc_gain(int m, const PredictorParams& p) {
  require_horizon(m);
  const double d = 1.0 + p.alpha();
  if (std::abs(d) < 1e-300) throw PoleAtZ("z = 1 is a pole of the exponent of V");
  const double v = -std::expm1(-p.gamma() / d);
  double g = 1.0;
  for (int i = 0; i < m; ++i) g *= v;
  return g;
}

double max_log_kernel_transfer(int m, const PredictorParams& p) {
  require_horizon(m);
  auto log_abs_v = [&](double omega) {
    const Complex u = exponent_of(unit(omega), p);
    if (u.real() > 30.0) return u.real() + std::log1p(-std::exp(-u.real()));
    return std::log(std::abs(cexpm1(u)) + 1e-300);
  };
  constexpr int kScan = 8192;
  double best = log_abs_v(kPi);
  for (int j = 0; j < kScan; ++j) {
    best = std::max(best, log_abs_v(2.0 * kPi * j / kScan));
  }
  return std::max(0.0, m * best);
}

Kernel synth_circular_kernel(int m, const PredictorParams& p, std::size_t grid_size,
                             const std::optional<SpectralGap>& gap_mask) {
  require_horizon(m);
  if (grid_size < 2 || !is_power_of_two(grid_size)) {
    throw ConfigError("circular kernel needs a power-of-two grid, got " + std::to_string(grid_size));
  }
  Eigen::VectorXcd h(static_cast<Eigen::Index>(grid_size));
  for (std::size_t j = 0; j < grid_size; ++j) {
    const double w = grid_omega(j, grid_size);
    if (gap_mask && in_gap(w, *gap_mask)) {
      h(static_cast<Eigen::Index>(j)) = 0.0;
      continue;
    }
    const TransferValue tv = kernel_transfer(w, m, p);
    if (tv.saturated) {
      throw TransferSaturated("transfer saturates outside the mask at omega = " + std::to_string(w) +
                              "; the gap is too narrow for gamma = " + std::to_string(p.gamma()));
    }
    h(static_cast<Eigen::Index>(j)) = tv.value;
  }
  const Eigen::VectorXcd full = fft_inverse(h);
  Kernel k;
  k.horizon = m;
  k.params = p;
  k.taps = full.real();
  k.max_imag = full.imag().cwiseAbs().maxCoeff();
  k.grid_used = grid_size;
  k.masked = gap_mask.has_value();
  k.l2_norm = k.taps.norm();
  const auto n = static_cast<Eigen::Index>(grid_size);
  const double total = k.taps.squaredNorm();
  k.tail_fraction = total > 0.0 ? k.taps.tail(n - n / 2).squaredNorm() / total : 0.0;
  const double full_energy = full.squaredNorm();
  k.causal_leak = full_energy > 0.0 ? full.tail(n - n / 2).squaredNorm() / full_energy : 0.0;
  return k;
}

Kernel synth_kernel(int m, const PredictorParams& p, std::size_t n_taps,
                    const std::optional<SpectralGap>& gap_mask, const SynthesisOptions& options) {
  require_horizon(m);
  if (n_taps < 1) throw ConfigError("synth_kernel: N must be >= 1");
  if (gap_mask) return synth_circular_kernel(m, p, n_taps, gap_mask);

  const auto n = static_cast<Eigen::Index>(n_taps);
  std::size_t g = std::max<std::size_t>(8, next_power_of_two(4 * n_taps));
  Eigen::VectorXd previous;
  while (true) {
    if (g > options.grid_cap) {
      throw GridCapExceeded("kernel taps for m = " + std::to_string(m) + ", gamma = " +
                            std::to_string(p.gamma()) + " did not settle below grid cap " +
                            std::to_string(options.grid_cap));
    }
    Kernel k = synth_circular_kernel(m, p, g, std::nullopt);
    Eigen::VectorXd head = k.taps.head(n);
    const double head_norm = head.norm();
    const bool settled = previous.size() == n &&
                         (head - previous).norm() <= options.tolerance * std::max(1.0, head_norm) &&
                         k.causal_leak < 1e-8;
    if (settled) {
      k.taps = std::move(head);
      k.l2_norm = head_norm;
      const double total = k.taps.squaredNorm();
      k.tail_fraction = total > 0.0 ? k.taps.tail(n - n / 2).squaredNorm() / total : 0.0;
      return k;
    }
    previous = std::move(head);
    g *= 2;
  }
}

void write_kernel_csv(std::ostream& os, const Kernel& k) {
  os << "j,tap\n" << std::setprecision(17);
  for (Eigen::Index j = 0; j < k.taps.size(); ++j) os << j << ',' << k.taps(j) << '\n';
}

nlohmann::json kernel_sidecar_json(const Kernel& k) {
  return {{"gamma", k.params.gamma()},  {"r_hat", k.params.r_hat()},
          {"m", k.horizon},             {"N", k.size()},
          {"G_used", k.grid_used},      {"l2_norm", k.l2_norm},
          {"tail_fraction", k.tail_fraction}, {"masked", k.masked}};
}

}  // namespace gaprec
