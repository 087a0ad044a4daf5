#pragma once

#include "gaprec/gap.hpp"
#include "gaprec/spectral.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstddef>
#include <optional>
#include <iosfwd>

namespace gaprec {

/// (gamma, r_hat) of V(z) = 1 - exp(-gamma / (z + alpha)), alpha = 1 - gamma^(-r_hat).
/// alpha is always derived, never stored.
class PredictorParams {
 public:
  explicit PredictorParams(double gamma, double r_hat = 1.0);

  double gamma() const { return gamma_; }
  double r_hat() const { return r_hat_; }
  double alpha() const;

  friend bool operator==(const PredictorParams&, const PredictorParams&) = default;

 private:
  double gamma_;
  double r_hat_;
};

/// Exponents above this are clamped and flagged.
inline constexpr double kSaturationExponent = 700.0;

struct TransferValue {
  Complex value;
  bool saturated = false;
};

/// V(z). Throws PoleAtZ when |z + alpha| < 1e-300.
TransferValue v_transfer(Complex z, const PredictorParams& p);

/// H_m(e^{i omega}) = (e^{i omega} V(e^{i omega}))^m.
TransferValue kernel_transfer(double omega, int m, const PredictorParams& p);

/// H_m(e^{i omega}) - e^{i omega m}, evaluated without cancellation.
/// Returns +inf magnitude (as a non-finite value) when the transfer saturates.
Complex shift_defect(double omega, int m, const PredictorParams& p);

/// max over grid nodes outside the gap of |H_m - e^{i omega m}|.
double freq_error(const PredictorParams& p, int m, const SpectralGap& gap, std::size_t grid_size);

/// H_m(1) = (1 - exp(-gamma / (1 + alpha)))^m.
double kernel_dc_gain(int m, const PredictorParams& p);

/// max over the unit circle of log|H_m|, clipped below at 0. Sizes the exact path's precision.
double max_log_kernel_transfer(int m, const PredictorParams& p);

/// Truncated predictor: prediction of y(theta + m) is sum_j taps(j) * y(theta - j).
struct Kernel {
  int horizon = 0;
  PredictorParams params{1.0, 1.0};
  Eigen::VectorXd taps;
  double l2_norm = 0.0;
  /// Energy share of taps[N/2, N).
  double tail_fraction = 0.0;
  std::size_t grid_used = 0;
  bool masked = false;
  bool saturated = false;
  /// Largest |Im tap| discarded when taking the real part.
  double max_imag = 0.0;
  /// Energy share in the upper half of the synthesis grid (negative lags plus aliasing).
  double causal_leak = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(taps.size()); }
};

struct SynthesisOptions {
  std::size_t grid_cap = std::size_t{1} << 22;
  double tolerance = 1e-10;
};

/// Unmasked: adaptive grid synthesis of the first N causal taps, starting at G = 4N and doubling
/// until the taps settle. Throws GridCapExceeded or TransferSaturated.
/// Masked: circular kernel on the fixed grid G = N (N a power of two), see synth_circular_kernel.
Kernel synth_kernel(int m, const PredictorParams& p, std::size_t n_taps,
                    const std::optional<SpectralGap>& gap_mask = std::nullopt,
                    const SynthesisOptions& options = {});

/// G taps of the inverse grid transform of H_m (zeroed inside the mask, if any).
/// For a G-periodic input these taps reproduce the infinite causal sum exactly, with the
/// mask acting only on spectral lines the input does not have.
Kernel synth_circular_kernel(int m, const PredictorParams& p, std::size_t grid_size,
                             const std::optional<SpectralGap>& gap_mask);

void write_kernel_csv(std::ostream& os, const Kernel& k);
nlohmann::json kernel_sidecar_json(const Kernel& k);

}  // namespace gaprec
