#pragma once

#include "gaprec/kernels.hpp"
#include "gaprec/spectral.hpp"

#include <mpfr.h>

#include <functional>
#include <vector>

namespace gaprec {

/// Writes a sample at absolute index t into `out` (precision already set).
using ExactSampler = std::function<void(mpfr_ptr out, Index t)>;
/// Produces a sampler for a working precision.
using ExactSignal = std::function<ExactSampler(mpfr_prec_t bits)>;
/// Writes y(theta - lag).
using LagSampler = std::function<void(mpfr_ptr out, Index lag)>;

struct ExactOptions {
  /// 0 selects the precision from max |H| on the unit circle.
  mpfr_prec_t precision_bits = 0;
  /// 0 runs until the taps of every horizon stay below tap_tolerance for quiet_run lags.
  Index n_taps = 0;
  double tap_tolerance = 1e-30;
  Index quiet_run = 512;
  Index max_taps = Index{1} << 21;
  bool record_taps = false;
};

struct ExactHorizon {
  int m = 0;
  double estimate = 0.0;
  double log10_l2_norm = 0.0;
  /// Energy share of taps[N/2, N).
  double tail_fraction = 0.0;
  /// l1 mass of the taps just past N, over an extension of max(4 quiet_run, N/8) lags.
  double tail_l1 = 0.0;
  /// Taps rounded to double (may be +-inf); filled only with record_taps.
  std::vector<double> taps;
};

struct ExactResult {
  std::vector<ExactHorizon> horizons;
  Index n_taps = 0;
  mpfr_prec_t precision_bits = 0;

  const ExactHorizon& at(int m) const;
};

/// Working precision for horizons up to m_max.
mpfr_prec_t exact_precision_bits(int m_max, const PredictorParams& p);

/// Unmasked causal prediction sum_j k_m(j) y(theta - j) for every horizon, with the taps of
/// (zV)^m generated by a three-term recurrence in MPFR and streamed against the samples.
/// Throws SeriesNotConverged when the automatic tap count exceeds max_taps.
ExactResult exact_predict(const PredictorParams& p, std::vector<int> horizons, const LagSampler& y,
                          const ExactOptions& options = {});

/// First n taps of (zV)^m, rounded to double.
std::vector<double> exact_taps(int m, const PredictorParams& p, Index n_taps, mpfr_prec_t bits = 0);

}  // namespace gaprec
