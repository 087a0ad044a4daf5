#pragma once

#include "gaprec/exact_kernels.hpp"
#include "gaprec/gap.hpp"
#include "gaprec/kernels.hpp"
#include "gaprec/patterns.hpp"
#include "gaprec/spectral.hpp"

#include <nlohmann/json_fwd.hpp>

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gaprec {

/// masked: circular kernel on G = N with H zeroed in the gap (default).
/// direct: unmasked causal taps from adaptive grid synthesis (small gamma only).
/// exact: unmasked causal taps in MPFR against exactly sampled observations.
enum class RecoveryMode { masked, direct, exact };

std::string to_string(RecoveryMode m);
RecoveryMode recovery_mode_from(const std::string& s);

struct RecoveryTask {
  ObservationPattern pattern = ObservationPattern::contiguous();
  /// Finite list of targets, disjoint from the pattern.
  std::vector<Index> targets;
  /// Observed values x(s), s in M. In exact mode these are additive perturbations on top of exact_signal.
  SparseSignal observations;
  /// Case A default: min(targets) - 1. Case B default: max(targets) + 1.
  std::optional<Index> theta;
  PredictorParams params{20.0, 1.0};
  /// Tap count (masked, direct). A power of two in masked mode.
  std::size_t n_taps = 4096;
  SpectralGap gap = SpectralGap::at_pi(0.5);
  RecoveryMode mode = RecoveryMode::masked;
  /// The set T the targets come from; only used by recover() to pick the case.
  std::optional<TargetSet> target_class;
  ExactSignal exact_signal;
  ExactOptions exact_options;
};

/// Equality over every field except the exact signal callable.
bool same_problem(const RecoveryTask& a, const RecoveryTask& b);

/// t -> -t applied to pattern, targets, observations, theta, target class and exact signal.
RecoveryTask reverse(const RecoveryTask& task);

struct KernelInfo {
  int m = 0;
  double gamma = 0.0;
  double r_hat = 0.0;
  std::size_t n_taps = 0;
  std::size_t grid_used = 0;
  double l2_norm = 0.0;
  double log10_l2_norm = 0.0;
  double tail_fraction = 0.0;
  /// exact mode: l1 mass just past N; otherwise 0.
  double tail_l1 = 0.0;
  bool masked = false;
  bool saturated = false;
};

struct RecoveryReport {
  PatternCase pattern_case = PatternCase::A;
  std::optional<Index> theta;  // unset for case C
  RecoveryMode mode = RecoveryMode::masked;
  std::vector<Index> targets;
  std::vector<Complex> estimates;
  /// One entry per target.
  std::vector<KernelInfo> kernels;
  std::vector<double> errors;
  std::optional<double> sup_error;

  double max_kernel_norm() const;
  Complex estimate_at(Index t) const;
  void attach_truth(const std::function<Complex(Index)>& truth);
  void attach_truth(const Signal& truth);
};

RecoveryReport reverse(const RecoveryReport& report);

/// Classifies with target_class (or the explicit target list) and dispatches.
RecoveryReport recover(const RecoveryTask& task);
RecoveryReport recover_case_a(const RecoveryTask& task);
/// reverse(recover_case_a(reverse(task))).
RecoveryReport recover_case_b(const RecoveryTask& task);
/// Targets t > 0 forward from M cap (-inf, 0], t < 0 backward from M cap [0, inf), both with theta = 0.
/// A target t = 0 (0 not in M) is predicted forward with theta = -1.
RecoveryReport recover_case_c(const RecoveryTask& task);

double sup_error(const std::vector<Complex>& estimates, const Signal& truth, const std::vector<Index>& targets);

/// An estimate written out as sum_i weights[i] * x(positions[i]).
struct LinearEstimate {
  Index target = 0;
  std::vector<Index> positions;
  std::vector<double> weights;
};

/// Linear form used by recover_case_a / recover_case_b for one target (masked and direct modes).
LinearEstimate make_estimator(const RecoveryTask& task, Index target);
Complex apply(const LinearEstimate& e, const SparseSignal& observations);

/// Zeroes the weights whose position is outside the smaller set.
LinearEstimate prop1_restrict(const LinearEstimate& e, const std::function<bool(Index)>& in_subset);
/// Re-expresses e over a superset of its positions (zero weight on the extra ones).
LinearEstimate lift(const LinearEstimate& e, const std::vector<Index>& superset_positions);

nlohmann::json report_to_json(const RecoveryReport& r);

/// Kernels keyed on (m, gamma, r_hat, N, mode, gap). Safe for concurrent use.
class KernelCache {
 public:
  static KernelCache& global();
  std::shared_ptr<const Kernel> get(int m, const PredictorParams& p, std::size_t n_taps, RecoveryMode mode,
                                    const SpectralGap& gap);
  std::size_t size() const;
  void clear();

 private:
  struct Impl;
  KernelCache();
  std::shared_ptr<Impl> impl_;
};

}  // namespace gaprec
