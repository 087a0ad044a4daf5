#pragma once

#include "gaprec/exact_kernels.hpp"
#include "gaprec/gap.hpp"
#include "gaprec/patterns.hpp"
#include "gaprec/recovery.hpp"
#include "gaprec/spectral.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gaprec {

inline constexpr const char* kRngAlgorithm = "mt19937_64/box-muller-53";

/// a cos(omega t + phase). With cycles/period set, omega = 2 pi cycles / period and the
/// sample is evaluated from (cycles t) mod period, so it is bit-exactly periodic.
struct SinusoidComponent {
  double amplitude = 1.0;
  double omega = 0.0;
  double phase = 0.0;
  Index cycles = 0;
  Index period = 0;

  static SinusoidComponent radians(double amplitude, double omega, double phase = 0.0);
  static SinusoidComponent rational(double amplitude, Index cycles, Index period, double phase = 0.0);

  bool is_rational() const { return period > 0; }
  double frequency() const;
  double at(Index t) const;
};

struct SignalSpec {
  enum class Kind { sinusoid_mix, seeded_noise };
  Kind kind = Kind::sinusoid_mix;
  std::vector<SinusoidComponent> components;
  std::uint64_t seed = 0;
  std::size_t length = 256;
};

struct ExperimentSpec {
  SignalSpec signal;
  ObservationPattern pattern = ObservationPattern::contiguous();
  std::vector<Index> targets;
  std::optional<TargetSet> target_class;
  SpectralGap gap = SpectralGap::at_pi(0.5);
  std::vector<double> gammas{5.0, 10.0, 20.0, 40.0, 80.0};
  double r_hat = 1.0;
  /// Tap counts. In exact mode 0 means automatic.
  std::vector<std::size_t> n_taps{512};
  std::vector<double> rhos{0.0};
  std::vector<std::uint64_t> noise_seeds{1};
  RecoveryMode mode = RecoveryMode::masked;
  std::optional<Index> theta;
  /// Build the class member from the signal (masked/direct default) or observe the signal as is.
  std::optional<bool> class_member;
  ExactOptions exact;
  std::string output;

  bool uses_class_member() const { return class_member.value_or(mode != RecoveryMode::exact); }
};

ExperimentSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const ExperimentSpec& s);
ExperimentSpec load_spec(const std::string& path);
/// Nonempty lists, positive gammas, sinusoid frequencies outside the gap. Throws ConfigError.
void validate(const ExperimentSpec& s);

/// Sinusoid mix sampled on [start, start + length), or seeded noise of spec.length samples
/// from `start`, gap-projected on the next power-of-two grid. Throws FrequencyInGap.
Signal gen_signal(const SignalSpec& spec, const SpectralGap& gap, Index start, std::size_t length);
Signal gen_signal(const SignalSpec& spec, const SpectralGap& gap);

/// The sinusoid mix sampled in MPFR (period tables for rational components).
ExactSignal exact_signal(const SignalSpec& spec);

/// Gaussian samples rescaled to l2 norm rho.
Signal gen_noise(double rho, std::uint64_t seed, Index start, std::size_t length);
SparseSignal gen_noise(double rho, std::uint64_t seed, const std::vector<Index>& positions);

struct PreparedTask {
  RecoveryTask task;
  std::function<Complex(Index)> truth;
};

/// One (gamma, N, rho, seed) instance: class member (or raw signal), noisy observations, truth.
PreparedTask prepare_task(const ExperimentSpec& s, double gamma, std::size_t n_taps, double rho, std::uint64_t seed);

struct SweepRow {
  double gamma = 0.0;
  std::size_t n_taps = 0;
  double rho = 0.0;
  std::uint64_t seed = 0;
  double sup_error = 0.0;
  double max_kernel_norm = 0.0;
  double runtime_ms = 0.0;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

/// Row order is gamma, N, rho, seed (outer to inner) regardless of `parallel`.
std::vector<SweepRow> run_sweep(const ExperimentSpec& s, unsigned parallel = 1);

enum class ReportFormat { csv, json };
ReportFormat report_format_from(const std::string& s);

void write_rows_csv(std::ostream& os, const std::vector<SweepRow>& rows);
nlohmann::json rows_to_json(const std::vector<SweepRow>& rows);
std::vector<SweepRow> rows_from_json(const nlohmann::json& j);

/// Writes rows to `path` and, when meta is given, `path.meta.json`. Throws ConfigError on empty rows
/// (nothing written) and std::runtime_error on IO failure.
void emit_report(const std::vector<SweepRow>& rows, ReportFormat format, const std::string& path,
                 const nlohmann::json* meta = nullptr);

nlohmann::json report_metadata(const ExperimentSpec& s);

/// A row with rho > 0 and sup_error <= tol.
std::optional<SweepRow> find_witness(const std::vector<SweepRow>& rows, double tol = 1e-3);

}  // namespace gaprec
