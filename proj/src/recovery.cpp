#include "gaprec/recovery.hpp"

#include "gaprec/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <mutex>
#include <shared_mutex>
#include <tuple>

namespace gaprec {

namespace {

void require_targets(const RecoveryTask& task) {
  if (task.targets.empty()) throw ConfigError("recovery task has no targets");
  for (Index t : task.targets) {
    if (task.pattern.contains(t)) {
      throw ConfigError("target " + std::to_string(t) + " is also an observation point");
    }
  }
}

KernelInfo info_from(const Kernel& k) {
  KernelInfo i;
  i.m = k.horizon;
  i.gamma = k.params.gamma();
  i.r_hat = k.params.r_hat();
  i.n_taps = k.size();
  i.grid_used = k.grid_used;
  i.l2_norm = k.l2_norm;
  i.log10_l2_norm = std::log10(k.l2_norm);
  i.tail_fraction = k.tail_fraction;
  i.masked = k.masked;
  i.saturated = k.saturated;
  return i;
}

// Positions tau(theta - j), j = 0..N-1.
std::vector<Index> lag_positions(const RecoveryTask& task, Index theta) {
  const TauMap tau = build_tau_at(task.pattern, theta, static_cast<Index>(task.n_taps));
  std::vector<Index> pos(task.n_taps);
  for (std::size_t j = 0; j < task.n_taps; ++j) pos[j] = tau(theta - static_cast<Index>(j));
  return pos;
}

std::vector<Complex> lag_values(const SparseSignal& obs, const std::vector<Index>& pos) {
  std::vector<Complex> y(pos.size());
  for (std::size_t j = 0; j < pos.size(); ++j) {
    if (!obs.contains(pos[j])) {
      throw InsufficientObservations("no observation at t = " + std::to_string(pos[j]));
    }
    y[j] = obs.at(pos[j]);
  }
  return y;
}

Complex dot(const Eigen::VectorXd& taps, const std::vector<Complex>& y) {
  Complex acc(0.0, 0.0);
  for (std::size_t j = 0; j < y.size(); ++j) acc += taps(static_cast<Eigen::Index>(j)) * y[j];
  return acc;
}

Index case_a_theta(const RecoveryTask& task) {
  const Index theta = task.theta.value_or(*std::min_element(task.targets.begin(), task.targets.end()) - 1);
  for (Index t : task.targets) {
    if (t <= theta) {
      throw ConfigError("forward target " + std::to_string(t) + " must exceed theta = " + std::to_string(theta));
    }
  }
  return theta;
}

RecoveryReport case_a_exact(const RecoveryTask& task, Index theta) {
  if (!task.exact_signal) throw ConfigError("exact mode needs an exact signal");
  const auto top = task.pattern.index_at_or_below(theta);
  if (!top) throw InsufficientObservations("pattern has no point <= " + std::to_string(theta));

  std::vector<int> horizons;
  for (Index t : task.targets) horizons.push_back(static_cast<int>(t - theta));
  const int m_max = *std::max_element(horizons.begin(), horizons.end());
  ExactOptions opt = task.exact_options;
  if (opt.precision_bits <= 0) opt.precision_bits = exact_precision_bits(m_max, task.params);
  const ExactSampler sample = task.exact_signal(opt.precision_bits);
  const ObservationPattern& pattern = task.pattern;
  const SparseSignal& perturb = task.observations;
  const Index k_top = *top;

  const ExactResult res = exact_predict(
      task.params, horizons,
      [&](mpfr_ptr out, Index lag) {
        Index t;
        try {
          t = pattern.value(k_top - lag);
        } catch (const RangeNotMaterialized&) {
          throw InsufficientObservations("pattern ran out of points at lag " + std::to_string(lag));
        }
        sample(out, t);
        const Complex d = perturb.at(t);
        if (d != Complex(0.0, 0.0)) mpfr_add_d(out, out, d.real(), MPFR_RNDN);
      },
      opt);

  RecoveryReport r;
  r.pattern_case = PatternCase::A;
  r.theta = theta;
  r.mode = RecoveryMode::exact;
  r.targets = task.targets;
  for (int m : horizons) {
    const ExactHorizon& h = res.at(m);
    r.estimates.emplace_back(h.estimate, 0.0);
    KernelInfo i;
    i.m = m;
    i.gamma = task.params.gamma();
    i.r_hat = task.params.r_hat();
    i.n_taps = static_cast<std::size_t>(res.n_taps);
    i.log10_l2_norm = h.log10_l2_norm;
    i.l2_norm = h.log10_l2_norm < 308.0 ? std::pow(10.0, h.log10_l2_norm) : std::numeric_limits<double>::infinity();
    i.tail_fraction = h.tail_fraction;
    i.tail_l1 = h.tail_l1;
    r.kernels.push_back(i);
  }
  return r;
}

nlohmann::json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

std::string to_string(RecoveryMode m) {
  switch (m) {
    case RecoveryMode::masked: return "masked";
    case RecoveryMode::direct: return "direct";
    case RecoveryMode::exact: return "exact";
  }
  return "?";
}

RecoveryMode recovery_mode_from(const std::string& s) {
  if (s == "masked") return RecoveryMode::masked;
  if (s == "direct") return RecoveryMode::direct;
  if (s == "exact") return RecoveryMode::exact;
  throw ConfigError("mode must be masked, direct or exact, got " + s);
}

bool same_problem(const RecoveryTask& a, const RecoveryTask& b) {
  return a.pattern == b.pattern && a.targets == b.targets && a.observations.indices() == b.observations.indices() &&
         a.observations.values() == b.observations.values() && a.theta == b.theta && a.params == b.params &&
         a.n_taps == b.n_taps && a.gap == b.gap && a.mode == b.mode && a.target_class == b.target_class;
}

RecoveryTask reverse(const RecoveryTask& task) {
  RecoveryTask r = task;
  r.pattern = task.pattern.mirrored();
  for (auto& t : r.targets) t = -t;
  SparseSignal obs;
  const auto& idx = task.observations.indices();
  const auto& val = task.observations.values();
  for (std::size_t i = idx.size(); i-- > 0;) obs.set(-idx[i], val[i]);
  r.observations = std::move(obs);
  if (task.theta) r.theta = -*task.theta;
  if (task.target_class) r.target_class = task.target_class->mirrored();
  if (task.exact_signal) {
    r.exact_signal = [inner = task.exact_signal](mpfr_prec_t bits) -> ExactSampler {
      ExactSampler s = inner(bits);
      return [s](mpfr_ptr out, Index t) { s(out, -t); };
    };
  }
  return r;
}

double RecoveryReport::max_kernel_norm() const {
  double m = 0.0;
  for (const auto& k : kernels) m = std::max(m, k.l2_norm);
  return m;
}

Complex RecoveryReport::estimate_at(Index t) const {
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] == t) return estimates[i];
  }
  throw ConfigError("no estimate for target " + std::to_string(t));
}

void RecoveryReport::attach_truth(const std::function<Complex(Index)>& truth) {
  errors.clear();
  double worst = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    errors.push_back(std::abs(truth(targets[i]) - estimates[i]));
    worst = std::max(worst, errors.back());
  }
  sup_error = worst;
}

void RecoveryReport::attach_truth(const Signal& truth) {
  attach_truth([&](Index t) { return truth.at(t); });
}

RecoveryReport reverse(const RecoveryReport& report) {
  RecoveryReport r = report;
  for (auto& t : r.targets) t = -t;
  if (r.theta) r.theta = -*r.theta;
  if (r.pattern_case == PatternCase::A) {
    r.pattern_case = PatternCase::B;
  } else if (r.pattern_case == PatternCase::B) {
    r.pattern_case = PatternCase::A;
  }
  return r;
}

RecoveryReport recover(const RecoveryTask& task) {
  const TargetSet t = task.target_class.value_or(TargetSet::explicit_targets(task.targets));
  switch (pattern_case(task.pattern, t)) {
    case PatternCase::A: return recover_case_a(task);
    case PatternCase::B: return recover_case_b(task);
    case PatternCase::C: return recover_case_c(task);
    case PatternCase::Unsupported: break;
  }
  throw ConfigError("pattern/target combination satisfies none of the cases A, B, C");
}

RecoveryReport recover_case_a(const RecoveryTask& task) {
  require_targets(task);
  const Index theta = case_a_theta(task);
  if (task.mode == RecoveryMode::exact) return case_a_exact(task, theta);

  const std::vector<Complex> y = lag_values(task.observations, lag_positions(task, theta));
  RecoveryReport r;
  r.pattern_case = PatternCase::A;
  r.theta = theta;
  r.mode = task.mode;
  r.targets = task.targets;
  for (Index t : task.targets) {
    const auto k = KernelCache::global().get(static_cast<int>(t - theta), task.params, task.n_taps, task.mode, task.gap);
    r.estimates.push_back(dot(k->taps, y));
    r.kernels.push_back(info_from(*k));
  }
  return r;
}

RecoveryReport recover_case_b(const RecoveryTask& task) {
  require_targets(task);
  if (task.theta) {
    for (Index t : task.targets) {
      if (t >= *task.theta) {
        throw ConfigError("backward target " + std::to_string(t) + " must lie below theta = " +
                          std::to_string(*task.theta));
      }
    }
  }
  return reverse(recover_case_a(reverse(task)));
}

RecoveryReport recover_case_c(const RecoveryTask& task) {
  require_targets(task);
  RecoveryTask fwd = task, zero = task, bwd = task;
  fwd.targets.clear();
  zero.targets.clear();
  bwd.targets.clear();
  for (Index t : task.targets) {
    if (t > 0) fwd.targets.push_back(t);
    if (t == 0) zero.targets.push_back(t);
    if (t < 0) bwd.targets.push_back(t);
  }
  fwd.pattern = task.pattern.clipped_above(0);
  fwd.theta = 0;
  zero.pattern = task.pattern.clipped_above(-1);
  zero.theta = -1;
  bwd.pattern = task.pattern.clipped_below(0);
  bwd.theta = 0;
  fwd.target_class.reset();
  zero.target_class.reset();
  bwd.target_class.reset();

  std::vector<RecoveryReport> parts;
  if (!fwd.targets.empty()) parts.push_back(recover_case_a(fwd));
  if (!zero.targets.empty()) parts.push_back(recover_case_a(zero));
  if (!bwd.targets.empty()) parts.push_back(recover_case_b(bwd));

  RecoveryReport r;
  r.pattern_case = PatternCase::C;
  r.mode = task.mode;
  r.targets = task.targets;
  for (Index t : task.targets) {
    for (const auto& p : parts) {
      const auto it = std::find(p.targets.begin(), p.targets.end(), t);
      if (it == p.targets.end()) continue;
      const auto i = static_cast<std::size_t>(it - p.targets.begin());
      r.estimates.push_back(p.estimates[i]);
      r.kernels.push_back(p.kernels[i]);
      break;
    }
  }
  return r;
}

double sup_error(const std::vector<Complex>& estimates, const Signal& truth, const std::vector<Index>& targets) {
  if (estimates.size() != targets.size()) throw ConfigError("sup_error: size mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) worst = std::max(worst, std::abs(truth.at(targets[i]) - estimates[i]));
  return worst;
}

LinearEstimate make_estimator(const RecoveryTask& task, Index target) {
  if (task.mode == RecoveryMode::exact) throw ConfigError("exact mode has no explicit linear form");
  if (std::find(task.targets.begin(), task.targets.end(), target) == task.targets.end()) {
    throw ConfigError("target " + std::to_string(target) + " is not in the task");
  }
  const TargetSet cls = task.target_class.value_or(TargetSet::explicit_targets(task.targets));
  const PatternCase pc = pattern_case(task.pattern, cls);
  // theta is a property of the whole target list, not of the single target.
  RecoveryTask single = task;
  single.targets = {target};
  if (!single.theta) {
    single.theta = pc == PatternCase::B ? *std::max_element(task.targets.begin(), task.targets.end()) + 1
                                        : *std::min_element(task.targets.begin(), task.targets.end()) - 1;
  }
  require_targets(single);
  if (pc == PatternCase::B) {
    LinearEstimate e = make_estimator(reverse(single), -target);
    e.target = target;
    for (auto& p : e.positions) p = -p;
    return e;
  }
  if (pc != PatternCase::A) throw ConfigError("make_estimator supports cases A and B");
  const Index theta = case_a_theta(single);
  LinearEstimate e;
  e.target = target;
  e.positions = lag_positions(single, theta);
  const auto k = KernelCache::global().get(static_cast<int>(target - theta), task.params, task.n_taps, task.mode, task.gap);
  e.weights.assign(k->taps.data(), k->taps.data() + k->taps.size());
  return e;
}

Complex apply(const LinearEstimate& e, const SparseSignal& observations) {
  Complex acc(0.0, 0.0);
  for (std::size_t i = 0; i < e.positions.size(); ++i) acc += e.weights[i] * observations.at(e.positions[i]);
  return acc;
}

LinearEstimate prop1_restrict(const LinearEstimate& e, const std::function<bool(Index)>& in_subset) {
  LinearEstimate r = e;
  for (std::size_t i = 0; i < r.positions.size(); ++i) {
    if (!in_subset(r.positions[i])) r.weights[i] = 0.0;
  }
  return r;
}

LinearEstimate lift(const LinearEstimate& e, const std::vector<Index>& superset_positions) {
  // e's own terms keep their order, so the lifted sum is bitwise the original one plus zeros.
  std::set<Index> own(e.positions.begin(), e.positions.end());
  std::set<Index> super(superset_positions.begin(), superset_positions.end());
  for (Index p : own) {
    if (!super.count(p)) throw ConfigError("lift: positions are not a subset of the superset");
  }
  LinearEstimate r = e;
  for (Index p : superset_positions) {
    if (own.insert(p).second) {
      r.positions.push_back(p);
      r.weights.push_back(0.0);
    }
  }
  return r;
}

nlohmann::json report_to_json(const RecoveryReport& r) {
  nlohmann::json j;
  j["case"] = to_string(r.pattern_case);
  j["mode"] = to_string(r.mode);
  j["theta"] = r.theta ? nlohmann::json(*r.theta) : nlohmann::json(nullptr);
  j["targets"] = r.targets;
  nlohmann::json est = nlohmann::json::array();
  bool complex_valued = false;
  for (const auto& e : r.estimates) {
    est.push_back(finite_or_null(e.real()));
    complex_valued |= e.imag() != 0.0;
  }
  j["estimates"] = est;
  if (complex_valued) {
    nlohmann::json im = nlohmann::json::array();
    for (const auto& e : r.estimates) im.push_back(finite_or_null(e.imag()));
    j["estimates_imag"] = im;
  }
  j["errors"] = r.errors;
  j["sup_error"] = r.sup_error ? finite_or_null(*r.sup_error) : nlohmann::json(nullptr);
  nlohmann::json ks = nlohmann::json::array();
  for (const auto& k : r.kernels) {
    ks.push_back({{"m", k.m},
                  {"gamma", k.gamma},
                  {"r_hat", k.r_hat},
                  {"N", k.n_taps},
                  {"G_used", k.grid_used},
                  {"l2_norm", finite_or_null(k.l2_norm)},
                  {"log10_l2_norm", finite_or_null(k.log10_l2_norm)},
                  {"tail_fraction", k.tail_fraction},
                  {"tail_l1", k.tail_l1},
                  {"masked", k.masked},
                  {"saturated", k.saturated}});
  }
  j["kernels"] = ks;
  return j;
}

struct KernelCache::Impl {
  using Key = std::tuple<int, double, double, std::size_t, int, double, double>;
  mutable std::shared_mutex mutex;
  std::map<Key, std::shared_ptr<const Kernel>> entries;
};

KernelCache::KernelCache() : impl_(std::make_shared<Impl>()) {}

KernelCache& KernelCache::global() {
  static KernelCache cache;
  return cache;
}

std::shared_ptr<const Kernel> KernelCache::get(int m, const PredictorParams& p, std::size_t n_taps,
                                               RecoveryMode mode, const SpectralGap& gap) {
  if (mode == RecoveryMode::exact) throw ConfigError("exact kernels are streamed, not cached");
  const bool masked = mode == RecoveryMode::masked;
  const Impl::Key key{m, p.gamma(), p.r_hat(), n_taps, static_cast<int>(mode), masked ? gap.center() : 0.0,
                      masked ? gap.delta() : 0.0};
  {
    std::shared_lock lock(impl_->mutex);
    const auto it = impl_->entries.find(key);
    if (it != impl_->entries.end()) return it->second;
  }
  auto k = std::make_shared<const Kernel>(masked ? synth_circular_kernel(m, p, n_taps, gap) : synth_kernel(m, p, n_taps));
  std::unique_lock lock(impl_->mutex);
  return impl_->entries.emplace(key, std::move(k)).first->second;
}

std::size_t KernelCache::size() const {
  std::shared_lock lock(impl_->mutex);
  return impl_->entries.size();
}

void KernelCache::clear() {
  std::unique_lock lock(impl_->mutex);
  impl_->entries.clear();
}

}  // namespace gaprec
