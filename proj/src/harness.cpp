#include "gaprec/harness.hpp"

#include "gaprec/errors.hpp"
#include "gaprec/multiprecision.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <thread>

namespace gaprec {

namespace {

Index mod_floor(__int128 a, Index p) {
  __int128 r = a % p;
  if (r < 0) r += p;
  return static_cast<Index>(r);
}

template <class T>
std::vector<T> list_or_scalar(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

// Standard normals from mt19937_64 via Box-Muller on 53-bit uniforms.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}
  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

 private:
  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

Index default_theta_a(const std::vector<Index>& targets, const std::optional<Index>& theta) {
  return theta.value_or(*std::min_element(targets.begin(), targets.end()) - 1);
}

Index default_theta_b(const std::vector<Index>& targets, const std::optional<Index>& theta) {
  return theta.value_or(*std::max_element(targets.begin(), targets.end()) + 1);
}

std::vector<Index> observation_positions(const ExperimentSpec& s, PatternCase pc, Index depth) {
  std::vector<Index> pos;
  auto append = [&](const std::vector<Index>& v) { pos.insert(pos.end(), v.begin(), v.end()); };
  switch (pc) {
    case PatternCase::A: append(s.pattern.below(default_theta_a(s.targets, s.theta), depth)); break;
    case PatternCase::B: append(s.pattern.above(default_theta_b(s.targets, s.theta), depth)); break;
    case PatternCase::C: {
      append(s.pattern.clipped_above(0).below(0, depth));
      append(s.pattern.clipped_below(0).above(0, depth));
      if (std::find(s.targets.begin(), s.targets.end(), 0) != s.targets.end()) {
        append(s.pattern.clipped_above(-1).below(-1, depth));
      }
      break;
    }
    case PatternCase::Unsupported: throw ConfigError("pattern/target combination satisfies none of the cases");
  }
  std::sort(pos.begin(), pos.end());
  pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
  return pos;
}

struct Member {
  SparseSignal clean;
  std::function<Complex(Index)> truth;
};

// Point sampler over the whole line; noise signals are materialized once from `start`.
std::function<Complex(Index)> sampler(const SignalSpec& sig, const SpectralGap& gap, Index start) {
  if (sig.kind == SignalSpec::Kind::sinusoid_mix) {
    gen_signal(sig, gap, 0, 0);  // frequency check
    return [comps = sig.components](Index t) {
      double v = 0.0;
      for (const auto& c : comps) v += c.at(t);
      return Complex(v, 0.0);
    };
  }
  auto x = std::make_shared<Signal>(gen_signal(sig, gap, start, sig.length));
  return [x](Index t) { return x->at(t); };
}

// Forward member: tau at theta with depth N, projection on G, periodic extension up to the last target.
// Same values as build_class_member, evaluated only on tau's range.
Member forward_member(const SignalSpec& sig, const ObservationPattern& pattern, const std::vector<Index>& targets,
                      Index theta, const SpectralGap& gap, std::size_t n_taps, std::size_t grid) {
  const TauMap tau = build_tau_at(pattern, theta, static_cast<Index>(n_taps));
  const Index g = static_cast<Index>(grid);
  const Index m_max = *std::max_element(targets.begin(), targets.end()) - theta;
  const Index k_lo = tau.k_lo();
  const Index k_hi = std::max(k_lo + g - 1, theta + m_max);
  const auto x = sampler(sig, gap, tau(k_lo));
  Signal y = Signal::zeros(k_lo, grid);
  bool real = true;
  for (Index k = k_lo; k < k_lo + g; ++k) {
    y[k] = x(tau(k));
    real = real && y[k].imag() == 0.0;
  }
  Signal y_hat = project_gap(y, gap, grid);
  if (real && (gap.center() == 0.0 || gap.center() == kPi)) y_hat.values() = y_hat.values().real().cast<Complex>();
  auto member = std::make_shared<std::map<Index, Complex>>();
  for (Index k = k_lo; k <= k_hi; ++k) (*member)[tau(k)] = y_hat.at(k_lo + (k - k_lo) % g);
  Member out;
  for (Index p : tau.table()) out.clean.set(p, member->at(p));
  out.truth = [member, x](Index t) {
    const auto it = member->find(t);
    return it != member->end() ? it->second : x(t);
  };
  return out;
}

std::string sanitize(std::string s) {
  for (auto& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

nlohmann::json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

double number_from(const nlohmann::json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

}  // namespace

SinusoidComponent SinusoidComponent::radians(double amplitude, double omega, double phase) {
  SinusoidComponent c;
  c.amplitude = amplitude;
  c.omega = omega;
  c.phase = phase;
  return c;
}

SinusoidComponent SinusoidComponent::rational(double amplitude, Index cycles, Index period, double phase) {
  if (period < 1) throw ConfigError("sinusoid period must be >= 1");
  SinusoidComponent c;
  c.amplitude = amplitude;
  c.cycles = cycles;
  c.period = period;
  c.phase = phase;
  c.omega = 2.0 * kPi * static_cast<double>(mod_floor(cycles, period)) / static_cast<double>(period);
  return c;
}

double SinusoidComponent::frequency() const {
  double w = std::remainder(omega, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

double SinusoidComponent::at(Index t) const {
  if (is_rational()) {
    const Index r = mod_floor(static_cast<__int128>(cycles) * t, period);
    return amplitude * std::cos(2.0 * kPi * static_cast<double>(r) / static_cast<double>(period) + phase);
  }
  return amplitude * std::cos(omega * static_cast<double>(t) + phase);
}

ExperimentSpec spec_from_json(const nlohmann::json& j) {
  ExperimentSpec s;
  try {
    const auto& sig = j.at("signal");
    const auto kind = sig.at("kind").get<std::string>();
    if (kind == "sinusoid_mix") {
      s.signal.kind = SignalSpec::Kind::sinusoid_mix;
      for (const auto& c : sig.value("components", nlohmann::json::array())) {
        const double a = c.value("amplitude", 1.0);
        const double ph = c.value("phase", 0.0);
        if (c.contains("period")) {
          s.signal.components.push_back(
              SinusoidComponent::rational(a, c.at("cycles").get<Index>(), c.at("period").get<Index>(), ph));
        } else {
          s.signal.components.push_back(SinusoidComponent::radians(a, c.at("frequency").get<double>(), ph));
        }
      }
    } else if (kind == "seeded_noise") {
      s.signal.kind = SignalSpec::Kind::seeded_noise;
      s.signal.seed = sig.at("seed").get<std::uint64_t>();
      s.signal.length = sig.value("length", std::size_t{256});
    } else {
      throw ConfigError("signal kind must be sinusoid_mix or seeded_noise");
    }
    s.pattern = pattern_from_json(j.at("pattern"));
    s.targets = j.at("targets").get<std::vector<Index>>();
    if (j.contains("target_class")) s.target_class = target_set_from_json(j.at("target_class"));
    if (j.contains("gap")) s.gap = gap_from_json(j.at("gap"));
    if (j.contains("gamma")) s.gammas = list_or_scalar<double>(j, "gamma");
    s.r_hat = j.value("r_hat", 1.0);
    if (j.contains("N")) s.n_taps = list_or_scalar<std::size_t>(j, "N");
    if (j.contains("rho")) s.rhos = list_or_scalar<double>(j, "rho");
    if (j.contains("noise_seeds")) s.noise_seeds = list_or_scalar<std::uint64_t>(j, "noise_seeds");
    if (j.contains("noise_seed")) s.noise_seeds = list_or_scalar<std::uint64_t>(j, "noise_seed");
    if (j.contains("mode")) s.mode = recovery_mode_from(j.at("mode").get<std::string>());
    if (j.contains("theta")) s.theta = j.at("theta").get<Index>();
    if (j.contains("class_member")) s.class_member = j.at("class_member").get<bool>();
    if (j.contains("exact")) {
      const auto& e = j.at("exact");
      s.exact.precision_bits = e.value("precision_bits", mpfr_prec_t{0});
      s.exact.tap_tolerance = e.value("tap_tolerance", s.exact.tap_tolerance);
      s.exact.quiet_run = e.value("quiet_run", s.exact.quiet_run);
      s.exact.max_taps = e.value("max_taps", s.exact.max_taps);
    }
    s.output = j.value("output", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("experiment spec: ") + e.what());
  }
  validate(s);
  return s;
}

nlohmann::json spec_to_json(const ExperimentSpec& s) {
  nlohmann::json sig;
  if (s.signal.kind == SignalSpec::Kind::sinusoid_mix) {
    sig["kind"] = "sinusoid_mix";
    sig["components"] = nlohmann::json::array();
    for (const auto& c : s.signal.components) {
      nlohmann::json cj{{"amplitude", c.amplitude}, {"phase", c.phase}};
      if (c.is_rational()) {
        cj["cycles"] = c.cycles;
        cj["period"] = c.period;
      } else {
        cj["frequency"] = c.omega;
      }
      sig["components"].push_back(cj);
    }
  } else {
    sig = {{"kind", "seeded_noise"}, {"seed", s.signal.seed}, {"length", s.signal.length}};
  }
  nlohmann::json j{{"signal", sig},
                   {"pattern", pattern_to_json(s.pattern)},
                   {"targets", s.targets},
                   {"gap", gap_to_json(s.gap)},
                   {"gamma", s.gammas},
                   {"r_hat", s.r_hat},
                   {"N", s.n_taps},
                   {"rho", s.rhos},
                   {"noise_seeds", s.noise_seeds},
                   {"mode", to_string(s.mode)},
                   {"class_member", s.uses_class_member()}};
  if (s.target_class) j["target_class"] = target_set_to_json(*s.target_class);
  if (s.theta) j["theta"] = *s.theta;
  if (s.mode == RecoveryMode::exact) {
    j["exact"] = {{"precision_bits", s.exact.precision_bits},
                  {"tap_tolerance", s.exact.tap_tolerance},
                  {"quiet_run", s.exact.quiet_run},
                  {"max_taps", s.exact.max_taps}};
  }
  if (!s.output.empty()) j["output"] = s.output;
  return j;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return spec_from_json(j);
}

void validate(const ExperimentSpec& s) {
  if (s.targets.empty()) throw ConfigError("targets must be nonempty");
  if (s.gammas.empty() || s.n_taps.empty() || s.rhos.empty() || s.noise_seeds.empty()) {
    throw ConfigError("gamma, N, rho and noise_seeds lists must be nonempty");
  }
  for (double g : s.gammas) {
    if (!(g > 0.0)) throw ConfigError("gamma values must be positive");
  }
  if (!(s.r_hat > 0.0)) throw ConfigError("r_hat must be positive");
  for (double r : s.rhos) {
    if (!(r >= 0.0)) throw ConfigError("rho values must be >= 0");
  }
  for (std::size_t n : s.n_taps) {
    if (s.mode == RecoveryMode::masked && (n < 2 || !is_power_of_two(n))) {
      throw ConfigError("masked mode needs power-of-two N, got " + std::to_string(n));
    }
    if (s.mode != RecoveryMode::exact && n < 1) throw ConfigError("N must be >= 1");
  }
  if (s.signal.kind == SignalSpec::Kind::sinusoid_mix) {
    for (const auto& c : s.signal.components) {
      if (in_gap(c.frequency(), s.gap) || in_gap(-c.frequency(), s.gap)) {
        throw FrequencyInGap("sinusoid frequency " + std::to_string(c.frequency()) + " lies in the gap");
      }
    }
  }
  if (s.mode == RecoveryMode::exact) {
    if (s.signal.kind != SignalSpec::Kind::sinusoid_mix) throw ConfigError("exact mode needs a sinusoid_mix signal");
    if (s.uses_class_member()) throw ConfigError("exact mode observes the signal directly; set class_member false");
  }
  const PatternCase pc = pattern_case(s.pattern, s.target_class.value_or(TargetSet::explicit_targets(s.targets)));
  if (pc == PatternCase::Unsupported) throw ConfigError("pattern/target combination satisfies none of the cases");
  if (pc == PatternCase::C && s.uses_class_member()) {
    throw ConfigError("class-member construction covers cases A and B; set class_member false");
  }
}

Signal gen_signal(const SignalSpec& spec, const SpectralGap& gap, Index start, std::size_t length) {
  if (spec.kind == SignalSpec::Kind::sinusoid_mix) {
    for (const auto& c : spec.components) {
      if (in_gap(c.frequency(), gap) || in_gap(-c.frequency(), gap)) {
        throw FrequencyInGap("sinusoid frequency " + std::to_string(c.frequency()) + " lies in the gap");
      }
    }
    Signal x = Signal::zeros(start, length);
    if (spec.components.empty()) return x;
    for (Index t = start; t < start + static_cast<Index>(length); ++t) {
      double v = 0.0;
      for (const auto& c : spec.components) v += c.at(t);
      x[t] = v;
    }
    return x;
  }
  const std::size_t n = std::max<std::size_t>(spec.length, 1);
  GaussianStream g(spec.seed);
  Signal x = Signal::zeros(start, n);
  for (Index t = start; t < start + static_cast<Index>(n); ++t) x[t] = g.next();
  const std::size_t grid = std::max<std::size_t>(2, next_power_of_two(n));
  Signal p = project_gap(x, gap, grid);
  if (gap.center() == 0.0 || gap.center() == kPi) p.values() = p.values().real().cast<Complex>();
  return p;
}

Signal gen_signal(const SignalSpec& spec, const SpectralGap& gap) {
  const std::size_t len = spec.kind == SignalSpec::Kind::seeded_noise ? spec.length : 0;
  return gen_signal(spec, gap, 0, len);
}

ExactSignal exact_signal(const SignalSpec& spec) {
  if (spec.kind != SignalSpec::Kind::sinusoid_mix) throw ConfigError("exact sampling needs a sinusoid_mix signal");
  const std::vector<SinusoidComponent> comps = spec.components;
  return [comps](mpfr_prec_t bits) -> ExactSampler {
    constexpr Index kMaxTable = Index{1} << 20;
    struct State {
      std::vector<std::vector<MpReal>> tables;
      MpReal pi, arg, term;
      explicit State(mpfr_prec_t b) : pi(b), arg(b), term(b) { mpfr_const_pi(pi.get(), MPFR_RNDN); }
    };
    auto st = std::make_shared<State>(bits);
    for (const auto& c : comps) {
      std::vector<MpReal> table;
      if (c.is_rational() && c.period <= kMaxTable) {
        table.reserve(static_cast<std::size_t>(c.period));
        for (Index r = 0; r < c.period; ++r) {
          MpReal v(bits);
          mpfr_mul_si(st->arg.get(), st->pi.get(), 2 * r, MPFR_RNDN);
          mpfr_div_si(st->arg.get(), st->arg.get(), c.period, MPFR_RNDN);
          mpfr_add_d(st->arg.get(), st->arg.get(), c.phase, MPFR_RNDN);
          mpfr_cos(v.get(), st->arg.get(), MPFR_RNDN);
          mpfr_mul_d(v.get(), v.get(), c.amplitude, MPFR_RNDN);
          table.push_back(std::move(v));
        }
      }
      st->tables.push_back(std::move(table));
    }
    return [comps, st](mpfr_ptr out, Index t) {
      mpfr_set_zero(out, 1);
      for (std::size_t i = 0; i < comps.size(); ++i) {
        const auto& c = comps[i];
        if (!st->tables[i].empty()) {
          const Index r = mod_floor(static_cast<__int128>(c.cycles) * t, c.period);
          mpfr_add(out, out, st->tables[i][static_cast<std::size_t>(r)].get(), MPFR_RNDN);
          continue;
        }
        if (c.is_rational()) {
          const Index r = mod_floor(static_cast<__int128>(c.cycles) * t, c.period);
          mpfr_mul_si(st->arg.get(), st->pi.get(), 2 * r, MPFR_RNDN);
          mpfr_div_si(st->arg.get(), st->arg.get(), c.period, MPFR_RNDN);
        } else {
          mpfr_set_d(st->arg.get(), c.omega, MPFR_RNDN);
          mpfr_mul_si(st->arg.get(), st->arg.get(), t, MPFR_RNDN);
        }
        mpfr_add_d(st->arg.get(), st->arg.get(), c.phase, MPFR_RNDN);
        mpfr_cos(st->term.get(), st->arg.get(), MPFR_RNDN);
        mpfr_mul_d(st->term.get(), st->term.get(), c.amplitude, MPFR_RNDN);
        mpfr_add(out, out, st->term.get(), MPFR_RNDN);
      }
    };
  };
}

Signal gen_noise(double rho, std::uint64_t seed, Index start, std::size_t length) {
  if (!(rho >= 0.0)) throw ConfigError("rho must be >= 0");
  Signal x = Signal::zeros(start, length);
  if (rho == 0.0 || length == 0) return x;
  GaussianStream g(seed);
  for (Index t = start; t < x.end(); ++t) x[t] = g.next();
  x.values() *= rho / x.values().norm();
  return x;
}

SparseSignal gen_noise(double rho, std::uint64_t seed, const std::vector<Index>& positions) {
  const Signal dense = gen_noise(rho, seed, 0, positions.size());
  SparseSignal out;
  for (std::size_t i = 0; i < positions.size(); ++i) out.set(positions[i], dense.at(static_cast<Index>(i)));
  return out;
}

PreparedTask prepare_task(const ExperimentSpec& s, double gamma, std::size_t n_taps, double rho, std::uint64_t seed) {
  validate(s);
  PreparedTask prep;
  RecoveryTask& task = prep.task;
  task.pattern = s.pattern;
  task.targets = s.targets;
  task.theta = s.theta;
  task.params = PredictorParams(gamma, s.r_hat);
  task.n_taps = n_taps;
  task.gap = s.gap;
  task.mode = s.mode;
  task.target_class = s.target_class;
  const PatternCase pc = pattern_case(s.pattern, s.target_class.value_or(TargetSet::explicit_targets(s.targets)));
  if (pc == PatternCase::Unsupported) throw ConfigError("pattern/target combination satisfies none of the cases");

  if (s.mode == RecoveryMode::exact) {
    task.exact_signal = exact_signal(s.signal);
    task.exact_options = s.exact;
    task.exact_options.n_taps = static_cast<Index>(n_taps);
    const Index depth = n_taps > 0 ? static_cast<Index>(n_taps) : 1024;
    std::vector<Index> order = observation_positions(s, pc, depth);
    if (pc == PatternCase::B) std::reverse(order.begin(), order.end());
    task.observations = gen_noise(rho, seed, order);
    const SignalSpec sig = s.signal;
    prep.truth = [sig](Index t) {
      double v = 0.0;
      for (const auto& c : sig.components) v += c.at(t);
      return Complex(v, 0.0);
    };
    return prep;
  }

  // Noise is drawn in the A-frame order, so a mirrored case B problem sees mirrored noise.
  std::vector<Index> order;
  if (!s.uses_class_member()) {
    const std::vector<Index> pos = observation_positions(s, pc, static_cast<Index>(n_taps));
    const auto x = sampler(s.signal, s.gap, std::min(pos.front(), *std::min_element(s.targets.begin(), s.targets.end())));
    for (Index p : pos) task.observations.set(p, x(p));
    prep.truth = x;
    order = pos;
    if (pc == PatternCase::B) std::reverse(order.begin(), order.end());
  } else {
    const std::size_t grid = s.mode == RecoveryMode::masked ? n_taps : std::max<std::size_t>(2, next_power_of_two(n_taps));
    if (pc == PatternCase::A) {
      Member m = forward_member(s.signal, s.pattern, s.targets, default_theta_a(s.targets, s.theta), s.gap, n_taps, grid);
      task.observations = std::move(m.clean);
      prep.truth = std::move(m.truth);
      order = task.observations.indices();
    } else {
      std::vector<Index> mt;
      for (Index t : s.targets) mt.push_back(-t);
      Member m = forward_member(s.signal, s.pattern.mirrored(), mt, -default_theta_b(s.targets, s.theta), s.gap,
                                n_taps, grid);
      const auto& idx = m.clean.indices();
      const auto& val = m.clean.values();
      for (std::size_t i = 0; i < idx.size(); ++i) {
        task.observations.set(-idx[i], val[i]);
        order.push_back(-idx[i]);
      }
      prep.truth = [f = std::move(m.truth)](Index t) { return f(-t); };
    }
  }
  const SparseSignal noise = gen_noise(rho, seed, order);
  for (Index p : order) task.observations.set(p, task.observations.at(p) + noise.at(p));
  return prep;
}

std::vector<SweepRow> run_sweep(const ExperimentSpec& s, unsigned parallel) {
  validate(s);
  std::vector<SweepRow> rows;
  for (double g : s.gammas) {
    for (std::size_t n : s.n_taps) {
      for (double r : s.rhos) {
        for (std::uint64_t seed : s.noise_seeds) {
          SweepRow row;
          row.gamma = g;
          row.n_taps = n;
          row.rho = r;
          row.seed = seed;
          rows.push_back(row);
        }
      }
    }
  }
  auto run_row = [&](SweepRow& row) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      PreparedTask prep = prepare_task(s, row.gamma, row.n_taps, row.rho, row.seed);
      RecoveryReport rep = recover(prep.task);
      rep.attach_truth(prep.truth);
      row.sup_error = *rep.sup_error;
      row.max_kernel_norm = rep.max_kernel_norm();
      row.status = "ok";
    } catch (const ConfigError& e) {
      row.status = sanitize(std::string("config_error: ") + e.what());
    } catch (const NumericalError& e) {
      row.status = sanitize(std::string("numerical_error: ") + e.what());
    } catch (const std::exception& e) {
      row.status = sanitize(std::string("error: ") + e.what());
    }
    if (!row.ok()) {
      row.sup_error = std::numeric_limits<double>::quiet_NaN();
      row.max_kernel_norm = std::numeric_limits<double>::quiet_NaN();
    }
    row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(parallel, static_cast<unsigned>(rows.size())));
  if (workers == 1) {
    for (auto& row : rows) run_row(row);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < rows.size(); i = next++) run_row(rows[i]);
    });
  }
  for (auto& t : pool) t.join();
  return rows;
}

ReportFormat report_format_from(const std::string& s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  throw ConfigError("format must be csv or json, got " + s);
}

void write_rows_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "gamma,N,rho,seed,sup_error,max_kernel_norm,runtime_ms,status\n" << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.gamma << ',' << r.n_taps << ',' << r.rho << ',' << r.seed << ',' << r.sup_error << ','
       << r.max_kernel_norm << ',' << r.runtime_ms << ',' << sanitize(r.status) << '\n';
  }
}

nlohmann::json rows_to_json(const std::vector<SweepRow>& rows) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& r : rows) {
    a.push_back({{"gamma", r.gamma},
                 {"N", r.n_taps},
                 {"rho", r.rho},
                 {"seed", r.seed},
                 {"sup_error", number_or_null(r.sup_error)},
                 {"max_kernel_norm", number_or_null(r.max_kernel_norm)},
                 {"runtime_ms", r.runtime_ms},
                 {"status", r.status}});
  }
  return a;
}

std::vector<SweepRow> rows_from_json(const nlohmann::json& j) {
  std::vector<SweepRow> rows;
  for (const auto& o : j) {
    SweepRow r;
    r.gamma = o.at("gamma").get<double>();
    r.n_taps = o.at("N").get<std::size_t>();
    r.rho = o.at("rho").get<double>();
    r.seed = o.at("seed").get<std::uint64_t>();
    r.sup_error = number_from(o.at("sup_error"));
    r.max_kernel_norm = number_from(o.at("max_kernel_norm"));
    r.runtime_ms = o.at("runtime_ms").get<double>();
    r.status = o.at("status").get<std::string>();
    rows.push_back(r);
  }
  return rows;
}

void emit_report(const std::vector<SweepRow>& rows, ReportFormat format, const std::string& path,
                 const nlohmann::json* meta) {
  if (rows.empty()) throw ConfigError("emit_report: no rows");
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + ": " + std::strerror(errno));
  if (format == ReportFormat::csv) {
    write_rows_csv(os, rows);
  } else {
    os << rows_to_json(rows).dump(2) << '\n';
  }
  if (!os) throw std::runtime_error("write failed for " + path + ": " + std::strerror(errno));
  if (meta) {
    std::ofstream ms(path + ".meta.json");
    if (!ms) throw std::runtime_error("cannot open " + path + ".meta.json: " + std::strerror(errno));
    ms << meta->dump(2) << '\n';
  }
}

nlohmann::json report_metadata(const ExperimentSpec& s) {
  return {{"rng", kRngAlgorithm},
          {"columns", {"gamma", "N", "rho", "seed", "sup_error", "max_kernel_norm", "runtime_ms", "status"}},
          {"spec", spec_to_json(s)}};
}

std::optional<SweepRow> find_witness(const std::vector<SweepRow>& rows, double tol) {
  for (const auto& r : rows) {
    if (r.ok() && r.rho > 0.0 && r.sup_error <= tol) return r;
  }
  return std::nullopt;
}

}  // namespace gaprec
