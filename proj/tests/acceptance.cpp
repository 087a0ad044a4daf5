// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any fails.

#include "gaprec/errors.hpp"
#include "gaprec/exact_kernels.hpp"
#include "gaprec/gap.hpp"
#include "gaprec/harness.hpp"
#include "gaprec/kernels.hpp"
#include "gaprec/patterns.hpp"
#include "gaprec/recovery.hpp"
#include "gaprec/spectral.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <tuple>

using namespace gaprec;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

SparseSignal sample_on(const std::vector<Index>& pos, const std::function<double(Index)>& f) {
  SparseSignal s;
  for (Index p : pos) s.set(p, f(p));
  return s;
}

Outcome c1() {
  std::mt19937_64 rng(101);
  double round_trip = 0.0, parseval = 0.0, vs_oracle = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t G = i % 2 == 0 ? 64 : 1024;
    const std::size_t L = 1 + rng() % G;
    const Signal x = oracle::random_signal(rng, static_cast<Index>(rng() % 2001) - 1000, L);
    const Spectrum s = z_transform_on_grid(x, G);
    const Signal back = inverse_z_on_grid(s, x.start(), L);
    const double scale = x.values().cwiseAbs().maxCoeff();
    round_trip = std::max(round_trip, (back.values() - x.values()).cwiseAbs().maxCoeff() / scale);
    const double e_t = x.values().squaredNorm();
    const double e_f = s.values().squaredNorm() / static_cast<double>(G);
    parseval = std::max(parseval, std::abs(e_t - e_f) / e_t);
    if (i < 20) {
      const auto ref = oracle::direct_dft(x, G);
      for (std::size_t j = 0; j < G; ++j) vs_oracle = std::max(vs_oracle, std::abs(ref[j] - s[j]) / std::sqrt(e_t));
    }
  }
  return {round_trip < 1e-10 && parseval < 1e-10 && vs_oracle < 1e-10,
          "round_trip=" + fmt(round_trip) + " parseval=" + fmt(parseval) + " dft_oracle=" + fmt(vs_oracle)};
}

Outcome c2() {
  std::mt19937_64 rng(202);
  double idem = 0.0, contraction = 0.0;
  bool monotone = true;
  for (int i = 0; i < 50; ++i) {
    const std::size_t G = 256;
    const Signal x = oracle::random_signal(rng, static_cast<Index>(rng() % 100) - 50, 1 + rng() % G);
    const double nx = norm_l2(x);
    const SpectralGap gap = SpectralGap::at_pi(0.5);
    const Signal p = project_gap(x, gap, G);
    const Signal pp = project_gap(p, gap, G);
    idem = std::max(idem, norm_linf(add_scaled(pp, p, -1.0)) / nx);
    contraction = std::max(contraction, (norm_l2(p) - nx) / nx);
    // Distance to the class grows as the gap widens.
    double prev = std::numeric_limits<double>::infinity();
    for (double delta : {2.0, 1.0, 0.5, 0.25}) {
      const double d = norm_l2(add_scaled(project_gap(x, SpectralGap::at_pi(delta), G), x, -1.0));
      if (d > prev + 1e-12 * nx) monotone = false;
      prev = d;
    }
  }
  return {idem <= 1e-12 && contraction <= 1e-12 && monotone,
          "idempotence=" + fmt(idem) + " contraction_excess=" + fmt(contraction) +
              " monotone=" + (monotone ? "yes" : "no")};
}

Outcome c3() {
  double worst = 0.0;
  for (int m : {1, 2, 3}) {
    const Kernel k = synth_kernel(m, PredictorParams(1.0, 1.0), 64);
    const auto ref = oracle::series_power(m, 16);
    for (int j = 0; j < 16; ++j) worst = std::max(worst, std::abs(k.taps(j) - static_cast<double>(ref[j])));
  }
  return {worst <= 1e-8, "max_tap_error=" + fmt(worst)};
}

Outcome c4() {
  const SpectralGap gap = SpectralGap::at_pi(1.0);
  std::vector<double> fe;
  std::string d;
  for (double g : {5.0, 10.0, 20.0, 40.0, 80.0}) {
    fe.push_back(freq_error(PredictorParams(g), 1, gap, 4096));
    d += " fe(" + std::to_string(static_cast<int>(g)) + ")=" + fmt(fe.back());
  }
  bool ok = fe.back() < 1e-3 * fe.front();
  for (std::size_t i = 1; i < fe.size(); ++i) {
    if (fe[i - 1] <= 1e-14) break;
    if (!(fe[i] < fe[i - 1]) && !(fe[i] <= 1e-14)) ok = false;
  }
  return {ok, d.substr(1)};
}

Outcome c5() {
  const PredictorParams p(100.0, 1.0);
  const double c = 2.5;
  RecoveryTask t;
  t.pattern = ObservationPattern::contiguous();
  t.targets = {1};
  t.params = p;
  t.n_taps = 64;
  t.observations = sample_on(t.pattern.below(0, 64), [&](Index) { return c; });
  const RecoveryReport r = recover(t);
  const double est = r.estimates[0].real();
  const double gain = 1.0 - std::exp(-p.gamma() / (1.0 + (1.0 - std::pow(p.gamma(), -p.r_hat()))));
  const double err = std::abs(est - c), gain_err = std::abs(kernel_dc_gain(1, p) - gain);
  return {err < 1e-15 * std::abs(c) && gain_err < 1e-15 && r.estimates[0].imag() == 0.0,
          "|est-c|/|c|=" + fmt(err / std::abs(c)) + " dc_gain_vs_closed_form=" + fmt(gain_err)};
}

Outcome c6() {
  ExperimentSpec s;
  s.signal.components = {SinusoidComponent::rational(1.0, 1, 6), SinusoidComponent::rational(0.5, 1, 10)};
  s.pattern = ObservationPattern::contiguous();
  s.targets = {1, 2, 3, 4, 5};
  s.gap = SpectralGap::at_pi(0.5);
  s.mode = RecoveryMode::exact;
  const double amp_sum = 1.5;
  std::string d;
  for (double g : {5.0, 10.0, 20.0}) {
    PreparedTask prep = prepare_task(s, g, 0, 0.0, 1);
    RecoveryReport r = recover(prep.task);
    r.attach_truth([&](Index t) {
      return Complex(std::cos(oracle::pi * static_cast<double>(t) / 3) + 0.5 * std::cos(oracle::pi * static_cast<double>(t) / 5), 0.0);
    });
    bool certified = true;
    double worst_ratio = 0.0;
    for (std::size_t i = 0; i < r.targets.size(); ++i) {
      const int m = r.kernels[i].m;
      double cert = r.kernels[i].tail_l1 * amp_sum;
      cert += std::abs(shift_defect(oracle::pi / 3, m, prep.task.params));
      cert += 0.5 * std::abs(shift_defect(oracle::pi / 5, m, prep.task.params));
      if (!(r.errors[i] <= cert * (1 + 1e-6) + 1e-15)) certified = false;
      worst_ratio = std::max(worst_ratio, r.errors[i] / std::max(cert, 1e-300));
    }
    d += "gamma=" + fmt(g) + " N=" + std::to_string(r.kernels[0].n_taps) + " sup=" + fmt(*r.sup_error) +
         " err/cert<=" + fmt(worst_ratio) + "; ";
    if (*r.sup_error <= 1e-3) return {certified, d + (certified ? "certified" : "certificate violated")};
    if (!certified) return {false, d + "certificate violated"};
  }
  return {false, d + "no gamma reached 1e-3"};
}

Outcome c7() {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  const std::size_t N = 512;
  RecoveryTask sparse;
  sparse.pattern = ObservationPattern::periodic(3);
  sparse.targets = {1, 2, 3, 4, 5};
  sparse.theta = 0;
  sparse.params = PredictorParams(40.0);
  sparse.n_taps = N;
  for (Index p : sparse.pattern.below(0, static_cast<Index>(N))) sparse.observations.set(p, nd(rng));
  RecoveryTask dense = sparse;
  dense.pattern = ObservationPattern::contiguous();
  dense.observations = SparseSignal();
  // Compressed sequence y(k) = x(3k) for k <= 0.
  for (std::size_t i = 0; i < sparse.observations.size(); ++i) {
    dense.observations.set(sparse.observations.indices()[i] / 3, sparse.observations.values()[i]);
  }
  const RecoveryReport a = recover(sparse), b = recover(dense);
  std::size_t equal = 0;
  for (Index t : sparse.targets) equal += a.estimate_at(t) == b.estimate_at(t);
  return {equal == sparse.targets.size(), std::to_string(equal) + "/5 estimates bit-identical"};
}

Outcome c8() {
  ExperimentSpec s;
  s.signal.components = {SinusoidComponent::rational(1.0, 43, 512), SinusoidComponent::rational(0.5, 101, 512)};
  s.pattern = ObservationPattern::periodic(3, Orientation::both);
  s.targets = {1, 2, 4, 5, -1, -2, -4, -5};
  s.target_class = TargetSet{TargetKind::all};
  s.class_member = false;
  PreparedTask prep = prepare_task(s, 40.0, 512, 0.0, 1);
  const RecoveryTask& task = prep.task;

  // Involution on a case A problem and on the case C problem itself.
  RecoveryTask a;
  a.pattern = ObservationPattern::periodic(3);
  a.targets = {1, 2, 4};
  a.params = PredictorParams(40.0);
  a.n_taps = 512;
  a.observations = sample_on(a.pattern.below(0, 512), [](Index t) { return std::cos(0.4 * static_cast<double>(t)); });
  const bool involution = same_problem(reverse(reverse(a)), a) && same_problem(reverse(reverse(task)), task);
  const RecoveryReport ra = recover(a), rb = recover(reverse(a));
  bool mirrored = rb.pattern_case == PatternCase::B;
  for (Index t : a.targets) mirrored = mirrored && ra.estimate_at(t) == rb.estimate_at(-t);

  const RecoveryReport rc = recover(task);
  RecoveryTask fwd = task, bwd = task;
  fwd.pattern = task.pattern.clipped_above(0);
  fwd.targets = {1, 2, 4, 5};
  fwd.theta = 0;
  fwd.target_class.reset();
  bwd.pattern = task.pattern.clipped_below(0);
  bwd.targets = {-1, -2, -4, -5};
  bwd.theta = 0;
  bwd.target_class.reset();
  const RecoveryReport rf = recover_case_a(fwd), rbw = recover_case_b(bwd);
  bool splice = rc.pattern_case == PatternCase::C;
  for (Index t : fwd.targets) splice = splice && rc.estimate_at(t) == rf.estimate_at(t);
  for (Index t : bwd.targets) splice = splice && rc.estimate_at(t) == rbw.estimate_at(t);

  double asym = 0.0;
  for (Index t : fwd.targets) asym = std::max(asym, std::abs(rc.estimate_at(t) - rc.estimate_at(-t)));
  return {involution && mirrored && splice && asym <= 1e-12,
          std::string("involution=") + (involution ? "yes" : "no") + " case_b_mirror=" + (mirrored ? "yes" : "no") +
              " splice=" + (splice ? "yes" : "no") + " symmetry=" + fmt(asym)};
}

Outcome c9() {
  const char* path = std::getenv("GAPREC_DEFAULT_SWEEP");
#ifdef GAPREC_DEFAULT_SWEEP
  if (path == nullptr) path = GAPREC_DEFAULT_SWEEP;
#endif
  if (path == nullptr) return {false, "no default sweep config"};
  const ExperimentSpec s = load_spec(path);
  const std::vector<SweepRow> rows = run_sweep(s, 4);
  std::map<std::tuple<double, std::size_t, std::uint64_t>, double> base;
  for (const auto& r : rows) {
    if (r.ok() && r.rho == 0.0) base[{r.gamma, r.n_taps, r.seed}] = r.sup_error;
  }
  std::size_t checked = 0, bad = 0;
  for (const auto& r : rows) {
    const auto it = base.find({r.gamma, r.n_taps, r.seed});
    if (!r.ok() || it == base.end()) {
      ++bad;
      continue;
    }
    ++checked;
    if (!(r.sup_error <= it->second + r.max_kernel_norm * r.rho * (1 + 1e-10))) ++bad;
  }
  const auto w = find_witness(rows, 1e-3);
  std::string d = std::to_string(checked) + "/" + std::to_string(rows.size()) + " rows within bound";
  if (w) d += "; witness gamma=" + fmt(w->gamma) + " rho=" + fmt(w->rho) + " sup=" + fmt(w->sup_error);
  return {bad == 0 && w.has_value(), d};
}

Outcome c10() {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> nd;
  RecoveryTask small;
  small.pattern = ObservationPattern::periodic(3);
  small.targets = {1, 2, 3, 4, 5};
  small.params = PredictorParams(20.0);
  small.n_taps = 256;
  const std::vector<Index> big = ObservationPattern::contiguous().below(0, 3 * 256);
  SparseSignal obs_a, obs_b;
  for (Index p : big) {
    const double v = nd(rng);
    obs_a.set(p, v);
    obs_b.set(p, small.pattern.contains(p) ? v : v + 10.0 * nd(rng));
  }
  small.observations = obs_a;
  double diff = 0.0;
  bool same_as_direct = true;
  for (Index t : small.targets) {
    const LinearEstimate e = make_estimator(small, t);
    const LinearEstimate r = prop1_restrict(lift(e, big), [&](Index s) { return small.pattern.contains(s); });
    diff = std::max(diff, std::abs(apply(r, obs_a) - apply(r, obs_b)));
    same_as_direct = same_as_direct && apply(r, obs_a) == apply(e, obs_a);
  }
  return {diff == 0.0 && same_as_direct, "max_diff=" + fmt(diff) + (same_as_direct ? "" : " lift changed estimate")};
}

Outcome c11() {
  std::string d;
  bool ok = true;
  const std::size_t N = 1024;
  for (double g : {5.0, 10.0}) {
    // On-grid sinusoid: N-periodic with lines outside the gap, so it is its own projection.
    const SinusoidComponent c = SinusoidComponent::rational(1.0, 85, static_cast<Index>(N), 0.4);
    RecoveryTask masked;
    masked.pattern = ObservationPattern::contiguous();
    masked.targets = {1, 2, 3, 4, 5};
    masked.params = PredictorParams(g);
    masked.n_taps = N;
    masked.observations = sample_on(masked.pattern.below(0, static_cast<Index>(N)), [&](Index t) { return c.at(t); });
    const double y_norm = masked.observations.norm_l2();
    RecoveryTask exact = masked;
    exact.mode = RecoveryMode::exact;
    exact.observations = SparseSignal();
    SignalSpec sig;
    sig.components = {c};
    exact.exact_signal = exact_signal(sig);
    const RecoveryReport rm = recover(masked), ru = recover(exact);
    double worst = 0.0;
    for (std::size_t i = 0; i < masked.targets.size(); ++i) {
      const double diff = std::abs(rm.estimates[i] - ru.estimates[i]);
      const double bound = (ru.kernels[i].tail_fraction + 1e-8) * y_norm;
      if (!(diff <= bound)) ok = false;
      worst = std::max(worst, diff / y_norm);
    }
    d += "gamma=" + fmt(g) + " max_diff/|y|=" + fmt(worst) + "; ";
  }
  for (double g : {20.0, 40.0, 80.0}) {
    for (int m = 1; m <= 5; ++m) {
      std::string what;
      try {
        const Kernel k = synth_kernel(m, PredictorParams(g), 512);
        const bool finite = std::isfinite(k.l2_norm) && k.taps.allFinite();
        what = finite ? "norm " + fmt(k.l2_norm) : "non-finite";
        if (!finite) ok = false;
      } catch (const GridCapExceeded&) {
        what = "GridCapExceeded";
      } catch (const TransferSaturated&) {
        what = "TransferSaturated";
      }
      if (m == 5) d += "gamma=" + fmt(g) + " m=5: " + what + "; ";
    }
  }
  return {ok, d};
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, c1}, {2, c2}, {3, c3}, {4, c4}, {5, c5}, {6, c6}, {7, c7}, {8, c8}, {9, c9}, {10, c10}, {11, c11}};
  int failed = 0;
  for (const auto& [id, run] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d: %s  %s (%.1fs)\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
