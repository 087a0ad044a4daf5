#include "gaprec/patterns.hpp"

#include "gaprec/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <limits>

namespace gaprec {

namespace {

constexpr Index kValueLimit = Index{1} << 62;

// m sign(k) |k|^d, saturated at +-kValueLimit.
Index signed_power_value(Index m, int d, Index k, bool* overflow) {
  const __int128 mag = k < 0 ? -static_cast<__int128>(k) : static_cast<__int128>(k);
  __int128 v = m;
  for (int i = 0; i < d; ++i) {
    v *= mag;
    if (v > kValueLimit) {
      v = kValueLimit;
      if (overflow) *overflow = true;
      break;
    }
  }
  return static_cast<Index>(k < 0 ? -v : v);
}

const char* kind_name(PatternKind k) {
  switch (k) {
    case PatternKind::contiguous: return "contiguous";
    case PatternKind::periodic: return "periodic";
    case PatternKind::power: return "power";
    case PatternKind::signed_power: return "signed_power";
    case PatternKind::explicit_points: return "explicit";
  }
  return "?";
}

const char* orientation_name(Orientation o) {
  switch (o) {
    case Orientation::forward: return "forward";
    case Orientation::backward: return "backward";
    case Orientation::both: return "both";
  }
  return "?";
}

Orientation orientation_from(const std::string& s) {
  if (s == "forward") return Orientation::forward;
  if (s == "backward") return Orientation::backward;
  if (s == "both") return Orientation::both;
  throw ConfigError("orientation must be forward, backward or both, got " + s);
}

void set_domain(Orientation o, std::optional<Index>& lo, std::optional<Index>& hi) {
  lo.reset();
  hi.reset();
  if (o == Orientation::forward) hi = 0;
  if (o == Orientation::backward) lo = 0;
}

}  // namespace

ObservationPattern ObservationPattern::contiguous(Orientation o) {
  ObservationPattern p;
  p.kind_ = PatternKind::contiguous;
  p.orientation_ = o;
  set_domain(o, p.k_min_, p.k_max_);
  return p;
}

ObservationPattern ObservationPattern::periodic(Index m, Orientation o) {
  if (m < 1) throw ConfigError("periodic pattern needs m >= 1");
  ObservationPattern p = contiguous(o);
  p.kind_ = PatternKind::periodic;
  p.m_ = m;
  return p;
}

ObservationPattern ObservationPattern::power(int d, Orientation o, bool allow_even_power) {
  if (d < 1) throw ConfigError("power pattern needs d >= 1");
  if (d % 2 == 0 && !allow_even_power) {
    throw ConfigError("power pattern with even d needs allow_even_power");
  }
  ObservationPattern p = contiguous(o);
  p.kind_ = PatternKind::power;
  p.d_ = d;
  return p;
}

ObservationPattern ObservationPattern::signed_power(Index m, int d, Orientation o) {
  if (m < 1 || d < 1) throw ConfigError("signed_power pattern needs m >= 1 and d >= 1");
  ObservationPattern p = contiguous(o);
  p.kind_ = PatternKind::signed_power;
  p.m_ = m;
  p.d_ = d;
  return p;
}

ObservationPattern ObservationPattern::explicit_points(std::vector<Index> points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  ObservationPattern p;
  p.kind_ = PatternKind::explicit_points;
  p.orientation_ = Orientation::both;
  p.k_min_ = 0;
  p.k_max_ = static_cast<Index>(points.size()) - 1;
  p.points_ = std::move(points);
  return p;
}

Index ObservationPattern::raw(Index k) const {
  switch (kind_) {
    case PatternKind::contiguous: return k;
    case PatternKind::periodic: return signed_power_value(m_, 1, k, nullptr);
    case PatternKind::power: return signed_power_value(1, d_, k, nullptr);
    case PatternKind::signed_power: return signed_power_value(m_, d_, k, nullptr);
    case PatternKind::explicit_points: return points_[static_cast<std::size_t>(k)];
  }
  return k;
}

Index ObservationPattern::value(Index k) const {
  if ((k_min_ && k < *k_min_) || (k_max_ && k > *k_max_)) {
    throw RangeNotMaterialized("enumeration index " + std::to_string(k) + " outside the pattern domain");
  }
  if (kind_ == PatternKind::explicit_points) return points_[static_cast<std::size_t>(k)];
  bool overflow = false;
  const Index v = kind_ == PatternKind::contiguous ? k
                                                   : signed_power_value(kind_ == PatternKind::power ? 1 : m_,
                                                                        kind_ == PatternKind::periodic ? 1 : d_, k,
                                                                        &overflow);
  if (overflow) throw RangeNotMaterialized("pattern value at k = " + std::to_string(k) + " overflows");
  return v;
}

std::optional<Index> ObservationPattern::index_at_or_below(Index t) const {
  // Formula kinds satisfy |value(k)| >= |k|, which bounds the search.
  Index a = k_min_ ? *k_min_ : std::min<Index>(t, 0) - 1;
  Index b = k_max_ ? *k_max_ : std::max<Index>(t, 0) + 1;
  if (!k_min_) a = std::min(a, b);
  if (!k_max_) b = std::max(a, b);
  if (a > b) return std::nullopt;
  if (raw(a) > t) return std::nullopt;
  if (raw(b) <= t) return b;
  while (b - a > 1) {  // raw(a) <= t < raw(b)
    const Index mid = a + (b - a) / 2;
    if (raw(mid) <= t) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return a;
}

std::optional<Index> ObservationPattern::index_at_or_above(Index t) const {
  if (k_min_ && k_max_ && *k_min_ > *k_max_) return std::nullopt;
  const auto r = index_at_or_below(t - 1);
  if (!r) return k_min_;
  const Index c = *r + 1;
  if (k_max_ && c > *k_max_) return std::nullopt;
  return c;
}

bool ObservationPattern::contains(Index t) const {
  const auto k = index_at_or_below(t);
  return k && raw(*k) == t;
}

std::vector<Index> ObservationPattern::below(Index theta, Index depth) const {
  if (depth < 1) throw ConfigError("depth must be >= 1");
  const auto top = index_at_or_below(theta);
  if (!top || (k_min_ && *top - depth + 1 < *k_min_)) {
    throw InsufficientObservations("pattern has fewer than " + std::to_string(depth) + " points <= " +
                                   std::to_string(theta));
  }
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(depth));
  for (Index k = *top - depth + 1; k <= *top; ++k) out.push_back(value(k));
  return out;
}

std::vector<Index> ObservationPattern::above(Index theta, Index depth) const {
  if (depth < 1) throw ConfigError("depth must be >= 1");
  const auto bottom = index_at_or_above(theta);
  if (!bottom || (k_max_ && *bottom + depth - 1 > *k_max_)) {
    throw InsufficientObservations("pattern has fewer than " + std::to_string(depth) + " points >= " +
                                   std::to_string(theta));
  }
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(depth));
  for (Index k = *bottom; k < *bottom + depth; ++k) out.push_back(value(k));
  return out;
}

ObservationPattern ObservationPattern::clipped_above(Index b) const {
  ObservationPattern p = *this;
  const auto k = index_at_or_below(b);
  if (!k) {
    p.k_max_ = p.k_min_.value_or(0) - 1;
    if (!p.k_min_) p.k_min_ = 0;
  } else {
    p.k_max_ = p.k_max_ ? std::min(*p.k_max_, *k) : *k;
  }
  return p;
}

ObservationPattern ObservationPattern::clipped_below(Index a) const {
  ObservationPattern p = *this;
  const auto k = index_at_or_above(a);
  if (!k) {
    p.k_min_ = p.k_max_.value_or(0) + 1;
    if (!p.k_max_) p.k_max_ = 0;
  } else {
    p.k_min_ = p.k_min_ ? std::max(*p.k_min_, *k) : *k;
  }
  return p;
}

ObservationPattern ObservationPattern::mirrored() const {
  ObservationPattern p = *this;
  if (orientation_ == Orientation::forward) p.orientation_ = Orientation::backward;
  if (orientation_ == Orientation::backward) p.orientation_ = Orientation::forward;
  if (kind_ == PatternKind::explicit_points) {
    const Index n = static_cast<Index>(points_.size());
    p.points_.clear();
    for (auto it = points_.rbegin(); it != points_.rend(); ++it) p.points_.push_back(-*it);
    p.k_min_ = n - 1 - *k_max_;
    p.k_max_ = n - 1 - *k_min_;
    return p;
  }
  // Every formula kind is odd in k, so the mirror only flips the domain.
  p.k_min_ = k_max_ ? std::optional<Index>(-*k_max_) : std::nullopt;
  p.k_max_ = k_min_ ? std::optional<Index>(-*k_min_) : std::nullopt;
  return p;
}

bool TargetSet::contains(Index t) const {
  switch (kind) {
    case TargetKind::positive: return t >= 1;
    case TargetKind::nonpositive: return t <= 0;
    case TargetKind::negative: return t <= -1;
    case TargetKind::below: return t < bound;
    case TargetKind::above: return t > bound;
    case TargetKind::all: return true;
    case TargetKind::explicit_list: return std::find(points.begin(), points.end(), t) != points.end();
  }
  return false;
}

bool TargetSet::infinite_below() const {
  return kind == TargetKind::nonpositive || kind == TargetKind::negative || kind == TargetKind::below ||
         kind == TargetKind::all;
}

bool TargetSet::infinite_above() const {
  return kind == TargetKind::positive || kind == TargetKind::above || kind == TargetKind::all;
}

TargetSet TargetSet::mirrored() const {
  switch (kind) {
    case TargetKind::positive: return {TargetKind::negative, 0, {}};
    case TargetKind::negative: return {TargetKind::positive, 0, {}};
    case TargetKind::nonpositive: return {TargetKind::above, -1, {}};
    case TargetKind::below: return {TargetKind::above, -bound, {}};
    case TargetKind::above: return {TargetKind::below, -bound, {}};
    case TargetKind::all: return *this;
    case TargetKind::explicit_list: {
      TargetSet t = *this;
      for (auto& v : t.points) v = -v;
      return t;
    }
  }
  return *this;
}

std::string to_string(PatternCase c) {
  switch (c) {
    case PatternCase::A: return "A";
    case PatternCase::B: return "B";
    case PatternCase::C: return "C";
    case PatternCase::Unsupported: return "unsupported";
  }
  return "?";
}

PatternCase pattern_case(const ObservationPattern& m, const TargetSet& t) {
  if (m.infinite_below() && !t.infinite_below()) return PatternCase::A;
  if (m.infinite_above() && !t.infinite_above()) return PatternCase::B;
  if (m.infinite_below() && m.infinite_above()) return PatternCase::C;
  return PatternCase::Unsupported;
}

TauMap::TauMap(Index theta, std::vector<Index> table) : theta_(theta), table_(std::move(table)) {
  if (table_.empty()) throw ConfigError("tau table is empty");
  for (std::size_t i = 1; i < table_.size(); ++i) {
    if (table_[i] <= table_[i - 1]) throw ConfigError("tau table must be strictly increasing");
  }
  if (table_.back() > theta_) throw ConfigError("tau(theta) must not exceed theta");
}

Index TauMap::operator()(Index k) const {
  if (k > theta_) return k;
  if (k < k_lo()) {
    throw RangeNotMaterialized("tau(" + std::to_string(k) + ") below materialized depth (k_lo = " +
                               std::to_string(k_lo()) + ")");
  }
  return table_[static_cast<std::size_t>(k - k_lo())];
}

TauMap build_tau_at(const ObservationPattern& m, Index theta, Index depth) {
  return TauMap(theta, m.below(theta, depth));
}

TauMap build_tau(const ObservationPattern& m, Index t_min, Index depth) {
  return build_tau_at(m, t_min - 1, depth);
}

Signal compress(const Signal& x, const TauMap& tau, Index k_lo, Index k_hi) {
  if (k_hi < k_lo) throw ConfigError("compress: empty range");
  Signal y = Signal::zeros(k_lo, static_cast<std::size_t>(k_hi - k_lo + 1));
  for (Index k = k_lo; k <= k_hi; ++k) y[k] = x.at(tau(k));
  return y;
}

Signal compress(const SparseSignal& x, const TauMap& tau, Index k_lo, Index k_hi) {
  if (k_hi < k_lo) throw ConfigError("compress: empty range");
  Signal y = Signal::zeros(k_lo, static_cast<std::size_t>(k_hi - k_lo + 1));
  for (Index k = k_lo; k <= k_hi; ++k) y[k] = x.at(tau(k));
  return y;
}

SparseSignal scatter(const Signal& y, const TauMap& tau) {
  SparseSignal out;
  for (Index k = y.start(); k < y.end(); ++k) out.set(tau(k), y.at(k));
  return out;
}

Signal build_class_member(const Signal& x_tilde, const TauMap& tau, const SpectralGap& gap, std::size_t grid_size,
                          Index extend_above) {
  const Index g = static_cast<Index>(grid_size);
  if (tau.depth() > g) throw ConfigError("build_class_member: depth exceeds the grid size");
  if (extend_above < 0) throw ConfigError("build_class_member: extend_above must be >= 0");
  const Index k_lo = tau.k_lo();
  const Index k_hi = std::max(k_lo + g - 1, tau.theta() + extend_above);

  const Signal y = compress(x_tilde, tau, k_lo, k_lo + g - 1);
  Signal y_hat = project_gap(y, gap, grid_size);
  // Real input and a conjugate-symmetric mask give a real projection; drop rounding residue.
  const bool symmetric_gap = gap.center() == 0.0 || gap.center() == kPi;
  if (x_tilde.is_real() && symmetric_gap) y_hat.values() = y_hat.values().real().cast<Complex>();

  Index lo = tau(k_lo);
  Index hi = k_hi + 1;
  if (!x_tilde.empty()) {
    lo = std::min(lo, x_tilde.start());
    hi = std::max(hi, x_tilde.end());
  }
  Signal out = x_tilde.window(lo, hi);
  for (Index k = k_lo; k <= k_hi; ++k) out[tau(k)] = y_hat.at(k_lo + (k - k_lo) % g);
  return out;
}

ObservationPattern pattern_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) throw ConfigError("pattern needs a kind");
  try {
    const auto kind = j.at("kind").get<std::string>();
    const bool has_orientation = j.contains("orientation");
    const Orientation o = has_orientation ? orientation_from(j.at("orientation").get<std::string>())
                                          : Orientation::forward;
    if (kind == "contiguous" || kind == "contiguous_negative") return ObservationPattern::contiguous(o);
    if (kind == "periodic") return ObservationPattern::periodic(j.at("m").get<Index>(), o);
    if (kind == "power") {
      return ObservationPattern::power(j.at("d").get<int>(), o, j.value("allow_even_power", false));
    }
    if (kind == "signed_power") {
      return ObservationPattern::signed_power(j.value("m", Index{1}), j.at("d").get<int>(),
                                              has_orientation ? o : Orientation::both);
    }
    if (kind == "explicit") return ObservationPattern::explicit_points(j.at("points").get<std::vector<Index>>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("pattern: ") + e.what());
  }
  throw ConfigError("unknown pattern kind " + j.at("kind").dump());
}

nlohmann::json pattern_to_json(const ObservationPattern& p) {
  nlohmann::json j{{"kind", kind_name(p.kind())}};
  switch (p.kind()) {
    case PatternKind::periodic: j["m"] = p.step(); break;
    case PatternKind::power: j["d"] = p.degree(); if (p.degree() % 2 == 0) j["allow_even_power"] = true; break;
    case PatternKind::signed_power: j["m"] = p.step(); j["d"] = p.degree(); break;
    case PatternKind::explicit_points: j["points"] = p.points(); break;
    case PatternKind::contiguous: break;
  }
  if (p.kind() != PatternKind::explicit_points) j["orientation"] = orientation_name(p.orientation());
  return j;
}

TargetSet target_set_from_json(const nlohmann::json& j) {
  if (j.is_array()) return TargetSet::explicit_targets(j.get<std::vector<Index>>());
  if (!j.is_object() || !j.contains("kind")) throw ConfigError("target set needs a kind");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "positive") return {TargetKind::positive, 0, {}};
  if (kind == "nonpositive") return {TargetKind::nonpositive, 0, {}};
  if (kind == "negative") return {TargetKind::negative, 0, {}};
  if (kind == "all") return {TargetKind::all, 0, {}};
  if (kind == "below") return {TargetKind::below, j.at("s").get<Index>(), {}};
  if (kind == "above") return {TargetKind::above, j.at("s").get<Index>(), {}};
  if (kind == "explicit") return TargetSet::explicit_targets(j.at("points").get<std::vector<Index>>());
  throw ConfigError("unknown target set kind " + kind);
}

nlohmann::json target_set_to_json(const TargetSet& t) {
  switch (t.kind) {
    case TargetKind::positive: return {{"kind", "positive"}};
    case TargetKind::nonpositive: return {{"kind", "nonpositive"}};
    case TargetKind::negative: return {{"kind", "negative"}};
    case TargetKind::all: return {{"kind", "all"}};
    case TargetKind::below: return {{"kind", "below"}, {"s", t.bound}};
    case TargetKind::above: return {{"kind", "above"}, {"s", t.bound}};
    case TargetKind::explicit_list: return {{"kind", "explicit"}, {"points", t.points}};
  }
  return {};
}

}  // namespace gaprec
