#pragma once

#include "gaprec/gap.hpp"
#include "gaprec/spectral.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>
#include <vector>

namespace gaprec {

enum class PatternKind { contiguous, periodic, power, signed_power, explicit_points };

/// Which half of the enumeration index k is used.
/// forward: k <= 0 (points in Z^- = {t <= 0}); backward: k >= 0 (the mirror image); both: all k.
enum class Orientation { forward, backward, both };

/// Observation set M as a strictly increasing enumeration k -> value(k).
/// contiguous: k; periodic(m): m k; power(d): sign(k) |k|^d; signed_power(m, d): m sign(k) |k|^d;
/// explicit: sorted points, k = 0..n-1.
class ObservationPattern {
 public:
  static ObservationPattern contiguous(Orientation o = Orientation::forward);
  static ObservationPattern periodic(Index m, Orientation o = Orientation::forward);
  /// Even d requires allow_even_power; the sign is kept so points stay in the chosen half.
  static ObservationPattern power(int d, Orientation o = Orientation::forward, bool allow_even_power = false);
  static ObservationPattern signed_power(Index m, int d, Orientation o = Orientation::both);
  static ObservationPattern explicit_points(std::vector<Index> points);

  PatternKind kind() const { return kind_; }
  Orientation orientation() const { return orientation_; }
  Index step() const { return m_; }
  int degree() const { return d_; }
  const std::vector<Index>& points() const { return points_; }

  /// Enumeration domain [k_min, k_max]; nullopt means unbounded.
  std::optional<Index> k_min() const { return k_min_; }
  std::optional<Index> k_max() const { return k_max_; }

  /// value(k); throws RangeNotMaterialized for k outside the domain or on int64 overflow.
  Index value(Index k) const;
  bool contains(Index t) const;

  /// Largest k with value(k) <= t, nullopt if none.
  std::optional<Index> index_at_or_below(Index t) const;
  /// Smallest k with value(k) >= t, nullopt if none.
  std::optional<Index> index_at_or_above(Index t) const;

  /// The `depth` largest points <= theta, increasing. Throws InsufficientObservations.
  std::vector<Index> below(Index theta, Index depth) const;
  /// The `depth` smallest points >= theta, increasing. Throws InsufficientObservations.
  std::vector<Index> above(Index theta, Index depth) const;

  /// |M cap Z^-| = inf and |M cap Z^+| = inf respectively.
  bool infinite_below() const { return !k_min_.has_value(); }
  bool infinite_above() const { return !k_max_.has_value(); }

  /// M cap (-inf, b] and M cap [a, inf).
  ObservationPattern clipped_above(Index b) const;
  ObservationPattern clipped_below(Index a) const;

  /// t -> -t.
  ObservationPattern mirrored() const;

  friend bool operator==(const ObservationPattern&, const ObservationPattern&) = default;

 private:
  ObservationPattern() = default;
  Index raw(Index k) const;

  PatternKind kind_ = PatternKind::contiguous;
  Orientation orientation_ = Orientation::forward;
  Index m_ = 1;
  int d_ = 1;
  std::vector<Index> points_;
  std::optional<Index> k_min_;
  std::optional<Index> k_max_;
};

enum class TargetKind { positive, nonpositive, negative, below, above, all, explicit_list };

/// Target set T, used for case classification. Only finitely many targets are ever evaluated.
struct TargetSet {
  TargetKind kind = TargetKind::positive;
  Index bound = 0;  // s for below (t < s) and above (t > s)
  std::vector<Index> points;

  static TargetSet explicit_targets(std::vector<Index> t) { return {TargetKind::explicit_list, 0, std::move(t)}; }

  bool contains(Index t) const;
  bool infinite_below() const;
  bool infinite_above() const;

  /// t -> -t.
  TargetSet mirrored() const;

  friend bool operator==(const TargetSet&, const TargetSet&) = default;
};

enum class PatternCase { A, B, C, Unsupported };

std::string to_string(PatternCase c);

/// First of A, B, C satisfied, else Unsupported.
/// A: |M cap Z^-| = inf, |T cap Z^-| < inf. B: mirrored. C: M infinite on both sides.
PatternCase pattern_case(const ObservationPattern& m, const TargetSet& t);

/// tau(k) for k in [k_lo, theta], tau(k) = k above theta.
class TauMap {
 public:
  TauMap(Index theta, std::vector<Index> table);

  Index theta() const { return theta_; }
  Index k_lo() const { return theta_ - static_cast<Index>(table_.size()) + 1; }
  Index depth() const { return static_cast<Index>(table_.size()); }
  /// Throws RangeNotMaterialized below k_lo.
  Index operator()(Index k) const;
  const std::vector<Index>& table() const { return table_; }

 private:
  Index theta_;
  std::vector<Index> table_;  // table_[i] = tau(k_lo + i)
};

/// theta = t_min - 1.
TauMap build_tau(const ObservationPattern& m, Index t_min, Index depth);
TauMap build_tau_at(const ObservationPattern& m, Index theta, Index depth);

/// y(k) = x(tau(k)) for k in [k_lo, k_hi], anchored at k_lo.
Signal compress(const Signal& x, const TauMap& tau, Index k_lo, Index k_hi);
Signal compress(const SparseSignal& x, const TauMap& tau, Index k_lo, Index k_hi);

/// Places y(k) at tau(k) for every k in y's support.
SparseSignal scatter(const Signal& y, const TauMap& tau);

/// Replaces x_tilde on M and above theta by the gap projection of its compressed image.
/// The compressed window is [k_lo, k_lo + G) with k_lo = theta - depth + 1 (depth <= G);
/// Positions k up to theta + extend_above are filled too, from the G-periodic extension of the
/// projection, when that reaches past the window.
Signal build_class_member(const Signal& x_tilde, const TauMap& tau, const SpectralGap& gap, std::size_t grid_size,
                          Index extend_above = 0);

ObservationPattern pattern_from_json(const nlohmann::json& j);
nlohmann::json pattern_to_json(const ObservationPattern& p);
TargetSet target_set_from_json(const nlohmann::json& j);
nlohmann::json target_set_to_json(const TargetSet& t);

}  // namespace gaprec
