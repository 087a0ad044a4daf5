#pragma once

#include "gaprec/spectral.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstddef>

namespace gaprec {

/// Closed arc {omega : |e^{i omega} - e^{i center}| <= delta} on the unit circle.
class SpectralGap {
 public:
  /// center is reduced into (-pi, pi]; delta must lie in (0, 2].
  SpectralGap(double center, double delta);

  static SpectralGap at_pi(double delta) { return SpectralGap(kPi, delta); }
  static SpectralGap at_zero(double delta) { return SpectralGap(0.0, delta); }

  double center() const { return center_; }
  double delta() const { return delta_; }
  /// Angular half-width 2 asin(delta / 2).
  double half_width() const;
  bool full_circle() const { return delta_ >= 2.0; }

  friend bool operator==(const SpectralGap&, const SpectralGap&) = default;

 private:
  double center_;
  double delta_;
};

bool in_gap(double omega, const SpectralGap& gap);

/// Number of grid nodes of a size-G grid inside the arc.
std::size_t nodes_in_gap(const SpectralGap& gap, std::size_t grid_size);

/// Zeroes the grid spectrum inside the gap. The result lives on [x.start(), x.start() + G).
Signal project_gap(const Signal& x, const SpectralGap& gap, std::size_t grid_size);

/// (1/G) sum over in-gap nodes of |S_j|^2.
double gap_residual_energy(const Signal& x, const SpectralGap& gap, std::size_t grid_size);

struct Densified {
  Signal signal;
  double delta_used;
};

/// Largest delta in 2, 1, 1/2, ..., 2^-20 with ||project_gap(x) - x|| <= eps.
/// Throws NoFeasibleDelta when none qualifies.
Densified densify(const Signal& x, double eps, double gap_center, std::size_t grid_size);

/// The halving schedule used by densify.
std::vector<double> densify_schedule();

/// y(t) = (-1)^t x(t).
Signal modulate_half_band(const Signal& x);

// Config form: {"center": "pi" | "zero" | <radians>, "delta": <float>}
SpectralGap gap_from_json(const nlohmann::json& j);
nlohmann::json gap_to_json(const SpectralGap& gap);

}  // namespace gaprec
