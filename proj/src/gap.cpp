#include "gaprec/gap.hpp"

#include "gaprec/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

namespace gaprec {

namespace {

double reduce_angle(double w) {
  double r = std::remainder(w, 2.0 * kPi);  // [-pi, pi]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

}  // namespace

SpectralGap::SpectralGap(double center, double delta) : center_(reduce_angle(center)), delta_(delta) {
  if (!std::isfinite(center)) throw ConfigError("gap center must be finite");
  if (!(delta > 0.0) || delta > 2.0) throw ConfigError("gap delta must lie in (0, 2]");
}

double SpectralGap::half_width() const {
  if (full_circle()) return kPi;
  return 2.0 * std::asin(delta_ / 2.0);
}

bool in_gap(double omega, const SpectralGap& gap) {
  // |e^{ia} - e^{ib}| = 2 |sin((a - b) / 2)|
  return 2.0 * std::abs(std::sin((omega - gap.center()) / 2.0)) <= gap.delta();
}

std::size_t nodes_in_gap(const SpectralGap& gap, std::size_t grid_size) {
  std::size_t n = 0;
  for (std::size_t j = 0; j < grid_size; ++j) n += in_gap(grid_omega(j, grid_size), gap) ? 1 : 0;
  return n;
}

Signal project_gap(const Signal& x, const SpectralGap& gap, std::size_t grid_size) {
  Spectrum s = z_transform_on_grid(x, grid_size);
  for (std::size_t j = 0; j < grid_size; ++j) {
    if (in_gap(s.omega(j), gap)) s[j] = Complex(0.0, 0.0);
  }
  return inverse_z_on_grid(s, x.start(), grid_size);
}

double gap_residual_energy(const Signal& x, const SpectralGap& gap, std::size_t grid_size) {
  const Spectrum s = z_transform_on_grid(x, grid_size);
  double acc = 0.0;
  for (std::size_t j = 0; j < grid_size; ++j) {
    if (in_gap(s.omega(j), gap)) acc += std::norm(s[j]);
  }
  return acc / static_cast<double>(grid_size);
}

std::vector<double> densify_schedule() {
  std::vector<double> out;
  for (int k = 0; k <= 21; ++k) out.push_back(std::ldexp(2.0, -k));  // 2 .. 2^-20
  return out;
}

Densified densify(const Signal& x, double eps, double gap_center, std::size_t grid_size) {
  if (!(eps > 0.0)) throw ConfigError("densify: eps must be positive");
  for (double delta : densify_schedule()) {
    Signal projected = project_gap(x, SpectralGap(gap_center, delta), grid_size);
    if (norm_l2(add_scaled(projected, x, -1.0)) <= eps) return {std::move(projected), delta};
  }
  throw NoFeasibleDelta("densify: no delta down to 2^-20 reaches eps; energy is concentrated at the gap center");
}

Signal modulate_half_band(const Signal& x) {
  Signal out = x;
  for (Index t = x.start(); t < x.end(); ++t) {
    if (t % 2 != 0) out[t] = -out[t];
  }
  return out;
}

SpectralGap gap_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("delta")) throw ConfigError("gap needs {center, delta}");
  double center = kPi;
  if (j.contains("center")) {
    const auto& c = j.at("center");
    if (c.is_string()) {
      const auto s = c.get<std::string>();
      if (s == "pi") {
        center = kPi;
      } else if (s == "zero") {
        center = 0.0;
      } else {
        throw ConfigError("gap center must be \"pi\", \"zero\" or a number");
      }
    } else if (c.is_number()) {
      center = c.get<double>();
    } else {
      throw ConfigError("gap center must be \"pi\", \"zero\" or a number");
    }
  }
  if (!j.at("delta").is_number()) throw ConfigError("gap delta must be a number");
  return SpectralGap(center, j.at("delta").get<double>());
}

nlohmann::json gap_to_json(const SpectralGap& gap) {
  nlohmann::json j;
  if (gap.center() == kPi) {
    j["center"] = "pi";
  } else if (gap.center() == 0.0) {
    j["center"] = "zero";
  } else {
    j["center"] = gap.center();
  }
  j["delta"] = gap.delta();
  return j;
}

}  // namespace gaprec
