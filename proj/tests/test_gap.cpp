#include "gaprec/errors.hpp"
#include "gaprec/gap.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

using namespace gaprec;

TEST(SpectralGap, Validation) {
  EXPECT_THROW(SpectralGap(kPi, 0.0), ConfigError);
  EXPECT_THROW(SpectralGap(kPi, -1.0), ConfigError);
  EXPECT_THROW(SpectralGap(kPi, 2.5), ConfigError);
  EXPECT_NEAR(SpectralGap::at_pi(0.5).half_width(), 2 * std::asin(0.25), 1e-15);
  EXPECT_TRUE(SpectralGap::at_pi(2.0).full_circle());
}

TEST(InGap, Examples) {
  EXPECT_TRUE(in_gap(kPi, SpectralGap::at_pi(1e-9)));
  EXPECT_TRUE(in_gap(0.3, SpectralGap(0.3, 1e-9)));
  for (double w : {-3.0, -1.0, 0.0, 1.0, 3.0}) EXPECT_TRUE(in_gap(w, SpectralGap::at_pi(2.0)));
  EXPECT_FALSE(in_gap(0.0, SpectralGap::at_pi(0.5)));
}

TEST(InGap, AgreesWithChordTest) {
  for (double delta : {0.1, 0.5, 1.0, 1.9}) {
    for (double c : {0.0, kPi, 1.0}) {
      for (int i = -2000; i <= 2000; ++i) {
        const double w = kPi * i / 2000.0;
        const bool want = oracle::chord_in_arc(w, c, delta);
        // Skip points that sit within rounding of the boundary.
        if (std::abs(std::abs(std::polar(1.0, w) - std::polar(1.0, c)) - delta) < 1e-12) continue;
        EXPECT_EQ(in_gap(w, SpectralGap(c, delta)), want) << w << " " << c << " " << delta;
      }
    }
  }
}

TEST(NodesInGap, Enumeration) {
  for (std::size_t G : {8u, 64u, 1024u}) {
    for (double delta : {0.25, 0.5, 1.0}) {
      std::size_t count = 0;
      for (std::size_t j = 0; j < G; ++j) count += oracle::chord_in_arc(oracle::node(j, G), oracle::pi, delta);
      EXPECT_EQ(nodes_in_gap(SpectralGap::at_pi(delta), G), count);
    }
  }
}

TEST(ProjectGap, ZeroAndFullCircle) {
  EXPECT_EQ(norm_l2(project_gap(Signal::zeros(0, 16), SpectralGap::at_pi(0.5), 16)), 0.0);
  std::mt19937_64 rng(3);
  const Signal x = oracle::random_signal(rng, -5, 20);
  EXPECT_LT(norm_linf(project_gap(x, SpectralGap::at_pi(2.0), 32)), 1e-15);
}

TEST(ProjectGap, CosineOutsideArcIsKept) {
  std::vector<double> v(64);
  for (int t = 0; t < 64; ++t) v[t] = std::cos(oracle::pi * t / 2);
  const Signal x = Signal::from_real(0, v);
  // Two nonzero bins at +-pi/2, both outside the gap.
  const auto ref = oracle::direct_dft(x, 64);
  for (std::size_t j = 0; j < 64; ++j) {
    if (std::abs(ref[j]) > 1e-9) {
      EXPECT_TRUE(j == 16 || j == 48);
      EXPECT_FALSE(oracle::chord_in_arc(oracle::node(j, 64), oracle::pi, 0.5));
    }
  }
  const Signal p = project_gap(x, SpectralGap::at_pi(0.5), 64);
  EXPECT_LT((p.values() - x.values()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ProjectGap, SupportIsGridPeriod) {
  const Signal p = project_gap(Signal::impulse(3), SpectralGap::at_pi(0.5), 16);
  EXPECT_EQ(p.start(), 3);
  EXPECT_EQ(p.size(), 16u);
  EXPECT_THROW(project_gap(Signal::zeros(0, 17), SpectralGap::at_pi(0.5), 16), SignalTooLongForGrid);
}

TEST(ProjectGap, SpectrumZeroInsideUnchangedOutside) {
  std::mt19937_64 rng(11);
  const SpectralGap gap = SpectralGap::at_pi(0.5);
  const Signal x = oracle::random_signal(rng, -40, 100);
  const Signal p = project_gap(x, gap, 128);
  const auto sx = oracle::direct_dft(x, 128), sp = oracle::direct_dft(p, 128);
  for (std::size_t j = 0; j < 128; ++j) {
    if (oracle::chord_in_arc(oracle::node(j, 128), oracle::pi, 0.5)) {
      EXPECT_LT(std::abs(sp[j]), 1e-12);
    } else {
      EXPECT_LT(std::abs(sp[j] - sx[j]), 1e-10);
    }
  }
}

TEST(ResidualEnergy, Examples) {
  const SpectralGap gap = SpectralGap::at_pi(0.5);
  std::mt19937_64 rng(5);
  const Signal x = oracle::random_signal(rng, 0, 64);
  EXPECT_LE(gap_residual_energy(project_gap(x, gap, 64), gap, 64), 1e-20 * x.values().squaredNorm());
  EXPECT_NEAR(gap_residual_energy(Signal::impulse(0), SpectralGap::at_pi(2.0), 32), 1.0, 1e-15);
  std::size_t count = 0;
  for (std::size_t j = 0; j < 8; ++j) count += oracle::chord_in_arc(oracle::node(j, 8), oracle::pi, 0.5);
  EXPECT_EQ(count, 1u);
  EXPECT_NEAR(gap_residual_energy(Signal::impulse(0), gap, 8), count / 8.0, 1e-15);
}

TEST(Densify, Examples) {
  const auto z = densify(Signal::zeros(0, 32), 1e-3, kPi, 64);
  EXPECT_EQ(z.delta_used, 2.0);
  EXPECT_EQ(norm_l2(z.signal), 0.0);

  std::vector<double> v(64);
  for (int t = 0; t < 64; ++t) v[t] = std::cos(oracle::pi * t / 8);
  const Signal x = Signal::from_real(0, v);
  const auto d = densify(x, 10.0, kPi, 64);
  EXPECT_EQ(d.delta_used, 2.0);
  const auto d2 = densify(x, 1e-9, kPi, 64);
  EXPECT_LE(norm_l2(add_scaled(d2.signal, x, -1.0)), 1e-9);
  EXPECT_LE(norm_l2(d2.signal), norm_l2(x) + 1e-12);
}

TEST(Densify, WhiteNoiseAgainstPeriodogram) {
  // The node at pi sits in every arc, so some seeds are infeasible at eps = 0.01; the periodogram decides which.
  int feasible = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    std::mt19937_64 rng(seed);
    Signal x = oracle::random_signal(rng, 0, 256, false);
    x.values() /= x.values().norm();
    const auto s = oracle::direct_dft(x, 1024);
    auto energy_in_arc = [&](double delta) {
      double e = 0.0;
      for (std::size_t j = 0; j < 1024; ++j) {
        if (oracle::chord_in_arc(oracle::node(j, 1024), oracle::pi, delta)) e += std::norm(s[j]) / 1024.0;
      }
      return e;
    };
    if (energy_in_arc(std::ldexp(1.0, -20)) > 1e-4 * (1 + 1e-9)) {
      EXPECT_THROW(densify(x, 0.01, kPi, 1024), NoFeasibleDelta) << seed;
      continue;
    }
    ++feasible;
    const auto d = densify(x, 0.01, kPi, 1024);
    EXPECT_LE(energy_in_arc(d.delta_used), 1e-4 * (1 + 1e-9)) << seed;
    if (d.delta_used < 2.0) EXPECT_GT(energy_in_arc(2 * d.delta_used), 1e-4) << seed;
  }
  EXPECT_GT(feasible, 0);
}

TEST(Densify, NoFeasibleDelta) {
  std::vector<double> v(64);
  for (int t = 0; t < 64; ++t) v[t] = (t % 2 == 0) ? 1.0 : -1.0;
  EXPECT_THROW(densify(Signal::from_real(0, v), 1e-3, kPi, 64), NoFeasibleDelta);
}

TEST(Densify, Schedule) {
  const auto s = densify_schedule();
  ASSERT_EQ(s.size(), 22u);
  EXPECT_EQ(s.front(), 2.0);
  EXPECT_EQ(s.back(), std::ldexp(1.0, -20));
}

TEST(Modulate, Examples) {
  EXPECT_EQ(modulate_half_band(Signal::impulse(0)), Signal::impulse(0));
  const Signal one = Signal::from_real(0, std::vector<double>(8, 1.0));
  const Signal alt = modulate_half_band(one);
  for (Index t = 0; t < 8; ++t) EXPECT_EQ(alt.at(t), Complex(t % 2 == 0 ? 1.0 : -1.0));
  const Spectrum s = z_transform_on_grid(alt, 8);
  EXPECT_NEAR(std::abs(s[4]), 8.0, 1e-12);
  EXPECT_NEAR(std::abs(s[0]), 0.0, 1e-12);
  std::mt19937_64 rng(9);
  const Signal x = oracle::random_signal(rng, -7, 30);
  const Signal back = modulate_half_band(modulate_half_band(x));
  EXPECT_EQ(back.start(), x.start());
  EXPECT_EQ(back.values(), x.values());
}

TEST(Properties, IdempotenceContractionMonotoneConjugacy) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t G = 64;
    const Signal x = oracle::random_signal(rng, static_cast<Index>(rng() % 50) - 25, 1 + rng() % G);
    const SpectralGap gap = SpectralGap::at_pi(0.5);
    const Signal p = project_gap(x, gap, G);
    const Signal pp = project_gap(p, gap, G);
    EXPECT_LT((pp.values() - p.values()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE(norm_l2(p), norm_l2(x) + 1e-12);

    double prev = -1.0;
    for (double delta : {0.25, 0.5, 1.0, 2.0}) {
      const double dist = norm_l2(add_scaled(project_gap(x, SpectralGap::at_pi(delta), G), x, -1.0));
      EXPECT_GE(dist + 1e-12, prev);
      prev = dist;
    }

    const Signal at0 = project_gap(x, SpectralGap::at_zero(0.5), G);
    const Signal via = modulate_half_band(project_gap(modulate_half_band(x), gap, G));
    EXPECT_LT((at0.values() - via.values()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(GapJson, Forms) {
  EXPECT_EQ(gap_from_json(nlohmann::json{{"center", "pi"}, {"delta", 0.5}}), SpectralGap::at_pi(0.5));
  EXPECT_EQ(gap_from_json(nlohmann::json{{"center", "zero"}, {"delta", 1.0}}), SpectralGap::at_zero(1.0));
  EXPECT_EQ(gap_from_json(nlohmann::json{{"center", 0.25}, {"delta", 1.0}}).center(), 0.25);
  EXPECT_THROW(gap_from_json(nlohmann::json{{"center", "east"}, {"delta", 1.0}}), ConfigError);
  EXPECT_THROW(gap_from_json(nlohmann::json{{"center", "pi"}}), ConfigError);
  const SpectralGap g(1.25, 0.75);
  EXPECT_EQ(gap_from_json(gap_to_json(g)), g);
  EXPECT_EQ(gap_to_json(SpectralGap::at_pi(0.5))["center"], "pi");
}
