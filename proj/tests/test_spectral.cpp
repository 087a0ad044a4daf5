#include "gaprec/errors.hpp"
#include "gaprec/spectral.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace gaprec;

namespace {

void expect_near(Complex a, Complex b, double tol) {
  EXPECT_NEAR(a.real(), b.real(), tol);
  EXPECT_NEAR(a.imag(), b.imag(), tol);
}

}  // namespace

TEST(ZTransform, ImpulseAtZero) {
  const Spectrum s = z_transform_on_grid(Signal::impulse(0), 4);
  for (std::size_t j = 0; j < 4; ++j) expect_near(s[j], 1.0, 1e-15);
}

TEST(ZTransform, ImpulseAtOne) {
  const Spectrum s = z_transform_on_grid(Signal::impulse(1), 4);
  const Complex want[] = {1.0, {0.0, -1.0}, -1.0, {0.0, 1.0}};
  for (std::size_t j = 0; j < 4; ++j) expect_near(s[j], want[j], 1e-15);
}

TEST(ZTransform, TwoTap) {
  const Spectrum s = z_transform_on_grid(Signal::from_real(0, {1.0, 1.0}), 4);
  const Complex want[] = {2.0, {1.0, -1.0}, 0.0, {1.0, 1.0}};
  for (std::size_t j = 0; j < 4; ++j) expect_near(s[j], want[j], 1e-15);
}

TEST(ZTransform, RejectsLongSignal) {
  EXPECT_THROW(z_transform_on_grid(Signal::zeros(0, 9), 8), SignalTooLongForGrid);
  EXPECT_NO_THROW(z_transform_on_grid(Signal::zeros(0, 8), 8));
}

TEST(ZTransform, AnchorEntersAsPhase) {
  std::mt19937_64 rng(7);
  for (Index start : {-100, -3, 0, 5, 77}) {
    const Signal x = oracle::random_signal(rng, start, 13);
    const Spectrum s = z_transform_on_grid(x, 16);
    const auto ref = oracle::direct_dft(x, 16);
    for (std::size_t j = 0; j < 16; ++j) expect_near(s[j], ref[j], 1e-12);
  }
}

TEST(Spectrum, RequiresPowerOfTwo) {
  EXPECT_THROW(Spectrum(Eigen::VectorXcd::Zero(6)), ConfigError);
  EXPECT_THROW(Spectrum(Eigen::VectorXcd::Zero(1)), ConfigError);
  EXPECT_NO_THROW(Spectrum(Eigen::VectorXcd::Zero(2)));
}

TEST(Spectrum, OmegaMapping) {
  const Spectrum s(Eigen::VectorXcd::Zero(8));
  EXPECT_DOUBLE_EQ(s.omega(0), 0.0);
  EXPECT_DOUBLE_EQ(s.omega(4), oracle::pi);
  EXPECT_NEAR(s.omega(6), -oracle::pi / 2, 1e-15);
}

TEST(InverseZ, AllOnes) {
  const Signal x = inverse_z_on_grid(Spectrum(Eigen::VectorXcd::Ones(4)), 0, 4);
  expect_near(x.at(0), 1.0, 1e-15);
  for (Index t = 1; t < 4; ++t) expect_near(x.at(t), 0.0, 1e-15);
}

TEST(InverseZ, RoundTripOfTwoTap) {
  Eigen::VectorXcd v(4);
  v << 2.0, Complex(1, -1), 0.0, Complex(1, 1);
  const Signal x = inverse_z_on_grid(Spectrum(v), 0, 4);
  const double want[] = {1, 1, 0, 0};
  for (Index t = 0; t < 4; ++t) expect_near(x.at(t), want[t], 1e-15);
}

TEST(InverseZ, ZeroSpectrum) {
  const Signal x = inverse_z_on_grid(Spectrum(Eigen::VectorXcd::Zero(4)), -2, 4);
  EXPECT_EQ(norm_l2(x), 0.0);
}

TEST(InverseZ, RejectsWideWindow) {
  EXPECT_THROW(inverse_z_on_grid(Spectrum(Eigen::VectorXcd::Zero(4)), 0, 5), WindowExceedsGrid);
}

TEST(Norms, Examples) {
  EXPECT_EQ(norm_l2(Signal()), 0.0);
  EXPECT_EQ(norm_linf(Signal()), 0.0);
  EXPECT_DOUBLE_EQ(norm_l2(Signal::impulse(4, 3.0)), 3.0);
  EXPECT_DOUBLE_EQ(norm_linf(Signal::impulse(4, 3.0)), 3.0);
  const Signal x = Signal::from_real(0, {3.0, 4.0});
  EXPECT_DOUBLE_EQ(norm_l2(x), 5.0);
  EXPECT_DOUBLE_EQ(norm_linf(x), 4.0);
}

TEST(AddScaled, Examples) {
  const Signal x = Signal::from_real(-1, {1, 2, 3});
  const Signal y = Signal::from_real(1, {5, 6});
  EXPECT_EQ(add_scaled(x, y, 0.0), x);
  EXPECT_EQ(add_scaled(Signal(), y, 1.0), y);
  EXPECT_EQ(add_scaled(Signal::impulse(0), Signal::impulse(0), 1.0), Signal::impulse(0, 2.0));
  const Signal z = add_scaled(x, y, 2.0);
  EXPECT_EQ(z.at(-1), Complex(1.0));
  EXPECT_EQ(z.at(1), Complex(13.0));
  EXPECT_EQ(z.at(2), Complex(12.0));
}

TEST(Signal, EqualityIgnoresPadding) {
  const Signal a = Signal::from_real(0, {0, 1, 2, 0});
  const Signal b = Signal::from_real(1, {1, 2});
  EXPECT_EQ(a, b);
  EXPECT_FALSE(a == Signal::from_real(1, {1, 3}));
  EXPECT_EQ(a.trimmed().start(), 1);
  EXPECT_EQ(a.trimmed().size(), 2u);
}

TEST(Signal, WindowAndReal) {
  const Signal a = Signal::from_real(0, {1, 2, 3});
  const Signal w = a.window(-1, 2);
  EXPECT_EQ(w.start(), -1);
  EXPECT_EQ(w.size(), 3u);
  EXPECT_EQ(w.at(-1), Complex(0.0));
  EXPECT_EQ(w.at(1), Complex(2.0));
  EXPECT_TRUE(a.is_real());
  EXPECT_FALSE(Signal::impulse(0, Complex(0, 1)).is_real());
}

TEST(Properties, ParsevalRoundTripConjugateSymmetry) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> start_d(-500, 500);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t G = std::size_t{1} << (1 + trial % 9);
    const std::size_t L = 1 + static_cast<std::size_t>(rng() % G);
    const Signal x = oracle::random_signal(rng, start_d(rng), L, trial % 2 == 0);
    const Spectrum s = z_transform_on_grid(x, G);
    const Signal back = inverse_z_on_grid(s, x.start(), L);
    EXPECT_LT((back.values() - x.values()).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, norm_linf(x)));
    const double e_time = x.values().squaredNorm();
    const double e_freq = s.values().squaredNorm() / static_cast<double>(G);
    EXPECT_LT(std::abs(e_time - e_freq), 1e-10 * e_time);
    if (x.is_real()) {
      for (std::size_t j = 0; j < G; ++j) {
        const Complex a = s[j], b = std::conj(s[(G - j) % G]);
        EXPECT_LT(std::abs(a - b), 1e-12 * std::max(1.0, std::abs(a)));
      }
    }
  }
}

TEST(SparseSignal, SetAtDense) {
  SparseSignal s;
  s.set(5, 2.0);
  s.set(-3, 1.0);
  s.set(5, 4.0);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.indices().front(), -3);
  EXPECT_EQ(s.at(5), Complex(4.0));
  EXPECT_EQ(s.at(0), Complex(0.0));
  EXPECT_FALSE(s.contains(0));
  EXPECT_DOUBLE_EQ(s.norm_l2(), std::sqrt(17.0));
  const Signal d = s.to_dense();
  EXPECT_EQ(d.start(), -3);
  EXPECT_EQ(d.size(), 9u);
  EXPECT_EQ(SparseSignal::from_dense(d).at(5), Complex(4.0));
}

TEST(Csv, SignalRoundTrip) {
  const Signal x(-2, (Eigen::VectorXcd(3) << Complex(1.5, -2), 0.1, Complex(0, 1e-300)).finished());
  std::stringstream ss;
  write_signal_csv(ss, x);
  EXPECT_EQ(ss.str().substr(0, 8), "t,re,im\n");
  const Signal y = read_signal_csv(ss);
  EXPECT_EQ(y.start(), -2);
  EXPECT_EQ(y.values(), x.values());
}

TEST(Csv, SpectrumRoundTrip) {
  const Spectrum s = z_transform_on_grid(Signal::from_real(0, {1, 2, 3}), 4);
  std::stringstream ss;
  write_spectrum_csv(ss, s);
  EXPECT_EQ(ss.str().substr(0, 13), "j,omega,re,im");
  EXPECT_EQ(read_spectrum_csv(ss).values(), s.values());
}

TEST(Csv, RejectsGarbage) {
  std::stringstream ss("t,re,im\n0,abc,1\n");
  EXPECT_THROW(read_signal_csv(ss), ConfigError);
}
