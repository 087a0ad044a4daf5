#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace gaprec {

using Index = std::int64_t;
using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Finite-support complex sequence anchored at `start`.
/// Samples outside [start, start + size) are zero.
class Signal {
 public:
  Signal() = default;
  Signal(Index start, Eigen::VectorXcd values) : start_(start), values_(std::move(values)) {}

  static Signal zeros(Index start, std::size_t length) {
    return Signal(start, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(length)));
  }
  static Signal impulse(Index t, Complex amplitude = 1.0) {
    Eigen::VectorXcd v(1);
    v(0) = amplitude;
    return Signal(t, std::move(v));
  }
  static Signal from_real(Index start, const std::vector<double>& samples);

  Index start() const { return start_; }
  /// One past the last stored index.
  Index end() const { return start_ + static_cast<Index>(values_.size()); }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  bool empty() const { return values_.size() == 0; }

  const Eigen::VectorXcd& values() const { return values_; }
  Eigen::VectorXcd& values() { return values_; }

  Complex at(Index t) const {
    if (t < start_ || t >= end()) return Complex(0.0, 0.0);
    return values_(static_cast<Eigen::Index>(t - start_));
  }
  Complex& operator[](Index t) { return values_(static_cast<Eigen::Index>(t - start_)); }

  bool is_real() const;

  /// Copy with leading and trailing exact zeros removed.
  Signal trimmed() const;

  /// Restriction to [lo, hi), zero-extended where needed.
  Signal window(Index lo, Index hi) const;

 private:
  Index start_ = 0;
  Eigen::VectorXcd values_;
};

/// Equal when the nonzero samples coincide at the same absolute indices.
bool operator==(const Signal& a, const Signal& b);

/// Values of the Z-transform on the uniform grid omega_j = 2 pi j / G.
class Spectrum {
 public:
  Spectrum() = default;
  explicit Spectrum(Eigen::VectorXcd values);

  std::size_t grid_size() const { return static_cast<std::size_t>(values_.size()); }
  const Eigen::VectorXcd& values() const { return values_; }
  Eigen::VectorXcd& values() { return values_; }
  Complex operator[](std::size_t j) const { return values_(static_cast<Eigen::Index>(j)); }
  Complex& operator[](std::size_t j) { return values_(static_cast<Eigen::Index>(j)); }

  /// Frequency of slot j, mapped into (-pi, pi].
  double omega(std::size_t j) const;

 private:
  Eigen::VectorXcd values_;
};

/// Sorted (index, value) pairs; used where the support is too sparse for a dense window.
class SparseSignal {
 public:
  SparseSignal() = default;
  SparseSignal(std::vector<Index> indices, std::vector<Complex> values);

  static SparseSignal from_dense(const Signal& x);

  /// Inserts or overwrites.
  void set(Index t, Complex v);
  Complex at(Index t) const;
  bool contains(Index t) const;

  std::size_t size() const { return indices_.size(); }
  const std::vector<Index>& indices() const { return indices_; }
  const std::vector<Complex>& values() const { return values_; }

  bool is_real() const;
  double norm_l2() const;
  Signal to_dense() const;

 private:
  std::vector<Index> indices_;
  std::vector<Complex> values_;
};

bool is_power_of_two(std::size_t n);
std::size_t next_power_of_two(std::size_t n);

/// Grid frequency 2 pi j / G mapped to (-pi, pi].
double grid_omega(std::size_t j, std::size_t grid_size);

/// S_j = sum_t x(t) exp(-i omega_j t) with absolute t.
/// Throws SignalTooLongForGrid if x.size() > G, ConfigError if G is not a power of two >= 2.
Spectrum z_transform_on_grid(const Signal& x, std::size_t grid_size);

/// (1/G) sum_j S_j exp(i omega_j t) for t in [window_start, window_start + window_len).
Signal inverse_z_on_grid(const Spectrum& s, Index window_start, std::size_t window_len);

double norm_l2(const Signal& x);
double norm_linf(const Signal& x);

/// x + c y over the union of supports.
Signal add_scaled(const Signal& x, const Signal& y, Complex c);

/// Plain radix-agnostic FFT wrappers (forward unscaled, inverse scaled by 1/G).
Eigen::VectorXcd fft_forward(const Eigen::VectorXcd& in);
Eigen::VectorXcd fft_inverse(const Eigen::VectorXcd& in);

// CSV: signals as `t,re,im`, spectra as `j,omega,re,im`.
void write_signal_csv(std::ostream& os, const Signal& x);
Signal read_signal_csv(std::istream& is);
void write_spectrum_csv(std::ostream& os, const Spectrum& s);
Spectrum read_spectrum_csv(std::istream& is);

void save_signal_csv(const std::string& path, const Signal& x);
Signal load_signal_csv(const std::string& path);

}  // namespace gaprec
