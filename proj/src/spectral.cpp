#include "gaprec/spectral.hpp"

#include "gaprec/errors.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace gaprec {

namespace {

Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> engine;
  return engine;
}

void require_grid(std::size_t grid_size) {
  if (grid_size < 2 || !is_power_of_two(grid_size)) {
    throw ConfigError("grid size must be a power of two >= 2, got " + std::to_string(grid_size));
  }
}

std::size_t wrap(Index t, std::size_t grid_size) {
  const Index g = static_cast<Index>(grid_size);
  Index r = t % g;
  if (r < 0) r += g;
  return static_cast<std::size_t>(r);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && s[i] == ' ') ++i;
  return s.substr(i);
}

}  // namespace

Signal Signal::from_real(Index start, const std::vector<double>& samples) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) v(static_cast<Eigen::Index>(i)) = samples[i];
  return Signal(start, std::move(v));
}

bool Signal::is_real() const {
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (values_(i).imag() != 0.0) return false;
  }
  return true;
}

Signal Signal::trimmed() const {
  Eigen::Index lo = 0;
  Eigen::Index hi = values_.size();
  while (lo < hi && values_(lo) == Complex(0.0, 0.0)) ++lo;
  while (hi > lo && values_(hi - 1) == Complex(0.0, 0.0)) --hi;
  if (lo == hi) return Signal();
  return Signal(start_ + lo, values_.segment(lo, hi - lo));
}

Signal Signal::window(Index lo, Index hi) const {
  if (hi < lo) throw ConfigError("window: hi < lo");
  Signal out = zeros(lo, static_cast<std::size_t>(hi - lo));
  const Index a = std::max(lo, start_);
  const Index b = std::min(hi, end());
  for (Index t = a; t < b; ++t) out[t] = at(t);
  return out;
}

bool operator==(const Signal& a, const Signal& b) {
  const Signal ta = a.trimmed();
  const Signal tb = b.trimmed();
  if (ta.empty() || tb.empty()) return ta.empty() && tb.empty();
  return ta.start() == tb.start() && ta.values() == tb.values();
}

Spectrum::Spectrum(Eigen::VectorXcd values) : values_(std::move(values)) {
  require_grid(static_cast<std::size_t>(values_.size()));
}

double Spectrum::omega(std::size_t j) const { return grid_omega(j, grid_size()); }

SparseSignal::SparseSignal(std::vector<Index> indices, std::vector<Complex> values) {
  if (indices.size() != values.size()) throw ConfigError("SparseSignal: size mismatch");
  for (std::size_t i = 0; i < indices.size(); ++i) set(indices[i], values[i]);
}

SparseSignal SparseSignal::from_dense(const Signal& x) {
  SparseSignal out;
  out.indices_.reserve(x.size());
  out.values_.reserve(x.size());
  for (Index t = x.start(); t < x.end(); ++t) {
    out.indices_.push_back(t);
    out.values_.push_back(x.at(t));
  }
  return out;
}

void SparseSignal::set(Index t, Complex v) {
  if (indices_.empty() || t > indices_.back()) {
    indices_.push_back(t);
    values_.push_back(v);
    return;
  }
  auto it = std::lower_bound(indices_.begin(), indices_.end(), t);
  const auto pos = static_cast<std::size_t>(it - indices_.begin());
  if (it != indices_.end() && *it == t) {
    values_[pos] = v;
  } else {
    indices_.insert(it, t);
    values_.insert(values_.begin() + static_cast<std::ptrdiff_t>(pos), v);
  }
}

Complex SparseSignal::at(Index t) const {
  auto it = std::lower_bound(indices_.begin(), indices_.end(), t);
  if (it == indices_.end() || *it != t) return Complex(0.0, 0.0);
  return values_[static_cast<std::size_t>(it - indices_.begin())];
}

bool SparseSignal::contains(Index t) const {
  return std::binary_search(indices_.begin(), indices_.end(), t);
}

bool SparseSignal::is_real() const {
  return std::all_of(values_.begin(), values_.end(), [](Complex v) { return v.imag() == 0.0; });
}

double SparseSignal::norm_l2() const {
  double acc = 0.0;
  for (const auto& v : values_) acc += std::norm(v);
  return std::sqrt(acc);
}

Signal SparseSignal::to_dense() const {
  if (indices_.empty()) return Signal();
  Signal out = Signal::zeros(indices_.front(),
                             static_cast<std::size_t>(indices_.back() - indices_.front() + 1));
  for (std::size_t i = 0; i < indices_.size(); ++i) out[indices_[i]] = values_[i];
  return out;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

double grid_omega(std::size_t j, std::size_t grid_size) {
  const double w = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(grid_size);
  return w > kPi ? w - 2.0 * kPi : w;
}

Eigen::VectorXcd fft_forward(const Eigen::VectorXcd& in) {
  Eigen::VectorXcd out;
  fft_engine().fwd(out, in);
  return out;
}

Eigen::VectorXcd fft_inverse(const Eigen::VectorXcd& in) {
  Eigen::VectorXcd out;
  fft_engine().inv(out, in);
  return out;
}

Spectrum z_transform_on_grid(const Signal& x, std::size_t grid_size) {
  require_grid(grid_size);
  if (x.size() > grid_size) {
    throw SignalTooLongForGrid("signal length " + std::to_string(x.size()) +
                               " exceeds grid size " + std::to_string(grid_size));
  }
  // exp(-i omega_j t) is G-periodic in t, so each sample lands in slot t mod G.
  Eigen::VectorXcd buf = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid_size));
  for (Index t = x.start(); t < x.end(); ++t) {
    buf(static_cast<Eigen::Index>(wrap(t, grid_size))) = x.at(t);
  }
  return Spectrum(fft_forward(buf));
}

Signal inverse_z_on_grid(const Spectrum& s, Index window_start, std::size_t window_len) {
  const std::size_t g = s.grid_size();
  if (window_len > g) {
    throw WindowExceedsGrid("window length " + std::to_string(window_len) +
                            " exceeds grid size " + std::to_string(g));
  }
  const Eigen::VectorXcd period = fft_inverse(s.values());
  Signal out = Signal::zeros(window_start, window_len);
  for (Index t = window_start; t < window_start + static_cast<Index>(window_len); ++t) {
    out[t] = period(static_cast<Eigen::Index>(wrap(t, g)));
  }
  return out;
}

double norm_l2(const Signal& x) { return x.values().norm(); }

double norm_linf(const Signal& x) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < x.values().size(); ++i) m = std::max(m, std::abs(x.values()(i)));
  return m;
}

Signal add_scaled(const Signal& x, const Signal& y, Complex c) {
  if (x.empty() && y.empty()) return Signal();
  Index lo = x.empty() ? y.start() : x.start();
  Index hi = x.empty() ? y.end() : x.end();
  if (!y.empty()) {
    lo = std::min(lo, y.start());
    hi = std::max(hi, y.end());
  }
  Signal out = x.window(lo, hi);
  for (Index t = y.start(); t < y.end(); ++t) out[t] += c * y.at(t);
  return out;
}

void write_signal_csv(std::ostream& os, const Signal& x) {
  os << "t,re,im\n" << std::setprecision(17);
  for (Index t = x.start(); t < x.end(); ++t) {
    const Complex v = x.at(t);
    os << t << ',' << v.real() << ',' << v.imag() << '\n';
  }
}

Signal read_signal_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || strip(line) != "t,re,im") {
    throw ConfigError("signal CSV must start with header t,re,im");
  }
  std::vector<std::pair<Index, Complex>> rows;
  while (std::getline(is, line)) {
    line = strip(line);
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 3) throw ConfigError("signal CSV row needs 3 fields: " + line);
    try {
      rows.emplace_back(std::stoll(cells[0]), Complex(std::stod(cells[1]), std::stod(cells[2])));
    } catch (const std::exception&) {
      throw ConfigError("signal CSV row not numeric: " + line);
    }
  }
  if (rows.empty()) return Signal();
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].first != rows[i - 1].first + 1) {
      throw ConfigError("signal CSV indices must be consecutive");
    }
  }
  Signal out = Signal::zeros(rows.front().first, rows.size());
  for (const auto& [t, v] : rows) out[t] = v;
  return out;
}

void write_spectrum_csv(std::ostream& os, const Spectrum& s) {
  os << "j,omega,re,im\n" << std::setprecision(17);
  for (std::size_t j = 0; j < s.grid_size(); ++j) {
    os << j << ',' << s.omega(j) << ',' << s[j].real() << ',' << s[j].imag() << '\n';
  }
}

Spectrum read_spectrum_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || strip(line) != "j,omega,re,im") {
    throw ConfigError("spectrum CSV must start with header j,omega,re,im");
  }
  std::vector<Complex> vals;
  while (std::getline(is, line)) {
    line = strip(line);
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 4) throw ConfigError("spectrum CSV row needs 4 fields: " + line);
    if (std::stoull(cells[0]) != vals.size()) throw ConfigError("spectrum CSV slots out of order");
    vals.emplace_back(std::stod(cells[2]), std::stod(cells[3]));
  }
  Eigen::VectorXcd v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t j = 0; j < vals.size(); ++j) v(static_cast<Eigen::Index>(j)) = vals[j];
  return Spectrum(std::move(v));
}

void save_signal_csv(const std::string& path, const Signal& x) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_signal_csv(os, x);
}

Signal load_signal_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open " + path);
  return read_signal_csv(is);
}

}  // namespace gaprec
