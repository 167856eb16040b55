// Periodic grid functions on the unit circle with dual grid/Fourier
// representation. Grid of 2N samples at x_j = j/(2N), Fourier band
// k = -N..N-1 in FFT ordering.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace zslab {

using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr cplx imag_unit{0.0, 1.0};

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Cached roots of unity, e^{-2 pi i j / n} for j < n/2.
inline const std::vector<cplx>& unit_roots(std::size_t n) {
  static std::map<std::size_t, std::vector<cplx>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<cplx> roots(n / 2);
  for (std::size_t j = 0; j < n / 2; ++j)
    roots[j] = std::polar(1.0, -two_pi * double(j) / double(n));
  return cache.emplace(n, std::move(roots)).first->second;
}

// In-place radix-2 transform, unnormalized. sign = -1: forward, +1: inverse.
inline void fft_pow2(std::vector<cplx>& a, int sign) {
  const std::size_t n = a.size();
  const auto& roots = unit_roots(n);
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < len / 2; ++j) {
        cplx w = roots[j * stride];
        if (sign > 0) w = std::conj(w);
        const cplx u = a[i + j];
        const cplx v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
      }
    }
  }
}

// O(n^2) fallback for grids that are not a power of two.
inline void dft_direct(std::vector<cplx>& a, int sign) {
  const std::size_t n = a.size();
  std::vector<cplx> out(n, cplx{0.0, 0.0});
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t j = 0; j < n; ++j) {
      const double ang = sign * two_pi * double(m) * double(j) / double(n);
      out[m] += a[j] * std::polar(1.0, ang);
    }
  }
  a = std::move(out);
}

inline void transform(std::vector<cplx>& a, int sign) {
  if (is_pow2(a.size()))
    fft_pow2(a, sign);
  else
    dft_direct(a, sign);
}

}  // namespace detail

// samples -> Fourier coefficients (FFT ordering, normalized by 1/n).
inline std::vector<cplx> forward_coeffs(std::vector<cplx> samples) {
  detail::transform(samples, -1);
  const double scale = 1.0 / double(samples.size());
  for (auto& c : samples) c *= scale;
  return samples;
}

// Fourier coefficients (FFT ordering) -> samples.
inline std::vector<cplx> inverse_samples(std::vector<cplx> coeffs) {
  detail::transform(coeffs, +1);
  return coeffs;
}

// FFT-order index of harmonic k on a grid of `size` samples.
inline std::size_t fft_index(int k, std::size_t size) {
  return k >= 0 ? std::size_t(k) : size - std::size_t(-k);
}

class GridFunction {
 public:
  GridFunction() = default;

  explicit GridFunction(int n_modes)
      : n_modes_(check_modes(n_modes)), samples_(2 * std::size_t(n_modes), cplx{0.0, 0.0}) {}

  static GridFunction from_samples(int n_modes, std::vector<cplx> samples) {
    check_modes(n_modes);
    if (samples.size() != 2 * std::size_t(n_modes))
      throw std::invalid_argument("GridFunction: sample count must be 2*n_modes");
    GridFunction f;
    f.n_modes_ = n_modes;
    f.samples_ = std::move(samples);
    return f;
  }

  // coeffs in FFT ordering, length 2*n_modes.
  static GridFunction from_coeffs(int n_modes, const std::vector<cplx>& coeffs) {
    check_modes(n_modes);
    if (coeffs.size() != 2 * std::size_t(n_modes))
      throw std::invalid_argument("GridFunction: coefficient count must be 2*n_modes");
    return from_samples(n_modes, inverse_samples(coeffs));
  }

  int n_modes() const { return n_modes_; }
  std::size_t size() const { return samples_.size(); }
  const std::vector<cplx>& samples() const { return samples_; }
  const cplx& operator[](std::size_t j) const { return samples_[j]; }
  double grid_point(std::size_t j) const { return double(j) / double(size()); }

  std::vector<cplx> coeffs() const { return forward_coeffs(samples_); }

  cplx coeff(int k) const {
    if (std::abs(k) > n_modes_) return cplx{0.0, 0.0};
    const auto c = coeffs();
    if (k == n_modes_) return cplx{0.0, 0.0};
    return c[fft_index(k, size())];
  }

  cplx mean() const {
    cplx s{0.0, 0.0};
    for (const auto& v : samples_) s += v;
    return s / double(size());
  }

  // Fourier multiplier (2 pi i k)^order. The unmatched -N mode is dropped for
  // odd orders so real input stays real.
  GridFunction derivative(int order) const {
    if (order < 1) throw std::invalid_argument("derivative: order must be >= 1");
    auto c = coeffs();
    const int n = n_modes_;
    for (std::size_t m = 0; m < c.size(); ++m) {
      const int k = m < std::size_t(n) ? int(m) : int(m) - 2 * n;
      if (k == -n && order % 2 == 1) {
        c[m] = cplx{0.0, 0.0};
        continue;
      }
      cplx mult{1.0, 0.0};
      const cplx base = imag_unit * (two_pi * double(k));
      for (int p = 0; p < order; ++p) mult *= base;
      c[m] *= mult;
    }
    return from_coeffs(n, c);
  }

  // Primitive \int_0^x f dy sampled on the grid. The mean integrates to a
  // linear term; the rest is integrated in Fourier space.
  GridFunction antiderivative() const {
    auto c = coeffs();
    const int n = n_modes_;
    const cplx mean_part = c[0];
    c[0] = cplx{0.0, 0.0};
    for (std::size_t m = 1; m < c.size(); ++m) {
      const int k = m < std::size_t(n) ? int(m) : int(m) - 2 * n;
      c[m] /= imag_unit * (two_pi * double(k));
    }
    auto vals = inverse_samples(c);
    cplx at_zero = vals[0];
    for (std::size_t j = 0; j < vals.size(); ++j)
      vals[j] += -at_zero + mean_part * grid_point(j);
    return from_samples(n, std::move(vals));
  }

  // Trigonometric interpolation at arbitrary x (exact for band-limited data).
  cplx eval(double x) const {
    const auto c = coeffs();
    const int n = n_modes_;
    cplx acc{0.0, 0.0};
    for (std::size_t m = 0; m < c.size(); ++m) {
      const int k = m < std::size_t(n) ? int(m) : int(m) - 2 * n;
      acc += c[m] * std::polar(1.0, two_pi * double(k) * x);
    }
    return acc;
  }

  GridFunction reflected() const {  // x -> 1 - x, exact on the grid
    std::vector<cplx> out(size());
    for (std::size_t j = 0; j < size(); ++j) out[j] = samples_[(size() - j) % size()];
    return from_samples(n_modes_, std::move(out));
  }

  GridFunction conjugated() const {
    std::vector<cplx> out(size());
    for (std::size_t j = 0; j < size(); ++j) out[j] = std::conj(samples_[j]);
    return from_samples(n_modes_, std::move(out));
  }

  double sup_norm() const {
    double m = 0.0;
    for (const auto& v : samples_) m = std::max(m, std::abs(v));
    return m;
  }

  double l2_norm() const {
    double s = 0.0;
    for (const auto& v : samples_) s += std::norm(v);
    return std::sqrt(s / double(size()));
  }

  double max_imag() const {
    double m = 0.0;
    for (const auto& v : samples_) m = std::max(m, std::abs(v.imag()));
    return m;
  }

  bool is_real(double tol = 1e-10) const { return max_imag() <= tol; }

  GridFunction real_part() const {
    std::vector<cplx> out(size());
    for (std::size_t j = 0; j < size(); ++j) out[j] = cplx{samples_[j].real(), 0.0};
    return from_samples(n_modes_, std::move(out));
  }

  friend GridFunction operator+(const GridFunction& a, const GridFunction& b) {
    return zip(a, b, [](cplx x, cplx y) { return x + y; });
  }
  friend GridFunction operator-(const GridFunction& a, const GridFunction& b) {
    return zip(a, b, [](cplx x, cplx y) { return x - y; });
  }
  friend GridFunction operator*(cplx s, const GridFunction& a) {
    std::vector<cplx> out(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) out[j] = s * a.samples_[j];
    return from_samples(a.n_modes_, std::move(out));
  }
  friend GridFunction operator*(double s, const GridFunction& a) { return cplx{s, 0.0} * a; }
  GridFunction operator-() const { return cplx{-1.0, 0.0} * *this; }

 private:
  static int check_modes(int n) {
    if (n < 2) throw std::invalid_argument("GridFunction: n_modes must be >= 2");
    return n;
  }

  template <class F>
  static GridFunction zip(const GridFunction& a, const GridFunction& b, F&& f) {
    if (a.n_modes_ != b.n_modes_)
      throw std::invalid_argument("GridFunction: mode count mismatch");
    std::vector<cplx> out(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) out[j] = f(a.samples_[j], b.samples_[j]);
    return from_samples(a.n_modes_, std::move(out));
  }

  int n_modes_ = 0;
  std::vector<cplx> samples_;
};

// Alias-free pointwise product: factors are zero-padded beyond 3N before the
// grid multiply, then the result is truncated back to the working band.
inline GridFunction mul(const GridFunction& a, const GridFunction& b) {
  if (a.n_modes() != b.n_modes())
    throw std::invalid_argument("mul: mode count mismatch");
  const int n = a.n_modes();
  const std::size_t fine = detail::next_pow2(3 * std::size_t(n) + 1);
  auto pad = [&](const GridFunction& f) {
    const auto c = f.coeffs();
    std::vector<cplx> big(fine, cplx{0.0, 0.0});
    for (int k = -n; k < n; ++k) big[fft_index(k, fine)] = c[fft_index(k, 2 * std::size_t(n))];
    return inverse_samples(big);
  };
  auto sa = pad(a);
  auto sb = pad(b);
  for (std::size_t j = 0; j < fine; ++j) sa[j] *= sb[j];
  const auto cf = forward_coeffs(std::move(sa));
  std::vector<cplx> c(2 * std::size_t(n), cplx{0.0, 0.0});
  for (int k = -n; k < n; ++k) c[fft_index(k, 2 * std::size_t(n))] = cf[fft_index(k, fine)];
  return GridFunction::from_coeffs(n, c);
}

// Bilinear pairing \int_0^1 a b dx (no conjugation), exact on the stored band.
inline cplx bilinear_integral(const GridFunction& a, const GridFunction& b) {
  if (a.n_modes() != b.n_modes())
    throw std::invalid_argument("bilinear_integral: mode count mismatch");
  const int n = a.n_modes();
  const auto ca = a.coeffs();
  const auto cb = b.coeffs();
  cplx acc{0.0, 0.0};
  for (int k = -n + 1; k < n; ++k)
    acc += ca[fft_index(k, ca.size())] * cb[fft_index(-k, cb.size())];
  return acc;
}

// Samples of sum_k c_k e^{2 pi i k x} from an explicit harmonic table.
inline GridFunction make_trig(const std::map<int, cplx>& harmonics, int n_modes) {
  std::vector<cplx> c(2 * std::size_t(n_modes), cplx{0.0, 0.0});
  for (const auto& [k, amp] : harmonics) {
    if (std::abs(k) >= n_modes)
      throw std::invalid_argument("make_trig: harmonic " + std::to_string(k) +
                                  " out of range for n_modes=" + std::to_string(n_modes));
    c[fft_index(k, c.size())] = amp;
  }
  return GridFunction::from_coeffs(n_modes, c);
}

inline double max_distance(const GridFunction& a, const GridFunction& b) {
  return (a - b).sup_norm();
}

}  // namespace zslab
