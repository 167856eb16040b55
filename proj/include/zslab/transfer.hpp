// Fundamental solutions of the Zakharov-Shabat first-order system and the
// Hill second-order equation, with spectral-parameter derivatives. Classical
// fixed-step 4th-order integration; potential values at stage points come
// from trigonometric interpolation, exact for band-limited data.
#pragma once

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "zslab/potential.hpp"

namespace zslab {

struct Mat2 {
  cplx a{0.0, 0.0}, b{0.0, 0.0}, c{0.0, 0.0}, d{0.0, 0.0};  // [[a, b], [c, d]]

  static Mat2 identity() { return {cplx{1.0, 0.0}, {}, {}, cplx{1.0, 0.0}}; }

  cplx trace() const { return a + d; }
  cplx det() const { return a * d - b * c; }

  Mat2 inverse() const {
    const cplx dt = det();
    if (std::abs(dt) < 1e-300) throw std::runtime_error("Mat2: singular matrix");
    return {d / dt, -b / dt, -c / dt, a / dt};
  }

  double norm() const {
    return std::sqrt(std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d));
  }

  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  friend Mat2 operator+(const Mat2& x, const Mat2& y) {
    return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
  }
  friend Mat2 operator-(const Mat2& x, const Mat2& y) {
    return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d};
  }
  friend Mat2 operator*(cplx s, const Mat2& x) { return {s * x.a, s * x.b, s * x.c, s * x.d}; }
  friend Mat2 operator*(double s, const Mat2& x) { return cplx{s, 0.0} * x; }
};

inline double max_entry_distance(const Mat2& x, const Mat2& y) {
  return std::max(std::max(std::abs(x.a - y.a), std::abs(x.b - y.b)),
                  std::max(std::abs(x.c - y.c), std::abs(x.d - y.d)));
}

enum class OperatorKind { zs, hill };

struct TransferJet {
  Mat2 m;          // fundamental solution at x
  Mat2 dm;         // derivative with respect to the spectral parameter
  double x = 0.0;
  cplx lambda{0.0, 0.0};
  OperatorKind kind = OperatorKind::zs;
  bool has_jet = false;
};

namespace detail {

// Values of f at x = x0 + m * (h/2), either read from a precomputed periodic
// fine grid or interpolated directly.
struct StageSampler {
  const std::vector<cplx>* table = nullptr;  // length 2S, x_m = m/(2S)
  const GridFunction* fn = nullptr;
  double x0 = 0.0;
  double half_h = 0.0;

  cplx at(int m) const {
    if (table) return (*table)[std::size_t(m) % table->size()];
    return fn->eval(x0 + half_h * double(m));
  }
};

inline std::vector<cplx> fine_samples(const GridFunction& f, std::size_t count) {
  const int n = f.n_modes();
  const auto c = f.coeffs();
  if (count >= 2 * std::size_t(n) && is_pow2(count)) {
    std::vector<cplx> big(count, cplx{0.0, 0.0});
    for (int k = -n; k < n; ++k) big[fft_index(k, count)] = c[fft_index(k, 2 * std::size_t(n))];
    return inverse_samples(big);
  }
  std::vector<cplx> vals(count);
  for (std::size_t m = 0; m < count; ++m) vals[m] = f.eval(double(m) / double(count));
  return vals;
}

// One RK4 step of the pair (M, D) with D' = A D + A_dl M, M' = A M.
template <class AFn>
inline void rk4_step(const AFn& a_of, int j, double h, const Mat2& a_dl, bool with_jet,
                     Mat2& m, Mat2& d) {
  const Mat2 a0 = a_of(2 * j);
  const Mat2 a1 = a_of(2 * j + 1);
  const Mat2 a2 = a_of(2 * j + 2);
  const double h2 = 0.5 * h;

  const Mat2 k1 = a0 * m;
  const Mat2 m1 = m + h2 * k1;
  const Mat2 k2 = a1 * m1;
  const Mat2 m2 = m + h2 * k2;
  const Mat2 k3 = a1 * m2;
  const Mat2 m3 = m + h * k3;
  const Mat2 k4 = a2 * m3;

  if (with_jet) {
    const Mat2 q1 = a0 * d + a_dl * m;
    const Mat2 q2 = a1 * (d + h2 * q1) + a_dl * m1;
    const Mat2 q3 = a1 * (d + h2 * q2) + a_dl * m2;
    const Mat2 q4 = a2 * (d + h * q3) + a_dl * m3;
    d = d + (h / 6.0) * (q1 + 2.0 * q2 + 2.0 * q3 + q4);
  }
  m = m + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline void check_parameter(cplx lambda, const char* what) {
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
    throw std::runtime_error(std::string(what) + ": non-finite spectral parameter");
}

inline std::string param_string(cplx z) {
  return "(" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")";
}

}  // namespace detail

inline constexpr int kDefaultOversample = 8;

// Oscillation-adaptive step count: base resolution 2N * oversample, refined by
// a power-of-two factor once the solution oscillates faster than the grid.
inline int step_multiplier(double oscillation_scale) {
  const double need = std::max(1.0, oscillation_scale / 6.0);
  int mult = int(detail::next_pow2(std::size_t(std::ceil(need))));
  return std::min(mult, 512);
}

namespace detail {

template <class Derived>
class SystemBase {
 public:
  explicit SystemBase(int n_modes, int oversample)
      : n_modes_(n_modes), oversample_(oversample) {
    if (oversample < 1) throw std::invalid_argument("oversample must be >= 1");
  }

  int n_modes() const { return n_modes_; }
  int base_steps() const { return 2 * n_modes_ * oversample_; }

  int steps_for(cplx z) const {
    return base_steps() * step_multiplier(static_cast<const Derived*>(this)->oscillation(z));
  }

  TransferJet fundamental(cplx z, double x = 1.0, bool with_jet = true) const {
    return fundamental_steps(z, x, with_jet, steps_for(z));
  }

  TransferJet fundamental_steps(cplx z, double x, bool with_jet, int full_steps) const {
    detail::check_parameter(z, Derived::name());
    if (x < 0.0 || x > 1.0)
      throw std::invalid_argument(std::string(Derived::name()) + ": x outside [0,1]");
    const auto* self = static_cast<const Derived*>(this);
    Mat2 m = Mat2::identity();
    Mat2 d{};
    if (x == 0.0) return self->pack(m, d, 0.0, z, with_jet);

    const double aligned = x * double(full_steps);
    const double h = 1.0 / double(full_steps);
    if (h < 1e-12)
      throw std::runtime_error(std::string(Derived::name()) +
                               ": step size underflow at parameter " + detail::param_string(z));
    if (std::abs(aligned - std::round(aligned)) < 1e-9) {
      const int steps = int(std::round(aligned));
      auto hold = self->stage_tables(full_steps);
      auto a_of = self->stage_fn(hold, z, full_steps);
      for (int j = 0; j < steps; ++j)
        detail::rk4_step(a_of, j, h, self->a_param_deriv(), with_jet, m, d);
    } else {
      const int steps = std::max(1, int(std::ceil(aligned)));
      const double hx = x / double(steps);
      auto a_of = self->direct_fn(z, 0.0, hx);
      for (int j = 0; j < steps; ++j)
        detail::rk4_step(a_of, j, hx, self->a_param_deriv(), with_jet, m, d);
    }
    return self->pack(m, d, x, z, with_jet);
  }

  // Fundamental solution recorded at the 2N+1 grid points x_j = j/(2N).
  std::vector<TransferJet> fundamental_grid(cplx z, bool with_jet = false) const {
    detail::check_parameter(z, Derived::name());
    const auto* self = static_cast<const Derived*>(this);
    const int full_steps = steps_for(z);
    const int stride = full_steps / (2 * n_modes_);
    const double h = 1.0 / double(full_steps);
    auto hold = self->stage_tables(full_steps);
    auto a_of = self->stage_fn(hold, z, full_steps);
    Mat2 m = Mat2::identity();
    Mat2 d{};
    std::vector<TransferJet> out;
    out.reserve(2 * n_modes_ + 1);
    out.push_back(self->pack(m, d, 0.0, z, with_jet));
    for (int j = 0; j < full_steps; ++j) {
      detail::rk4_step(a_of, j, h, self->a_param_deriv(), with_jet, m, d);
      if ((j + 1) % stride == 0)
        out.push_back(self->pack(m, d, double(j + 1) * h, z, with_jet));
    }
    return out;
  }

  // Propagator over [x0, x1] starting from the identity.
  Mat2 segment(cplx z, double x0, double x1, int steps) const {
    detail::check_parameter(z, Derived::name());
    if (steps < 1 || x1 < x0) throw std::invalid_argument("segment: bad arguments");
    const auto* self = static_cast<const Derived*>(this);
    const double h = (x1 - x0) / double(steps);
    auto a_of = self->direct_fn(z, x0, 0.5 * h);
    Mat2 m = Mat2::identity();
    Mat2 d{};
    for (int j = 0; j < steps; ++j)
      detail::rk4_step(a_of, j, h, self->a_param_deriv(), false, m, d);
    return m;
  }

 protected:
  int n_modes_;
  int oversample_;
};

}  // namespace detail

// First-order 2x2 system M' = A(x, lambda) M with
// A = [[-i lambda, i phi_-], [-i phi_+, i lambda]], M(0) = I.
class ZsSystem : public detail::SystemBase<ZsSystem> {
 public:
  explicit ZsSystem(Potential phi, int oversample = kDefaultOversample)
      : SystemBase(phi.n_modes(), oversample), phi_(std::move(phi)) {}

  static const char* name() { return "zs transfer"; }
  const Potential& potential() const { return phi_; }

  double oscillation(cplx lambda) const { return std::abs(lambda); }
  Mat2 a_param_deriv() const { return {-imag_unit, {}, {}, imag_unit}; }

  struct Tables {
    std::shared_ptr<const std::vector<cplx>> minus, plus;
  };

  Tables stage_tables(int full_steps) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(full_steps);
    if (it == cache_.end()) {
      Tables t;
      t.minus = std::make_shared<const std::vector<cplx>>(
          detail::fine_samples(phi_.minus, 2 * std::size_t(full_steps)));
      t.plus = std::make_shared<const std::vector<cplx>>(
          detail::fine_samples(phi_.plus, 2 * std::size_t(full_steps)));
      it = cache_.emplace(full_steps, std::move(t)).first;
    }
    return it->second;
  }

  auto stage_fn(const Tables& t, cplx lambda, int /*full_steps*/) const {
    const cplx dia = -imag_unit * lambda;
    return [t, dia](int m) -> Mat2 {
      const std::size_t idx = std::size_t(m) % t.minus->size();
      return {dia, imag_unit * (*t.minus)[idx], -imag_unit * (*t.plus)[idx], -dia};
    };
  }

  auto direct_fn(cplx lambda, double x0, double half_h) const {
    const cplx dia = -imag_unit * lambda;
    const GridFunction* gm = &phi_.minus;
    const GridFunction* gp = &phi_.plus;
    return [gm, gp, dia, x0, half_h](int m) -> Mat2 {
      const double x = x0 + half_h * double(m);
      return {dia, imag_unit * gm->eval(x), -imag_unit * gp->eval(x), -dia};
    };
  }

  TransferJet pack(const Mat2& m, const Mat2& d, double x, cplx lambda, bool with_jet) const {
    return {m, d, x, lambda, OperatorKind::zs, with_jet};
  }

 private:
  Potential phi_;
  mutable std::mutex mutex_;
  mutable std::map<int, Tables> cache_;
};

// Second-order equation y'' = (q - mu) y in first-order form; columns of the
// fundamental solution are (y1, y1') and (y2, y2').
class HillSystem : public detail::SystemBase<HillSystem> {
 public:
  explicit HillSystem(GridFunction q, int oversample = kDefaultOversample)
      : SystemBase(q.n_modes(), oversample), q_(std::move(q)) {}

  // Hill operator attached to the Miura image u_x + u^2.
  static HillSystem from_miura(const GridFunction& u, int oversample = kDefaultOversample) {
    return HillSystem(miura(u), oversample);
  }

  static const char* name() { return "hill transfer"; }
  const GridFunction& q() const { return q_; }

  double oscillation(cplx mu) const { return std::sqrt(std::abs(mu)); }
  Mat2 a_param_deriv() const { return {{}, {}, cplx{-1.0, 0.0}, {}}; }

  struct Tables {
    std::shared_ptr<const std::vector<cplx>> q;
  };

  Tables stage_tables(int full_steps) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(full_steps);
    if (it == cache_.end()) {
      Tables t;
      t.q = std::make_shared<const std::vector<cplx>>(
          detail::fine_samples(q_, 2 * std::size_t(full_steps)));
      it = cache_.emplace(full_steps, std::move(t)).first;
    }
    return it->second;
  }

  auto stage_fn(const Tables& t, cplx mu, int /*full_steps*/) const {
    return [t, mu](int m) -> Mat2 {
      const std::size_t idx = std::size_t(m) % t.q->size();
      return {{}, cplx{1.0, 0.0}, (*t.q)[idx] - mu, {}};
    };
  }

  auto direct_fn(cplx mu, double x0, double half_h) const {
    const GridFunction* g = &q_;
    return [g, mu, x0, half_h](int m) -> Mat2 {
      return {{}, cplx{1.0, 0.0}, g->eval(x0 + half_h * double(m)) - mu, {}};
    };
  }

  TransferJet pack(const Mat2& m, const Mat2& d, double x, cplx mu, bool with_jet) const {
    return {m, d, x, mu, OperatorKind::hill, with_jet};
  }

 private:
  GridFunction q_;
  mutable std::mutex mutex_;
  mutable std::map<int, Tables> cache_;
};

inline TransferJet zs_fundamental(const Potential& phi, cplx lambda, double x = 1.0,
                                  bool with_jet = true) {
  return ZsSystem(phi).fundamental(lambda, x, with_jet);
}

inline TransferJet hill_fundamental(const GridFunction& q, cplx mu, double x = 1.0,
                                    bool with_jet = true) {
  return HillSystem(q).fundamental(mu, x, with_jet);
}

}  // namespace zslab
