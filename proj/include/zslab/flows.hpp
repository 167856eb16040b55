// Pseudo-spectral time integration of the third-order scalar flows, the
// two-component cubic system, and the two-component third-order system.
// 4th-order integrating-factor stepping: the linear symbol is applied exactly
// in Fourier space, nonlinear products are dealiased.
#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "zslab/hierarchy.hpp"
#include "zslab/spectrum.hpp"

namespace zslab {

enum class FlowField { mkdv_defocusing, mkdv_focusing, nls_system, s4_system };

inline const char* to_string(FlowField f) {
  switch (f) {
    case FlowField::mkdv_defocusing: return "mkdv_defocusing";
    case FlowField::mkdv_focusing: return "mkdv_focusing";
    case FlowField::nls_system: return "nls_system";
    case FlowField::s4_system: return "s4_system";
  }
  return "?";
}

inline bool scalar_field(FlowField f) {
  return f == FlowField::mkdv_defocusing || f == FlowField::mkdv_focusing;
}

struct FlowSpec {
  FlowField field = FlowField::mkdv_defocusing;
  double t_end = 0.05;
  double dt = 1e-5;
  int record_every = 500;
};

struct Trajectory {
  FlowField field = FlowField::mkdv_defocusing;
  std::vector<double> times;
  std::vector<GridFunction> scalar_states;
  std::vector<PairField> pair_states;
  bool resolution_warning = false;

  bool is_scalar() const { return scalar_field(field); }
  std::size_t records() const { return times.size(); }
};

namespace detail {

inline constexpr double kStabilityConstant = 2.0e4;  // bound on dt (2 pi N)^3
inline constexpr double kBlowUpNorm = 1.0e6;
inline constexpr double kTailWarn = 1.0e-6;
inline constexpr double kTailAccept = 1.0e-10;

struct FlowWorkspace {
  int n;                 // band limit N
  std::size_t grid;      // 2N
  std::size_t fine;      // padded grid for cubic products
  int keep;              // 2/3-rule cutoff

  explicit FlowWorkspace(int n_modes)
      : n(n_modes),
        grid(2 * std::size_t(n_modes)),
        fine(next_pow2(3 * std::size_t(n_modes) + 1)),
        keep((2 * n_modes) / 3) {}

  int wave(std::size_t m) const { return m < std::size_t(n) ? int(m) : int(m) - 2 * n; }

  void mask(std::vector<cplx>& c) const {
    for (std::size_t m = 0; m < grid; ++m)
      if (std::abs(wave(m)) > keep) c[m] = cplx{0.0, 0.0};
  }

  std::vector<cplx> to_fine(const std::vector<cplx>& c) const {
    std::vector<cplx> big(fine, cplx{0.0, 0.0});
    for (int k = -n; k < n; ++k) big[fft_index(k, fine)] = c[fft_index(k, grid)];
    return inverse_samples(big);
  }

  std::vector<cplx> from_fine(std::vector<cplx> samples) const {
    const auto cf = forward_coeffs(std::move(samples));
    std::vector<cplx> c(grid, cplx{0.0, 0.0});
    for (int k = -n; k < n; ++k) c[fft_index(k, grid)] = cf[fft_index(k, fine)];
    mask(c);
    return c;
  }

  std::vector<cplx> derivative_coeffs(const std::vector<cplx>& c) const {
    std::vector<cplx> d(grid);
    for (std::size_t m = 0; m < grid; ++m)
      d[m] = c[m] * imag_unit * (two_pi * double(wave(m)));
    return d;
  }

  double guard_band_max(const std::vector<cplx>& c) const {
    double mx = 0.0;
    for (std::size_t m = 0; m < grid; ++m) {
      if (std::abs(wave(m)) > n / 2) mx = std::max(mx, std::abs(c[m]));
    }
    return mx;
  }

  double sup_estimate(const std::vector<cplx>& c) const {
    double s = 0.0;
    for (const auto& v : c) s += std::abs(v);
    return s;
  }
};

using CoeffPair = std::pair<std::vector<cplx>, std::vector<cplx>>;

// Right sides in coefficient space, dealiased on the fine grid.
inline std::vector<cplx> mkdv_nonlinear(const FlowWorkspace& ws, const std::vector<cplx>& c,
                                        double sign) {
  auto s = ws.to_fine(c);
  for (auto& v : s) v = v * v * v;
  auto cubed = ws.from_fine(std::move(s));
  for (std::size_t m = 0; m < ws.grid; ++m)
    cubed[m] *= sign * 2.0 * imag_unit * (two_pi * double(ws.wave(m)));
  return cubed;
}

inline CoeffPair nls_nonlinear(const FlowWorkspace& ws, const CoeffPair& c) {
  auto sm = ws.to_fine(c.first);
  auto sp = ws.to_fine(c.second);
  std::vector<cplx> nm(ws.fine), np(ws.fine);
  for (std::size_t j = 0; j < ws.fine; ++j) {
    nm[j] = -2.0 * imag_unit * sp[j] * sm[j] * sm[j];
    np[j] = 2.0 * imag_unit * sm[j] * sp[j] * sp[j];
  }
  return {ws.from_fine(std::move(nm)), ws.from_fine(std::move(np))};
}

inline CoeffPair s4_nonlinear(const FlowWorkspace& ws, const CoeffPair& c) {
  auto sm = ws.to_fine(c.first);
  auto sp = ws.to_fine(c.second);
  auto dm = ws.to_fine(ws.derivative_coeffs(c.first));
  auto dp = ws.to_fine(ws.derivative_coeffs(c.second));
  std::vector<cplx> nm(ws.fine), np(ws.fine);
  for (std::size_t j = 0; j < ws.fine; ++j) {
    const cplx cross = 6.0 * sm[j] * sp[j];
    nm[j] = cross * dm[j];
    np[j] = cross * dp[j];
  }
  return {ws.from_fine(std::move(nm)), ws.from_fine(std::move(np))};
}

struct Exponentials {
  std::vector<cplx> full, half;
};

inline Exponentials make_exponentials(const FlowWorkspace& ws, double dt,
                                      const std::vector<cplx>& symbol) {
  Exponentials e;
  e.full.resize(ws.grid);
  e.half.resize(ws.grid);
  for (std::size_t m = 0; m < ws.grid; ++m) {
    e.full[m] = std::exp(symbol[m] * dt);
    e.half[m] = std::exp(symbol[m] * (0.5 * dt));
  }
  return e;
}

inline std::vector<cplx> linear_symbol(const FlowWorkspace& ws, FlowField field, bool plus) {
  std::vector<cplx> sym(ws.grid);
  for (std::size_t m = 0; m < ws.grid; ++m) {
    const cplx ik = imag_unit * (two_pi * double(ws.wave(m)));
    switch (field) {
      case FlowField::mkdv_defocusing:
      case FlowField::mkdv_focusing:
      case FlowField::s4_system:
        sym[m] = -ik * ik * ik;
        break;
      case FlowField::nls_system:
        sym[m] = (plus ? -imag_unit : imag_unit) * ik * ik;
        break;
    }
  }
  return sym;
}

template <class State, class NFn>
State ifrk4_step(const State& u, double dt, const NFn& nonlinear,
                 const std::vector<Exponentials>& e);

inline std::vector<cplx> axpy(const std::vector<cplx>& x, double a,
                              const std::vector<cplx>& y) {
  std::vector<cplx> out(x.size());
  for (std::size_t m = 0; m < x.size(); ++m) out[m] = x[m] + a * y[m];
  return out;
}

inline void apply_exp(std::vector<cplx>& x, const std::vector<cplx>& e) {
  for (std::size_t m = 0; m < x.size(); ++m) x[m] *= e[m];
}

}  // namespace detail

class FlowIntegrator {
 public:
  FlowIntegrator(FlowField field, int n_modes, double dt)
      : field_(field), ws_(n_modes), dt_(dt) {
    if (dt <= 0.0) throw std::invalid_argument("flow: dt must be positive");
    const double stiffness = dt * std::pow(two_pi * double(n_modes), 3);
    if (stiffness > detail::kStabilityConstant)
      throw std::invalid_argument("flow: dt (2 pi N)^3 = " + std::to_string(stiffness) +
                                  " exceeds the scheme stability constant");
    exps_.push_back(detail::make_exponentials(ws_, dt, detail::linear_symbol(ws_, field, false)));
    if (!scalar_field(field))
      exps_.push_back(detail::make_exponentials(ws_, dt, detail::linear_symbol(ws_, field, true)));
  }

  // One IFRK4 step for the scalar fields.
  std::vector<cplx> step(const std::vector<cplx>& u) const {
    const double sign = field_ == FlowField::mkdv_defocusing ? 1.0 : -1.0;
    auto nl = [&](const std::vector<cplx>& c) { return detail::mkdv_nonlinear(ws_, c, sign); };
    return step_one(u, nl, exps_[0]);
  }

  detail::CoeffPair step(const detail::CoeffPair& u) const {
    auto nl = [&](const detail::CoeffPair& c) {
      return field_ == FlowField::nls_system ? detail::nls_nonlinear(ws_, c)
                                             : detail::s4_nonlinear(ws_, c);
    };
    const auto n1 = nl(u);
    auto mid1 = std::make_pair(half(0, detail::axpy(u.first, 0.5 * dt_, n1.first)),
                               half(1, detail::axpy(u.second, 0.5 * dt_, n1.second)));
    const auto n2 = nl(mid1);
    auto mid2 = std::make_pair(detail::axpy(half(0, u.first), 0.5 * dt_, n2.first),
                               detail::axpy(half(1, u.second), 0.5 * dt_, n2.second));
    const auto n3 = nl(mid2);
    auto end3 = std::make_pair(detail::axpy(full(0, u.first), dt_, half(0, n3.first)),
                               detail::axpy(full(1, u.second), dt_, half(1, n3.second)));
    const auto n4 = nl(end3);
    return {combine(0, u.first, n1.first, n2.first, n3.first, n4.first),
            combine(1, u.second, n1.second, n2.second, n3.second, n4.second)};
  }

  const detail::FlowWorkspace& workspace() const { return ws_; }

 private:
  template <class NFn>
  std::vector<cplx> step_one(const std::vector<cplx>& u, const NFn& nl,
                             const detail::Exponentials& e) const {
    const auto n1 = nl(u);
    auto mid1 = detail::axpy(u, 0.5 * dt_, n1);
    detail::apply_exp(mid1, e.half);
    const auto n2 = nl(mid1);
    auto ehu = u;
    detail::apply_exp(ehu, e.half);
    const auto mid2 = detail::axpy(ehu, 0.5 * dt_, n2);
    const auto n3 = nl(mid2);
    auto efu = u;
    detail::apply_exp(efu, e.full);
    auto ehn3 = n3;
    detail::apply_exp(ehn3, e.half);
    const auto end3 = detail::axpy(efu, dt_, ehn3);
    const auto n4 = nl(end3);

    std::vector<cplx> out(u.size());
    for (std::size_t m = 0; m < u.size(); ++m) {
      out[m] = e.full[m] * u[m] +
               (dt_ / 6.0) * (e.full[m] * n1[m] + 2.0 * e.half[m] * (n2[m] + n3[m]) + n4[m]);
    }
    return out;
  }

  std::vector<cplx> half(std::size_t comp, std::vector<cplx> v) const {
    detail::apply_exp(v, exps_[comp].half);
    return v;
  }
  std::vector<cplx> full(std::size_t comp, std::vector<cplx> v) const {
    detail::apply_exp(v, exps_[comp].full);
    return v;
  }
  std::vector<cplx> combine(std::size_t comp, const std::vector<cplx>& u,
                            const std::vector<cplx>& n1, const std::vector<cplx>& n2,
                            const std::vector<cplx>& n3, const std::vector<cplx>& n4) const {
    const auto& e = exps_[comp];
    std::vector<cplx> out(u.size());
    for (std::size_t m = 0; m < u.size(); ++m) {
      out[m] = e.full[m] * u[m] +
               (dt_ / 6.0) * (e.full[m] * n1[m] + 2.0 * e.half[m] * (n2[m] + n3[m]) + n4[m]);
    }
    return out;
  }

  FlowField field_;
  detail::FlowWorkspace ws_;
  double dt_;
  std::vector<detail::Exponentials> exps_;
};

namespace detail {

inline void check_resolution(const FlowWorkspace& ws, const std::vector<cplx>& c,
                             const char* what) {
  if (ws.guard_band_max(c) > kTailAccept)
    throw std::invalid_argument(std::string("flow: ") + what +
                                " is under-resolved (high-mode tail above 1e-10)");
}

}  // namespace detail

inline Trajectory evolve(const GridFunction& u0, const FlowSpec& spec) {
  if (!scalar_field(spec.field))
    throw std::invalid_argument("evolve: field needs a two-component state");
  const int steps = int(std::lround(spec.t_end / spec.dt));
  FlowIntegrator integ(spec.field, u0.n_modes(), spec.dt);
  auto c = u0.coeffs();
  detail::check_resolution(integ.workspace(), c, "initial state");

  Trajectory traj;
  traj.field = spec.field;
  const int every = std::max(1, spec.record_every);
  auto record = [&](int step) {
    traj.times.push_back(double(step) * spec.dt);
    traj.scalar_states.push_back(GridFunction::from_coeffs(u0.n_modes(), c));
    if (integ.workspace().guard_band_max(c) > detail::kTailWarn)
      traj.resolution_warning = true;
  };
  record(0);
  for (int s = 1; s <= steps; ++s) {
    c = integ.step(c);
    if (integ.workspace().sup_estimate(c) > detail::kBlowUpNorm)
      throw std::runtime_error("flow: blow-up detected at t=" + std::to_string(s * spec.dt));
    if (s % every == 0 || s == steps) record(s);
  }
  return traj;
}

inline Trajectory evolve(const Potential& phi0, const FlowSpec& spec) {
  if (scalar_field(spec.field))
    throw std::invalid_argument("evolve: field needs a one-component state");
  const int steps = int(std::lround(spec.t_end / spec.dt));
  FlowIntegrator integ(spec.field, phi0.n_modes(), spec.dt);
  detail::CoeffPair c{phi0.minus.coeffs(), phi0.plus.coeffs()};
  detail::check_resolution(integ.workspace(), c.first, "initial state (minus)");
  detail::check_resolution(integ.workspace(), c.second, "initial state (plus)");

  Trajectory traj;
  traj.field = spec.field;
  const int every = std::max(1, spec.record_every);
  auto record = [&](int step) {
    traj.times.push_back(double(step) * spec.dt);
    traj.pair_states.push_back({GridFunction::from_coeffs(phi0.n_modes(), c.first),
                                GridFunction::from_coeffs(phi0.n_modes(), c.second)});
    if (std::max(integ.workspace().guard_band_max(c.first),
                 integ.workspace().guard_band_max(c.second)) > detail::kTailWarn)
      traj.resolution_warning = true;
  };
  record(0);
  for (int s = 1; s <= steps; ++s) {
    c = integ.step(c);
    if (std::max(integ.workspace().sup_estimate(c.first),
                 integ.workspace().sup_estimate(c.second)) > detail::kBlowUpNorm)
      throw std::runtime_error("flow: blow-up detected at t=" + std::to_string(s * spec.dt));
    if (s % every == 0 || s == steps) record(s);
  }
  return traj;
}

// Max over matched record times of the distance between the first component
// of the two-component third-order flow from (u0, u0) and the scalar flow
// from u0 (focusing variant: initial state (i u0, i u0) against i times the
// focusing scalar flow).
inline double restriction_check(const GridFunction& u0, double t_end, double dt = 1e-5,
                                bool focusing = false, int record_every = 500) {
  FlowSpec pair_spec{FlowField::s4_system, t_end, dt, record_every};
  FlowSpec scalar_spec{focusing ? FlowField::mkdv_focusing : FlowField::mkdv_defocusing,
                       t_end, dt, record_every};
  const GridFunction start = focusing ? GridFunction(imag_unit * u0) : u0;
  const Trajectory pair_traj = evolve(Potential::make(start, start), pair_spec);
  const Trajectory scalar_traj = evolve(u0, scalar_spec);
  if (pair_traj.records() != scalar_traj.records())
    throw std::logic_error("restriction_check: record mismatch");
  double worst = 0.0;
  for (std::size_t r = 0; r < pair_traj.records(); ++r) {
    const GridFunction expect = focusing
                                    ? GridFunction(imag_unit * scalar_traj.scalar_states[r])
                                    : scalar_traj.scalar_states[r];
    worst = std::max(worst, max_distance(pair_traj.pair_states[r].minus, expect));
  }
  return worst;
}

// Max |H(t) - H(0)| per requested conserved quantity. Recognized names:
// K1, K2, S1..S4, mean.
inline std::map<std::string, double> conservation_report(
    const Trajectory& traj, const std::vector<std::string>& which) {
  auto value = [&](const std::string& name, std::size_t r) -> cplx {
    if (traj.is_scalar()) {
      const GridFunction& u = traj.scalar_states[r];
      if (name == "mean") return u.mean();
      if (name == "K1") return eval_k(1, u);
      if (name == "K2") return eval_k(2, u);
      if (name[0] == 'S') {
        const Potential phi = Potential::diagonal(u);
        return eval_s(name[1] - '0', phi);
      }
    } else {
      const PairField& p = traj.pair_states[r];
      const Potential phi = Potential::make(p.minus, p.plus);
      if (name == "mean") return phi.minus.mean() + phi.plus.mean();
      if (name[0] == 'S') return eval_s(name[1] - '0', phi);
      if (name[0] == 'K')
        throw std::invalid_argument("conservation_report: " + name +
                                    " needs a scalar trajectory");
    }
    throw std::invalid_argument("conservation_report: unknown quantity " + name);
  };
  std::map<std::string, double> drift;
  for (const auto& name : which) {
    const cplx h0 = value(name, 0);
    double worst = 0.0;
    for (std::size_t r = 1; r < traj.records(); ++r)
      worst = std::max(worst, std::abs(value(name, r) - h0));
    drift[name] = worst;
  }
  return drift;
}

// Max drift of the periodic eigenvalues along the trajectory, |n| <= n_range.
inline double isospectrality_probe(const Trajectory& traj, int n_range,
                                   int oversample = kDefaultOversample) {
  std::vector<SpectrumTable> tables(traj.records());
  std::vector<Potential> states;
  states.reserve(traj.records());
  for (std::size_t r = 0; r < traj.records(); ++r) {
    Potential phi = traj.is_scalar()
                        ? Potential::diagonal(traj.scalar_states[r].real_part())
                        : Potential::make(traj.pair_states[r].minus, traj.pair_states[r].plus);
    if (traj.is_scalar() && !traj.scalar_states[r].is_real(1e-7))
      throw std::invalid_argument("isospectrality_probe: scalar state not real at record " +
                                  std::to_string(r));
    if (!phi.real_type())
      throw std::invalid_argument("isospectrality_probe: state not of real type at record " +
                                  std::to_string(r));
    states.push_back(std::move(phi));
  }
  parallel_for(states.size(), [&](std::size_t r) {
    const ZsSystem sys(states[r], oversample);
    tables[r] = zs_spectrum(sys, n_range);
  });
  double worst = 0.0;
  for (std::size_t r = 1; r < tables.size(); ++r) {
    for (const auto& [n, e] : tables[0].entries) {
      const auto& et = tables[r].entries.at(n);
      worst = std::max({worst, std::abs(et.lower - e.lower), std::abs(et.upper - e.upper)});
    }
  }
  return worst;
}

}  // namespace zslab
