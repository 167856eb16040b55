// Canonical square root of Delta^2 - 4 by continuity tracking, the primitive
// F (local cosh^{-1}/log formula), action variables by contour quadrature,
// and asymptotic extraction of hierarchy Hamiltonians from F at large lambda.
#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <type_traits>
#include <vector>

#include "zslab/spectrum.hpp"

namespace zslab {

struct Contour {
  double center = 0.0;
  double radius = 0.0;
  int n_points = 256;
  bool encloses_origin = false;
};

struct ActionRecord {
  int n = 0;
  int k = 1;
  cplx value{0.0, 0.0};
  double quad_error = 0.0;
  char kind = 'I';
};

inline cplx ipow(cplx z, int e) {
  cplx base = e >= 0 ? z : 1.0 / z;
  int m = e >= 0 ? e : -e;
  cplx acc{1.0, 0.0};
  while (m) {
    if (m & 1) acc *= base;
    base *= base;
    m >>= 1;
  }
  return acc;
}

inline constexpr int kContourPoints = 256;
inline constexpr int kContourPointsTight = 512;
inline constexpr double kContourRadiusFraction = 0.75;

// Per-potential branch bookkeeping: spectrum, isolating discs, and the sign
// of the canonical root on each real band between consecutive gaps. Signs are
// anchored on the band right of gap 0 and propagated by continuity along
// upper half-plane arcs over each gap.
template <class System>
class BranchAtlas {
 public:
  static constexpr bool is_zs = std::is_same_v<System, ZsSystem>;

  BranchAtlas(const System& sys, int n_spec)
      : sys_(sys),
        table_(is_zs ? make_table_zs(sys, n_spec) : make_table_hill(sys, n_spec)),
        discs_(isolating_discs(table_)) {
    band_sign_[0] = -1.0;  // i * root > 0 on the band right of gap 0
  }
  BranchAtlas(System&&, int) = delete;  // the atlas keeps a reference

  const System& system() const { return sys_; }
  const SpectrumTable& table() const { return table_; }
  const std::map<int, Disc>& discs() const { return discs_; }

  int min_band() const { return is_zs ? -table_.n_spec : 0; }
  int max_band() const { return table_.n_spec - 1; }

  cplx delta(cplx z) const { return sys_.fundamental(z, 1.0, false).m.trace(); }
  cplx delta_sq_m4(cplx z) const {
    const cplx d = delta(z);
    return d * d - 4.0;
  }

  double band_anchor(int m) const {
    check_band(m);
    return 0.5 * (table_.entries.at(m).upper + table_.entries.at(m + 1).lower);
  }

  // Band containing a real point strictly between gaps.
  int band_of(double x) const {
    for (int m = min_band(); m <= max_band(); ++m) {
      if (x > table_.entries.at(m).upper && x < table_.entries.at(m + 1).lower) return m;
    }
    throw std::invalid_argument("canonical root: real point " + std::to_string(x) +
                                " lies inside a gap or outside the tabulated bands");
  }

  double band_sign(int m) const {
    check_band(m);
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = band_sign_.find(m);
    if (it != band_sign_.end()) return it->second;
    int known = 0;  // walk outward from the nearest computed band
    if (m > 0)
      for (int j = m - 1; j >= 0; --j)
        if (band_sign_.count(j)) { known = j; break; }
    if (m < 0)
      for (int j = m + 1; j <= 0; ++j)
        if (band_sign_.count(j)) { known = j; break; }
    while (known != m) {
      const int next = known + (m > known ? 1 : -1);
      band_sign_[next] = propagate_sign(known, next);
      known = next;
    }
    return band_sign_.at(m);
  }

  // Canonical root at a real point inside a band, where Delta is real with
  // |Delta| < 2. Built as sign * i * sqrt(4 - Delta^2) so that round-off in
  // the imaginary part of Delta cannot flip the principal branch.
  cplx canonical_at_real(double x) const {
    const int m = band_of(x);
    const cplx d = delta(cplx{x, 0.0});
    const double under = std::max(4.0 - d.real() * d.real(), 0.0);
    return band_sign(m) * (imag_unit * std::sqrt(under));
  }

  // Canonical root at a complex point, tracked from the real anchor of the
  // band right of gap `anchor_gap`.
  cplx canonical_at(cplx z, int anchor_gap) const {
    if (std::abs(z.imag()) < 1e-13) return canonical_at_real(z.real());
    const double a = band_anchor(anchor_gap);
    const cplx v0 = canonical_at_real(a);
    const double lift = std::max({1.2 * discs_.at(anchor_gap).radius, std::abs(z.imag())});
    const double side = z.imag() >= 0.0 ? 1.0 : -1.0;
    const std::vector<cplx> path{cplx{a, 0.0}, cplx{a, side * lift},
                                 cplx{z.real(), side * lift}, z};
    return track_path(path, v0);
  }

  // Local formula F = -i n pi + log((-1)^n (Delta + root)/2), principal log.
  static cplx f_local(int n, cplx delta, cplx root) {
    const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
    return -imag_unit * (double(n) * std::numbers::pi) +
           std::log(sgn * 0.5 * (delta + root));
  }

  // F at a real point in a band (used for asymptotic sampling).
  cplx f_at_real(double x) const {
    const cplx d = delta(cplx{x, 0.0});
    const cplx root = canonical_at_real(x);
    return f_local(nearest_gap(x), d, root);
  }

  // F at a complex point in the annulus of gap `near_gap`.
  cplx f_at(cplx z, int near_gap) const {
    reject_inside_gap(z, near_gap);
    const cplx d = delta(z);
    const cplx root = canonical_at(z, z.real() >= gap_center(near_gap) ? near_gap
                                                                       : near_gap - 1);
    return f_local(near_gap, d, root);
  }

  // Quadrature circle around gap n: encloses the gap and stays strictly
  // inside the isolating disc. `radius_fraction` positions the circle within
  // the annulus between the gap and the disc boundary.
  Contour contour_for(int n, int n_points = 0,
                      double radius_fraction = kContourRadiusFraction) const {
    const auto it = discs_.find(n);
    if (it == discs_.end())
      throw std::invalid_argument("contour: no isolating disc for gap " + std::to_string(n));
    if (radius_fraction <= 0.0 || radius_fraction >= 1.0)
      throw std::invalid_argument("contour: radius must stay inside the isolating disc");
    const SpectrumEntry& e = table_.entries.at(n);
    const double margin = it->second.radius - 0.5 * e.gap;
    const double radius = 0.5 * e.gap + radius_fraction * margin;
    if (margin <= 0.0)
      throw std::runtime_error("contour: circle around gap " + std::to_string(n) +
                               " would intersect the gap");
    Contour c;
    c.center = it->second.center;
    c.radius = radius;
    c.n_points = n_points > 0 ? n_points
                              : (radius < 0.05 ? kContourPointsTight : kContourPoints);
    c.encloses_origin = std::abs(c.center) < c.radius;
    if (n != 0 && c.encloses_origin)
      throw std::runtime_error("contour: circuit around gap " + std::to_string(n) +
                               " must not enclose the origin");
    return c;
  }

  struct ContourData {
    Contour contour;
    std::vector<cplx> nodes, delta, root, f;
  };

  // Discriminant, canonical root, and F on the quadrature circle around gap
  // n. The root starts from the real band value at angle 0 and is tracked
  // around the circle; the loop must close on itself.
  const ContourData& contour_data(int n, int n_points = 0,
                                  double radius_fraction = kContourRadiusFraction) const {
    const Contour c = contour_for(n, n_points, radius_fraction);
    const std::tuple<int, int, long> key{n, c.n_points,
                                         std::lround(radius_fraction * 1e6)};
    {
      std::lock_guard<std::mutex> lock(contour_mutex_);
      auto it = contour_cache_.find(key);
      if (it != contour_cache_.end()) return it->second;
    }
    ContourData data;
    data.contour = c;
    const int q = c.n_points;
    data.nodes.resize(q);
    data.delta.resize(q);
    data.root.resize(q);
    data.f.resize(q);
    for (int j = 0; j < q; ++j) {
      data.nodes[j] = c.center + c.radius * std::polar(1.0, two_pi * double(j) / double(q));
      data.delta[j] = delta(data.nodes[j]);
    }
    // angle-0 node is real and sits in the band right of gap n
    cplx v = canonical_at_real(data.nodes[0].real());
    data.root[0] = v;
    for (int j = 1; j < q; ++j) {
      const cplx s = std::sqrt(data.delta[j] * data.delta[j] - 4.0);
      v = pick_branch(v, s, "contour around gap " + std::to_string(n));
      data.root[j] = v;
    }
    const cplx s_close = std::sqrt(data.delta[0] * data.delta[0] - 4.0);
    const cplx v_close = pick_branch(v, s_close, "contour closure");
    if (std::abs(v_close - data.root[0]) >
        1e-6 * std::max(1.0, std::abs(data.root[0])))
      throw std::runtime_error("contour: canonical root failed to close around gap " +
                               std::to_string(n));
    for (int j = 0; j < q; ++j) data.f[j] = f_local(n, data.delta[j], data.root[j]);

    std::lock_guard<std::mutex> lock(contour_mutex_);
    return contour_cache_.emplace(key, std::move(data)).first->second;
  }

  // -(coefficient) * closed-contour integral of z^power * F(z).
  ActionRecord action(int n, int k, int power, double coefficient, char kind,
                      int n_points = 0,
                      double radius_fraction = kContourRadiusFraction) const {
    const ContourData& data = contour_data(n, n_points, radius_fraction);
    const int q = data.contour.n_points;
    auto partial = [&](int stride) {
      cplx acc{0.0, 0.0};
      for (int j = 0; j < q; j += stride) {
        const cplx tangent =
            imag_unit * (data.nodes[j] - data.contour.center);  // r i e^{i theta}
        acc += ipow(data.nodes[j], power) * data.f[j] * tangent;
      }
      return acc * (two_pi * double(stride) / double(q));
    };
    const cplx full = coefficient * partial(1);
    const cplx half = coefficient * partial(2);
    return {n, k, full, std::abs(full - half), kind};
  }

 private:
  static SpectrumTable make_table_zs(const System& sys, int n_spec) {
    if constexpr (is_zs) return zs_spectrum(sys, n_spec);
    throw std::logic_error("unreachable");
  }
  static SpectrumTable make_table_hill(const System& sys, int n_spec) {
    if constexpr (!is_zs) return hill_spectrum(sys, n_spec);
    throw std::logic_error("unreachable");
  }

  void check_band(int m) const {
    if (m < min_band() || m > max_band())
      throw std::invalid_argument("branch atlas: band " + std::to_string(m) +
                                  " outside tabulated range");
  }

  double gap_center(int n) const {
    const auto& e = table_.entries.at(n);
    return 0.5 * (e.lower + e.upper);
  }

  int nearest_gap(double x) const {
    if constexpr (is_zs) {
      return int(std::lround(x / std::numbers::pi));
    } else {
      if (x <= 0.0) return 0;
      return int(std::lround(std::sqrt(x) / std::numbers::pi));
    }
  }

  void reject_inside_gap(cplx z, int near_gap) const {
    const auto& e = table_.entries.at(near_gap);
    if (std::abs(z.imag()) < 1e-12 && z.real() >= e.lower - 1e-12 &&
        z.real() <= e.upper + 1e-12)
      throw std::invalid_argument("F: evaluation point lies inside gap " +
                                  std::to_string(near_gap));
  }

  // Continuity choice between the two square roots.
  cplx pick_branch(cplx prev, cplx s, const std::string& where) const {
    const double dp = std::abs(s - prev);
    const double dm = std::abs(-s - prev);
    const cplx chosen = dp <= dm ? s : -s;
    const double chosen_d = std::min(dp, dm);
    const double other_d = std::max(dp, dm);
    if (chosen_d > 0.8 * other_d && other_d > 1e-12)
      throw std::runtime_error("canonical root: branch tracking ambiguous on " + where);
    return chosen;
  }

  cplx track_leg(cplx z0, cplx z1, cplx v, int pts) const {
    for (int i = 1; i <= pts; ++i) {
      const cplx z = z0 + (z1 - z0) * (double(i) / double(pts));
      const cplx s = std::sqrt(delta_sq_m4(z));
      v = pick_branch(v, s, "tracking leg");
    }
    return v;
  }

  cplx track_path(const std::vector<cplx>& path, cplx v0) const {
    for (int attempt = 0; attempt < 2; ++attempt) {
      const int pts = attempt == 0 ? 8 : 32;  // auto-refine once, then fail loudly
      try {
        cplx v = v0;
        for (std::size_t i = 0; i + 1 < path.size(); ++i)
          v = track_leg(path[i], path[i + 1], v, pts);
        return v;
      } catch (const std::runtime_error&) {
        if (attempt == 1) throw;
      }
    }
    throw std::logic_error("unreachable");
  }

  // Sign of the canonical root on band `to`, continued from band `from`
  // through an upper half-plane arc over the gap between them.
  cplx stable_band_root(double x) const {  // +i sqrt(4 - Delta^2), Delta real
    const cplx d = delta(cplx{x, 0.0});
    return imag_unit * std::sqrt(std::max(4.0 - d.real() * d.real(), 0.0));
  }

  double propagate_sign(int from, int to) const {
    const int gap = std::max(from, to);  // gap crossed by the arc
    const double a_from = band_anchor(from);
    const double a_to = band_anchor(to);
    const double lift = std::max(1.2 * discs_.at(gap).radius, 0.05 * std::abs(a_to - a_from));
    const std::vector<cplx> path{cplx{a_from, 0.0}, cplx{a_from, lift},
                                 cplx{a_to, lift}, cplx{a_to, 0.0}};
    const cplx v0 = band_sign_.at(from) * stable_band_root(a_from);
    const cplx v1 = track_path(path, v0);
    const cplx ratio = v1 / stable_band_root(a_to);
    const double sign = ratio.real() >= 0.0 ? 1.0 : -1.0;
    if (std::abs(ratio - cplx{sign, 0.0}) > 1e-3)
      throw std::runtime_error("canonical root: sign propagation failed between bands " +
                               std::to_string(from) + " and " + std::to_string(to));
    return sign;
  }

  const System& sys_;
  SpectrumTable table_;
  std::map<int, Disc> discs_;
  mutable std::mutex mutex_;
  mutable std::map<int, double> band_sign_;
  mutable std::mutex contour_mutex_;
  mutable std::map<std::tuple<int, int, long>, ContourData> contour_cache_;
};

using ZsAtlas = BranchAtlas<ZsSystem>;
using HillAtlas = BranchAtlas<HillSystem>;

// I_{n,k} = -(1/pi) contour integral of lambda^{k-1} F(lambda).
inline ActionRecord action_i(const ZsAtlas& atlas, int n, int k, int n_points = 0,
                             double radius_fraction = kContourRadiusFraction) {
  return atlas.action(n, k, k - 1, -1.0 / std::numbers::pi, 'I', n_points,
                      radius_fraction);
}

// J_{n,k} = -(1/4pi) contour integral of mu^{k-2} F_hill(mu), n >= 1.
inline ActionRecord action_j(const HillAtlas& atlas, int n, int k, int n_points = 0,
                             double radius_fraction = kContourRadiusFraction) {
  if (n < 1) throw std::invalid_argument("action_j: gap index must be >= 1");
  return atlas.action(n, k, k - 2, -0.25 / std::numbers::pi, 'J', n_points,
                      radius_fraction);
}

inline cplx canonical_root(const Potential& phi, cplx lambda, int branch_anchor,
                           int n_spec = 0) {
  const ZsSystem sys(phi);
  const int reach = std::max({std::abs(branch_anchor) + 1,
                              int(std::ceil(std::abs(lambda) / std::numbers::pi)) + 1, n_spec});
  const ZsAtlas atlas(sys, reach);
  return atlas.canonical_at(lambda, branch_anchor);
}

inline cplx f_value(const Potential& phi, cplx lambda, int near_gap) {
  const ZsSystem sys(phi);
  const int reach = std::max(std::abs(near_gap) + 1,
                             int(std::ceil(std::abs(lambda) / std::numbers::pi)) + 1);
  const ZsAtlas atlas(sys, reach);
  return atlas.f_at(lambda, near_gap);
}

inline cplx f_mkdv_value(const GridFunction& u, cplx mu, int near_gap) {
  const HillSystem sys = HillSystem::from_miura(u);
  const int reach =
      std::max(near_gap + 1,
               int(std::ceil(std::sqrt(std::abs(mu)) / std::numbers::pi)) + 1);
  const HillAtlas atlas(sys, reach);
  return atlas.f_at(mu, near_gap);
}

inline ActionRecord action_i(const Potential& phi, int n, int k) {
  const ZsSystem sys(phi);
  const ZsAtlas atlas(sys, std::abs(n) + 1);
  return action_i(atlas, n, k);
}

inline ActionRecord action_j(const GridFunction& u, int n, int k) {
  const HillSystem sys = HillSystem::from_miura(u);
  const HillAtlas atlas(sys, n + 1);
  return action_j(atlas, n, k);
}

// | Delta_hill(0, u) - 2 cosh([u]) |.
inline double mean_identity_residual(const GridFunction& u) {
  const cplx d0 = hill_delta(u, cplx{0.0, 0.0}).value;
  return std::abs(d0 - 2.0 * std::cosh(u.mean()));
}

struct AsymptoticFit {
  std::vector<cplx> coefficients;  // estimates of S_1 .. S_max_n
  double condition = 1.0;
};

// Least-squares fit of F(lambda) = -i lambda + i sum_n S_n / (2 lambda)^n
// from samples at large real lambda. Modified Gram-Schmidt QR.
inline AsymptoticFit fit_asymptotic_hamiltonians(const std::vector<cplx>& f_values,
                                                 const std::vector<double>& lambdas,
                                                 int max_n) {
  const std::size_t rows = lambdas.size();
  const std::size_t cols = std::size_t(max_n);
  if (rows < cols) throw std::invalid_argument("asymptotic fit: need at least max_n samples");
  std::vector<std::vector<cplx>> a(cols, std::vector<cplx>(rows));
  std::vector<cplx> rhs(rows);
  for (std::size_t s = 0; s < rows; ++s) {
    rhs[s] = -imag_unit * (f_values[s] + imag_unit * lambdas[s]);
    cplx p{1.0, 0.0};
    for (std::size_t j = 0; j < cols; ++j) {
      p /= 2.0 * lambdas[s];
      a[j][s] = p;
    }
  }
  std::vector<std::vector<cplx>> r(cols, std::vector<cplx>(cols, cplx{0.0, 0.0}));
  for (std::size_t j = 0; j < cols; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      cplx dot{0.0, 0.0};
      for (std::size_t s = 0; s < rows; ++s) dot += std::conj(a[i][s]) * a[j][s];
      r[i][j] = dot;
      for (std::size_t s = 0; s < rows; ++s) a[j][s] -= dot * a[i][s];
    }
    double nrm = 0.0;
    for (std::size_t s = 0; s < rows; ++s) nrm += std::norm(a[j][s]);
    nrm = std::sqrt(nrm);
    r[j][j] = nrm;
    if (nrm < 1e-300)
      throw std::runtime_error("asymptotic fit: rank-deficient sample matrix");
    for (std::size_t s = 0; s < rows; ++s) a[j][s] /= nrm;
  }
  double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < cols; ++j) {
    rmax = std::max(rmax, std::abs(r[j][j]));
    rmin = std::min(rmin, std::abs(r[j][j]));
  }
  const double condition = rmax / rmin;
  if (condition > 1e12)
    throw std::runtime_error("asymptotic fit: ill-conditioned (condition number " +
                             std::to_string(condition) + ")");
  std::vector<cplx> qtb(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    cplx dot{0.0, 0.0};
    for (std::size_t s = 0; s < rows; ++s) dot += std::conj(a[j][s]) * rhs[s];
    qtb[j] = dot;
  }
  std::vector<cplx> x(cols);
  for (int j = int(cols) - 1; j >= 0; --j) {
    cplx acc = qtb[j];
    for (std::size_t i = j + 1; i < cols; ++i) acc -= r[j][i] * x[i];
    x[j] = acc / r[j][j];
  }
  return {std::move(x), condition};
}

inline AsymptoticFit asymptotic_hamiltonians(const Potential& phi, int max_n,
                                             const std::vector<double>& lambda_samples,
                                             int oversample = kDefaultOversample) {
  if (lambda_samples.empty())
    throw std::invalid_argument("asymptotic_hamiltonians: no sample points");
  double lam_max = 0.0;
  for (double l : lambda_samples) {
    if (l <= 0.0) throw std::invalid_argument("asymptotic_hamiltonians: samples must be > 0");
    lam_max = std::max(lam_max, l);
  }
  const ZsSystem sys(phi, oversample);
  const ZsAtlas atlas(sys, int(std::ceil(lam_max / std::numbers::pi)) + 1);
  std::vector<cplx> f(lambda_samples.size());
  parallel_for(lambda_samples.size(),
               [&](std::size_t i) { f[i] = atlas.f_at_real(lambda_samples[i]); });
  return fit_asymptotic_hamiltonians(f, lambda_samples, max_n);
}

// Partial trace-formula sum: sum of I_{n,1} over |n| <= n_max.
inline cplx action_sum(const ZsAtlas& atlas, int n_max) {
  std::vector<cplx> vals(2 * std::size_t(n_max) + 1);
  parallel_for(vals.size(), [&](std::size_t i) {
    vals[i] = action_i(atlas, int(i) - n_max, 1).value;
  });
  cplx acc{0.0, 0.0};
  for (const auto& v : vals) acc += v;
  return acc;
}

}  // namespace zslab
