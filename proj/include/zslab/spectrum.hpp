// Periodic spectra of ZS and Hill operators for real-type potentials:
// eigenvalue pairs from the zero set of Delta^2 - 4, gap lengths, and
// isolating discs for contour integration.
#pragma once

#include <functional>
#include <iterator>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "zslab/discriminant.hpp"
#include "zslab/parallel.hpp"

namespace zslab {

struct SpectrumEntry {
  double lower = 0.0;   // lambda_n^- (or mu_n^-)
  double upper = 0.0;   // lambda_n^+ (or mu_n^+)
  double gap = 0.0;
  bool double_root = false;
};

struct Disc {
  double center = 0.0;
  double radius = 0.0;
};

struct SpectrumTable {
  OperatorKind kind = OperatorKind::zs;
  int n_spec = 0;
  std::map<int, SpectrumEntry> entries;
};

namespace detail {

inline constexpr double kWindowMargin = 1e-3;
inline constexpr double kDoubleRootTol = 1e-10;
inline constexpr int kScanPoints = 64;
inline constexpr int kPolishBoost = 4;  // step refinement for root polishing

// Real probe of s*Delta - 2 and its slope on the real axis. Scanning runs at
// the base step count; polishing runs with kPolishBoost times more steps so
// that nearly closed gaps resolve cleanly.
struct DiscriminantProbe {
  std::function<DiscriminantSample(double, bool, bool)> sample;  // (x, jet, boosted)
  double sign = 1.0;

  double value(double x, bool boosted = false) const {
    const auto s = sample(x, false, boosted);
    check_real(s.value);
    return sign * s.value.real() - 2.0;
  }
  std::pair<double, double> value_and_slope(double x) const {
    const auto s = sample(x, true, true);
    check_real(s.value);
    return {sign * s.value.real() - 2.0, sign * s.dvalue.real()};
  }
  double slope(double x) const { return value_and_slope(x).second; }

  static void check_real(cplx v) {
    if (std::abs(v.imag()) > 1e-6 * std::max(1.0, std::abs(v)))
      throw std::runtime_error(
          "spectrum: discriminant not real on the real axis (potential class violated)");
  }
};

// Bisection to moderate width at base accuracy, then bisection and a
// safeguarded Newton polish at boosted accuracy.
inline double refine_root(const DiscriminantProbe& probe, double a, double b, double fa) {
  const double scale = std::max(1.0, std::abs(a) + std::abs(b));
  while (b - a > 1e-3 * scale) {
    const double mid = 0.5 * (a + b);
    const double fm = probe.value(mid, false);
    if ((fm > 0.0) == (fa > 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  fa = probe.value(a, true);
  for (int i = 0; i < 10 && b - a > 1e-7 * scale; ++i) {
    const double mid = 0.5 * (a + b);
    const double fm = probe.value(mid, true);
    if ((fm > 0.0) == (fa > 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  double x = 0.5 * (a + b);
  for (int i = 0; i < 12; ++i) {
    const auto [fx, dfx] = probe.value_and_slope(x);
    if (std::abs(fx) <= 1e-13) return x;
    if ((fx > 0.0) == (fa > 0.0)) a = x; else b = x;
    double next = dfx != 0.0 ? x - fx / dfx : 0.5 * (a + b);
    if (!(next >= a && next <= b)) next = 0.5 * (a + b);
    if (std::abs(next - x) < 1e-14 * scale) return next;
    x = next;
  }
  return x;
}

// Interior maximum of f by ternary search plus a parabolic vertex fit.
inline double locate_maximum(const DiscriminantProbe& probe, double lo, double hi) {
  double a = lo, b = hi;
  for (int i = 0; i < 30; ++i) {
    const double m1 = a + (b - a) / 3.0;
    const double m2 = b - (b - a) / 3.0;
    if (probe.value(m1, false) < probe.value(m2, false))
      a = m1;
    else
      b = m2;
  }
  const double h = (b - a) / 2.0;
  const double xm = 0.5 * (a + b);
  const double f0 = probe.value(xm - h, false);
  const double f1 = probe.value(xm, false);
  const double f2 = probe.value(xm + h, false);
  const double denom = f0 - 2.0 * f1 + f2;
  if (std::abs(denom) < 1e-300) return xm;
  return xm + 0.5 * h * (f0 - f2) / denom;
}

// Secant iteration on the slope, boosted accuracy; polishes a double root.
inline double polish_critical(const DiscriminantProbe& probe, double x0) {
  double x1 = x0 + 1e-5 * std::max(1.0, std::abs(x0));
  double s0 = probe.slope(x0);
  double s1 = probe.slope(x1);
  for (int i = 0; i < 6; ++i) {
    if (s1 == s0) break;
    const double x2 = x1 - s1 * (x1 - x0) / (s1 - s0);
    x0 = x1;
    s0 = s1;
    x1 = x2;
    s1 = probe.slope(x1);
    if (std::abs(x1 - x0) < 1e-14 * std::max(1.0, std::abs(x1))) break;
  }
  return x1;
}

inline SpectrumEntry solve_window(const DiscriminantProbe& probe, double lo, double hi,
                                  int index, bool single_root_expected) {
  std::vector<double> xs(kScanPoints), fs(kScanPoints);
  for (int i = 0; i < kScanPoints; ++i) {
    xs[i] = lo + (hi - lo) * double(i) / double(kScanPoints - 1);
    fs[i] = probe.value(xs[i], false);
  }
  std::vector<std::pair<int, int>> brackets;
  for (int i = 0; i + 1 < kScanPoints; ++i)
    if ((fs[i] > 0.0) != (fs[i + 1] > 0.0)) brackets.emplace_back(i, i + 1);

  auto fail = [&](const std::string& why) -> SpectrumEntry {
    throw std::runtime_error("spectrum: root bracketing failure in window n=" +
                             std::to_string(index) + " [" + std::to_string(lo) + ", " +
                             std::to_string(hi) + "]: " + why);
  };

  if (single_root_expected) {
    if (brackets.size() != 1) fail("expected a single eigenvalue");
    const double r =
        refine_root(probe, xs[brackets[0].first], xs[brackets[0].second], fs[brackets[0].first]);
    return {r, r, 0.0, false};
  }

  if (brackets.size() == 2) {
    const double r0 =
        refine_root(probe, xs[brackets[0].first], xs[brackets[0].second], fs[brackets[0].first]);
    const double r1 =
        refine_root(probe, xs[brackets[1].first], xs[brackets[1].second], fs[brackets[1].first]);
    return {std::min(r0, r1), std::max(r0, r1), std::abs(r1 - r0), false};
  }

  if (brackets.empty()) {
    // Tiny or closed gap: the dip is narrower than the scan. Locate the
    // interior critical point and classify by the value of Delta^2 - 4 there.
    const double crit = locate_maximum(probe, lo, hi);
    if (!(crit > lo && crit < hi)) fail("no sign change and no interior critical point");
    const double fc = probe.value(crit, true);
    const double delta_sq_gap = std::abs(fc) * std::abs(fc + 4.0);  // |Delta^2 - 4|
    if (delta_sq_gap <= kDoubleRootTol) {
      const double r = polish_critical(probe, crit);
      return {r, r, 0.0, true};
    }
    if (fc > 0.0) {
      const double r0 = refine_root(probe, lo, crit, probe.value(lo, false));
      const double r1 = refine_root(probe, crit, hi, fc);
      return {std::min(r0, r1), std::max(r0, r1), std::abs(r1 - r0), false};
    }
    fail("discriminant never reaches the eigenvalue level in this window");
  }
  fail("unexpected number of sign changes: " + std::to_string(brackets.size()));
  return {};
}

}  // namespace detail

inline std::pair<double, double> zs_window(int n) {
  const double pi = std::numbers::pi;
  return {double(n) * pi - pi / 2 + detail::kWindowMargin,
          double(n) * pi + pi / 2 - detail::kWindowMargin};
}

inline std::pair<double, double> hill_window(int n) {
  const double pi = std::numbers::pi;
  if (n == 0) {
    const double hi = (pi / 2 - detail::kWindowMargin);
    return {-0.75, hi * hi};
  }
  const double lo = (double(n) - 0.5) * pi + detail::kWindowMargin;
  const double hi = (double(n) + 0.5) * pi - detail::kWindowMargin;
  return {lo * lo, hi * hi};
}

inline SpectrumTable zs_spectrum(const ZsSystem& sys, int n_spec) {
  if (!sys.potential().real_type())
    throw std::invalid_argument(
        std::string("zs_spectrum: potential class ") + to_string(sys.potential().class_tag) +
        " rejected; a real periodic spectrum needs class H_r or a real diagonal potential");
  SpectrumTable table;
  table.kind = OperatorKind::zs;
  table.n_spec = n_spec;
  std::vector<SpectrumEntry> slots(2 * std::size_t(n_spec) + 1);
  parallel_for(slots.size(), [&](std::size_t i) {
    const int n = int(i) - n_spec;
    detail::DiscriminantProbe probe{
        [&sys](double x, bool jet, bool boosted) {
          const cplx z{x, 0.0};
          const int steps = sys.steps_for(z) * (boosted ? detail::kPolishBoost : 1);
          const TransferJet tj = sys.fundamental_steps(z, 1.0, jet, steps);
          return DiscriminantSample{z, tj.m.trace(), tj.dm.trace(), OperatorKind::zs};
        },
        n % 2 == 0 ? 1.0 : -1.0};
    const auto [lo, hi] = zs_window(n);
    slots[i] = detail::solve_window(probe, lo, hi, n, false);
  });
  for (std::size_t i = 0; i < slots.size(); ++i) table.entries[int(i) - n_spec] = slots[i];
  for (int n = -n_spec; n < n_spec; ++n) {
    if (table.entries[n].upper > table.entries[n + 1].lower + 1e-9)
      throw std::runtime_error("zs_spectrum: lexicographic ordering violated at n=" +
                               std::to_string(n));
  }
  return table;
}

inline SpectrumTable hill_spectrum(const HillSystem& sys, int n_spec) {
  if (!sys.q().is_real(1e-8))
    throw std::invalid_argument("hill_spectrum: potential must be real-valued");
  SpectrumTable table;
  table.kind = OperatorKind::hill;
  table.n_spec = n_spec;
  std::vector<SpectrumEntry> slots(std::size_t(n_spec) + 1);
  parallel_for(slots.size(), [&](std::size_t i) {
    const int n = int(i);
    detail::DiscriminantProbe probe{
        [&sys](double x, bool jet, bool boosted) {
          const cplx z{x, 0.0};
          const int steps = sys.steps_for(z) * (boosted ? detail::kPolishBoost : 1);
          const TransferJet tj = sys.fundamental_steps(z, 1.0, jet, steps);
          return DiscriminantSample{z, tj.m.trace(), tj.dm.trace(), OperatorKind::hill};
        },
        n % 2 == 0 ? 1.0 : -1.0};
    const auto [lo, hi] = hill_window(n);
    slots[i] = detail::solve_window(probe, lo, hi, n, n == 0);
  });
  for (std::size_t i = 0; i < slots.size(); ++i) table.entries[int(i)] = slots[i];
  for (int n = 0; n < n_spec; ++n) {
    if (table.entries[n].upper > table.entries[n + 1].lower + 1e-9)
      throw std::runtime_error("hill_spectrum: lexicographic ordering violated at n=" +
                               std::to_string(n));
  }
  return table;
}

inline SpectrumTable hill_spectrum(const GridFunction& u, int n_spec,
                                   int oversample = kDefaultOversample) {
  if (!u.is_real(1e-8))
    throw std::invalid_argument("hill_spectrum: potential must be real-valued");
  const HillSystem sys = HillSystem::from_miura(u, oversample);
  return hill_spectrum(sys, n_spec);
}

// Pairwise disjoint discs, one per gap: centered at the gap midpoint, with
// half the gap plus a margin of min(pi/4, 0.45 * clearance to the
// neighbours). Closed gaps reproduce the asymptotic pi/4 discs.
inline std::map<int, Disc> isolating_discs(const SpectrumTable& table) {
  const double pi = std::numbers::pi;
  auto asymptotic_center = [&](int n) {
    return table.kind == OperatorKind::zs ? double(n) * pi : double(n) * double(n) * pi * pi;
  };
  std::map<int, Disc> discs;
  for (const auto& [n, e] : table.entries) {
    const auto prev = table.entries.find(n - 1);
    const auto next = table.entries.find(n + 1);
    double d_left, d_right;
    if (table.kind == OperatorKind::hill && n == 0) {
      d_left = std::numeric_limits<double>::infinity();  // half-line cut starts here
    } else {
      d_left = prev != table.entries.end() ? e.lower - prev->second.upper
                                           : e.lower - asymptotic_center(n - 1);
    }
    d_right = next != table.entries.end() ? next->second.lower - e.upper
                                          : asymptotic_center(n + 1) - e.upper;
    if (d_left <= 0.0 || d_right <= 0.0)
      throw std::runtime_error("isolating_discs: overlapping gaps at n=" + std::to_string(n));
    const double clearance = std::min(d_left, d_right);
    const double radius = 0.5 * e.gap + std::min(pi / 4.0, 0.45 * clearance);
    discs[n] = {0.5 * (e.lower + e.upper), radius};
  }
  for (auto it = discs.begin(); it != discs.end(); ++it) {
    auto nx = std::next(it);
    if (nx == discs.end()) break;
    if (nx->second.center - it->second.center <=
        it->second.radius + nx->second.radius)
      throw std::runtime_error("isolating_discs: discs overlap between n=" +
                               std::to_string(it->first) + " and n=" +
                               std::to_string(nx->first));
  }
  return discs;
}

}  // namespace zslab
