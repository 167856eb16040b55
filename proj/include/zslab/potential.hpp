// Two-component potentials (phi_-, phi_+), their reality classes, the
// symmetry transforms P, R_alpha, T, and the Miura map.
#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "zslab/fourier.hpp"

namespace zslab {

enum class RealityClass { generic, h_r, h_i, e_r, e_i, diagonal };

inline const char* to_string(RealityClass c) {
  switch (c) {
    case RealityClass::generic: return "generic";
    case RealityClass::h_r: return "H_r";
    case RealityClass::h_i: return "H_i";
    case RealityClass::e_r: return "E_r";
    case RealityClass::e_i: return "E_i";
    case RealityClass::diagonal: return "diagonal";
  }
  return "?";
}

inline constexpr double kRealityTol = 1e-10;

inline RealityClass classify(const GridFunction& minus, const GridFunction& plus,
                             double tol = kRealityTol) {
  const bool diag = max_distance(plus, minus) <= tol;
  if (diag) {
    if (minus.is_real(tol)) return RealityClass::e_r;
    if ((imag_unit * minus).is_real(tol)) return RealityClass::e_i;
    return RealityClass::diagonal;
  }
  if (max_distance(plus, minus.conjugated()) <= tol) return RealityClass::h_r;
  if (max_distance(plus, -minus.conjugated()) <= tol) return RealityClass::h_i;
  return RealityClass::generic;
}

struct Potential {
  GridFunction minus;  // phi_-
  GridFunction plus;   // phi_+
  RealityClass class_tag = RealityClass::generic;

  static Potential make(GridFunction m, GridFunction p) {
    if (m.n_modes() != p.n_modes())
      throw std::invalid_argument("Potential: component mode counts differ");
    Potential phi;
    phi.class_tag = classify(m, p);
    phi.minus = std::move(m);
    phi.plus = std::move(p);
    return phi;
  }

  static Potential diagonal(const GridFunction& u) { return make(u, u); }

  int n_modes() const { return minus.n_modes(); }

  bool real_type() const {
    return class_tag == RealityClass::h_r || class_tag == RealityClass::e_r;
  }
};

enum class TransformKind { p, r, t };

inline Potential transform_p(const Potential& phi) {
  return Potential::make(phi.plus, phi.minus);
}

inline Potential transform_r(const Potential& phi, double alpha) {
  return Potential::make(std::polar(1.0, alpha) * phi.minus,
                         std::polar(1.0, -alpha) * phi.plus);
}

inline Potential transform_t(const Potential& phi) {
  return Potential::make(phi.minus.reflected(), phi.plus.reflected());
}

inline Potential transform(const Potential& phi, TransformKind g, double alpha = 0.0) {
  switch (g) {
    case TransformKind::p: return transform_p(phi);
    case TransformKind::r: return transform_r(phi, alpha);
    case TransformKind::t: return transform_t(phi);
  }
  throw std::invalid_argument("transform: unknown kind");
}

// u -> u_x + u^2 with the product computed alias-free.
inline GridFunction miura(const GridFunction& u) {
  return u.derivative(1) + mul(u, u);
}

inline cplx mean(const GridFunction& u) { return u.mean(); }

// If phi_+ = e^{i alpha} phi_- for some real alpha (i.e. P phi = R_alpha phi),
// return alpha; otherwise nullopt.
inline std::optional<double> phase_between_components(const Potential& phi,
                                                      double tol = 1e-9) {
  const auto cm = phi.minus.coeffs();
  const auto cp = phi.plus.coeffs();
  std::size_t lead = 0;
  double best = 0.0;
  for (std::size_t m = 0; m < cm.size(); ++m) {
    if (std::abs(cm[m]) > best) {
      best = std::abs(cm[m]);
      lead = m;
    }
  }
  if (best <= tol) {  // zero potential: any alpha works
    return phi.plus.sup_norm() <= tol ? std::optional<double>(0.0) : std::nullopt;
  }
  const cplx ratio = cp[lead] / cm[lead];
  if (std::abs(std::abs(ratio) - 1.0) > 1e-6) return std::nullopt;
  const double alpha = std::arg(ratio);
  const double mismatch =
      max_distance(phi.plus, std::polar(1.0, alpha) * phi.minus);
  if (mismatch > tol * std::max(1.0, phi.minus.sup_norm())) return std::nullopt;
  return alpha;
}

// T phi = +phi or -phi detection; returns +1/-1, or 0 if neither.
inline int reflection_parity(const Potential& phi, double tol = 1e-9) {
  const Potential tphi = transform_t(phi);
  const double scale = std::max(1.0, phi.minus.sup_norm() + phi.plus.sup_norm());
  const double d_plus = std::max(max_distance(tphi.minus, phi.minus),
                                 max_distance(tphi.plus, phi.plus));
  const double d_minus = std::max(max_distance(tphi.minus, -phi.minus),
                                  max_distance(tphi.plus, -phi.plus));
  if (d_plus <= tol * scale) return +1;
  if (d_minus <= tol * scale) return -1;
  return 0;
}

}  // namespace zslab
