// Closed-form hierarchy Hamiltonians K_1, K_2 (Gardner side) and S_1..S_4
// (two-component side), their L^2-gradients and Hamiltonian vector fields,
// the diagonal restriction, and residuals of the identities tying the two
// hierarchies together.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "zslab/potential.hpp"

namespace zslab {

enum class HamiltonianFamily { k, s };

struct HamiltonianId {
  HamiltonianFamily family = HamiltonianFamily::k;
  int index = 1;

  static HamiltonianId k(int m) {
    if (m < 1 || m > 2) throw std::invalid_argument("K index must be 1 or 2");
    return {HamiltonianFamily::k, m};
  }
  static HamiltonianId s(int k) {
    if (k < 1 || k > 4) throw std::invalid_argument("S index must be 1..4");
    return {HamiltonianFamily::s, k};
  }

  std::string name() const {
    return (family == HamiltonianFamily::k ? "K" : "S") + std::to_string(index);
  }
};

// Components of a two-component field paired with (phi_-, phi_+).
struct PairField {
  GridFunction minus, plus;

  static PairField diagonal(const GridFunction& u) { return {u, u}; }
  double sup_norm() const { return std::max(minus.sup_norm(), plus.sup_norm()); }
};

inline double max_distance(const PairField& a, const PairField& b) {
  return std::max(max_distance(a.minus, b.minus), max_distance(a.plus, b.plus));
}

// --- Hamiltonian values -----------------------------------------------------

inline cplx eval_k(int m, const GridFunction& u) {
  switch (m) {
    case 1: return 0.5 * bilinear_integral(u, u);
    case 2: {
      const GridFunction ux = u.derivative(1);
      const GridFunction u2 = mul(u, u);
      return 0.5 * (bilinear_integral(ux, ux) + bilinear_integral(u2, u2));
    }
  }
  throw std::invalid_argument("eval_k: unsupported index");
}

inline cplx eval_s(int k, const Potential& phi) {
  const GridFunction& pm = phi.minus;
  const GridFunction& pp = phi.plus;
  switch (k) {
    case 1: return bilinear_integral(pm, pp);
    case 2:
      return 0.5 * imag_unit *
             (bilinear_integral(pp, pm.derivative(1)) -
              bilinear_integral(pm, pp.derivative(1)));
    case 3: {
      const GridFunction prod = mul(pm, pp);
      return bilinear_integral(pm.derivative(1), pp.derivative(1)) +
             bilinear_integral(prod, prod);
    }
    case 4: {
      const GridFunction pm2 = mul(pm, pm);
      return imag_unit * (bilinear_integral(pm, pp.derivative(3)) -
                          3.0 * bilinear_integral(mul(pm2, pp), pp.derivative(1)));
    }
  }
  throw std::invalid_argument("eval_s: unsupported index");
}

inline cplx eval_hamiltonian(HamiltonianId id, const GridFunction& u) {
  if (id.family != HamiltonianFamily::k)
    throw std::invalid_argument("eval_hamiltonian: " + id.name() +
                                " needs a two-component state");
  return eval_k(id.index, u);
}

inline cplx eval_hamiltonian(HamiltonianId id, const Potential& phi) {
  if (id.family != HamiltonianFamily::s)
    throw std::invalid_argument("eval_hamiltonian: " + id.name() +
                                " needs a one-component state");
  return eval_s(id.index, phi);
}

// --- L^2 gradients ----------------------------------------------------------

inline GridFunction gradient_k(int m, const GridFunction& u) {
  switch (m) {
    case 1: return u;
    case 2: return -u.derivative(2) + 2.0 * mul(mul(u, u), u);
  }
  throw std::invalid_argument("gradient_k: unsupported index");
}

inline PairField gradient_s(int k, const Potential& phi) {
  const GridFunction& pm = phi.minus;
  const GridFunction& pp = phi.plus;
  switch (k) {
    case 1: return {pp, pm};
    case 2: return {-imag_unit * pp.derivative(1), imag_unit * pm.derivative(1)};
    case 3:
      return {-pp.derivative(2) + 2.0 * mul(pm, mul(pp, pp)),
              -pm.derivative(2) + 2.0 * mul(pp, mul(pm, pm))};
    case 4: {
      const GridFunction cross = mul(pm, pp);
      return {imag_unit * (pp.derivative(3) - 6.0 * mul(cross, pp.derivative(1))),
              imag_unit * (-pm.derivative(3) + 6.0 * mul(cross, pm.derivative(1)))};
    }
  }
  throw std::invalid_argument("gradient_s: unsupported index");
}

// --- Hamiltonian vector fields ----------------------------------------------

// Gardner-bracket field Y_G = d/dx grad G.
inline GridFunction vector_field_k(int m, const GridFunction& u) {
  return gradient_k(m, u).derivative(1);
}

// Standard-bracket field X_F = -i J dF, J = [[0,1],[-1,0]].
inline PairField vector_field_s(int k, const Potential& phi) {
  const PairField g = gradient_s(k, phi);
  return {-imag_unit * g.plus, imag_unit * g.minus};
}

inline GridFunction gradient(HamiltonianId id, const GridFunction& u) {
  if (id.family != HamiltonianFamily::k)
    throw std::invalid_argument("gradient: " + id.name() + " needs a two-component state");
  return gradient_k(id.index, u);
}

inline PairField gradient(HamiltonianId id, const Potential& phi) {
  if (id.family != HamiltonianFamily::s)
    throw std::invalid_argument("gradient: " + id.name() + " needs a one-component state");
  return gradient_s(id.index, phi);
}

inline GridFunction vector_field(HamiltonianId id, const GridFunction& u) {
  if (id.family != HamiltonianFamily::k)
    throw std::invalid_argument("vector_field: " + id.name() +
                                " needs a two-component state");
  return vector_field_k(id.index, u);
}

inline PairField vector_field(HamiltonianId id, const Potential& phi) {
  if (id.family != HamiltonianFamily::s)
    throw std::invalid_argument("vector_field: " + id.name() +
                                " needs a one-component state");
  return vector_field_s(id.index, phi);
}

// --- Poisson brackets (desk-scale commutation checks) ------------------------

inline cplx gardner_bracket(const GridFunction& grad_f, const GridFunction& grad_g) {
  return bilinear_integral(grad_f, grad_g.derivative(1));
}

inline cplx standard_bracket(const PairField& grad_f, const PairField& grad_g) {
  return -imag_unit * (bilinear_integral(grad_f.minus, grad_g.plus) -
                       bilinear_integral(grad_f.plus, grad_g.minus));
}

// --- Identity residuals -------------------------------------------------------

// Pointwise transforms on gradient-like pairs.
inline PairField apply_p(const PairField& f) { return {f.plus, f.minus}; }
inline PairField apply_r(const PairField& f, double alpha) {
  return {std::polar(1.0, alpha) * f.minus, std::polar(1.0, -alpha) * f.plus};
}
inline PairField apply_t(const PairField& f) {
  return {f.minus.reflected(), f.plus.reflected()};
}
inline PairField apply_rot(const PairField& f) {  // R = diag(i, -i)
  return {imag_unit * f.minus, -imag_unit * f.plus};
}
inline PairField apply_j(const Potential& phi) {  // J phi = (phi_+, -phi_-)
  return {phi.plus, -phi.minus};
}

struct HierarchyIdentityReport {
  int m = 1;
  // residuals; entries are absent when the required symmetry class is missing
  std::optional<double> sharp_vector_field;    // X_{S_{2m}} restricted vs (Y_{K_m}, Y_{K_m})
  std::optional<double> gradient_recursion;    // -iJ dS_{2m} vs d/dx dS_{2m-1}
  std::optional<double> t_symmetric_recursion; // R dS_{2m} vs d/dx dS_{2m-1} - 2i (int R phi . dS_{2m-1}) J phi
  std::optional<double> hamiltonian_halving;   // K_m - S_{2m-1}(u,u)/2
  std::optional<double> sharp_even_vanishing;  // |S_{2m}(u,u)|
};

// Scalar integrand (R phi) . dS with the bilinear dot a.b = a1 b1 + a2 b2.
inline GridFunction rot_dot(const Potential& phi, const PairField& g) {
  return imag_unit * (mul(phi.minus, g.minus) - mul(phi.plus, g.plus));
}

inline std::vector<HierarchyIdentityReport> identity_residuals(const Potential& phi) {
  const bool p_r_class = phase_between_components(phi).has_value();
  const bool t_class = reflection_parity(phi) != 0;
  const bool diag = max_distance(phi.plus, phi.minus) <= 1e-12 * std::max(1.0, phi.minus.sup_norm());

  std::vector<HierarchyIdentityReport> out;
  for (int m = 1; m <= 2; ++m) {
    HierarchyIdentityReport rep;
    rep.m = m;

    const PairField grad_even = gradient_s(2 * m, phi);
    const PairField grad_odd = gradient_s(2 * m - 1, phi);
    const PairField x_even = vector_field_s(2 * m, phi);
    const PairField d_odd{grad_odd.minus.derivative(1), grad_odd.plus.derivative(1)};

    if (diag) {
      const GridFunction y = vector_field_k(m, phi.minus);
      rep.sharp_vector_field = max_distance(x_even, PairField::diagonal(y));
      rep.hamiltonian_halving =
          std::abs(eval_k(m, phi.minus) - 0.5 * eval_s(2 * m - 1, phi));
      rep.sharp_even_vanishing = std::abs(eval_s(2 * m, phi));
    }
    if (p_r_class)
      rep.gradient_recursion = max_distance(x_even, d_odd);
    if (t_class) {
      // the integral term multiplies J phi; its sign follows the same
      // product-rule derivation as the xi identity
      const GridFunction weight = rot_dot(phi, grad_odd).antiderivative();
      const PairField jphi = apply_j(phi);
      const PairField rhs{
          d_odd.minus + (2.0 * imag_unit) * mul(weight, jphi.minus),
          d_odd.plus + (2.0 * imag_unit) * mul(weight, jphi.plus)};
      rep.t_symmetric_recursion = max_distance(apply_rot(grad_even), rhs);
    }
    out.push_back(std::move(rep));
  }
  if (!diag && !p_r_class && !t_class)
    throw std::invalid_argument(
        "identity_residuals: potential has none of the required symmetry classes "
        "(diagonal, P phi = R_alpha phi, or T phi = +-phi)");
  return out;
}

inline std::vector<HierarchyIdentityReport> identity_residuals(const GridFunction& u) {
  return identity_residuals(Potential::diagonal(u));
}

}  // namespace zslab
