#include <gtest/gtest.h>

#include <sstream>

#include "zslab/json_io.hpp"
#include "zslab/potential.hpp"
#include "oracles.hpp"

using namespace zslab;

namespace {

GridFunction cosine(double a, int n = 32) {
  return make_trig({{1, cplx{a / 2, 0.0}}, {-1, cplx{a / 2, 0.0}}}, n);
}

GridFunction wave(cplx a, int k, int n = 32) { return make_trig({{k, a}}, n); }

}  // namespace

TEST(Classify, Tags) {
  const GridFunction u = cosine(0.8);
  EXPECT_EQ(Potential::diagonal(u).class_tag, RealityClass::e_r);
  EXPECT_EQ(Potential::diagonal(imag_unit * u).class_tag, RealityClass::e_i);

  const GridFunction v = wave(cplx{0.3, 0.4}, 1);
  EXPECT_EQ(Potential::make(v, v.conjugated()).class_tag, RealityClass::h_r);
  EXPECT_EQ(Potential::make(v, -v.conjugated()).class_tag, RealityClass::h_i);
  EXPECT_EQ(Potential::diagonal(v).class_tag, RealityClass::diagonal);
  EXPECT_EQ(Potential::make(v, 2.0 * v.conjugated()).class_tag, RealityClass::generic);
}

TEST(Transform, PIsAnInvolution) {
  const Potential phi = Potential::make(wave(cplx{0.2, 0.5}, 1), wave(cplx{-0.1, 0.3}, 2));
  const Potential back = transform_p(transform_p(phi));
  EXPECT_LT(max_distance(back.minus, phi.minus), 1e-12);
  EXPECT_LT(max_distance(back.plus, phi.plus), 1e-12);
}

TEST(Transform, RotationGroupLaw) {
  const Potential phi = Potential::make(wave(cplx{0.2, 0.5}, 1), wave(cplx{-0.1, 0.3}, -2));
  const Potential a = transform_r(transform_r(phi, 0.4), -0.4);
  EXPECT_LT(max_distance(a.minus, phi.minus), 1e-12);
  const Potential b = transform_r(transform_r(phi, 0.3), 0.9);
  const Potential c = transform_r(phi, 1.2);
  EXPECT_LT(max_distance(b.minus, c.minus), 1e-12);
  EXPECT_LT(max_distance(b.plus, c.plus), 1e-12);
}

TEST(Transform, ReflectionIsAnInvolution) {
  const Potential phi = Potential::make(wave(cplx{0.2, 0.5}, 3), wave(cplx{-0.1, 0.3}, 1));
  const Potential back = transform_t(transform_t(phi));
  EXPECT_LT(max_distance(back.minus, phi.minus), 1e-12);
}

TEST(Transform, CosineDiagonalIsReflectionFixed) {
  // cos(2 pi (1-x)) = cos(2 pi x)
  const Potential phi = Potential::diagonal(cosine(1.0));
  const Potential t = transform_t(phi);
  EXPECT_LT(max_distance(t.minus, phi.minus), 1e-12);
}

TEST(Transform, TagTransitions) {
  const Potential diag = Potential::diagonal(cosine(0.7));
  EXPECT_EQ(transform_t(diag).class_tag, RealityClass::e_r);
  EXPECT_EQ(transform_p(diag).class_tag, RealityClass::e_r);
  // a real diagonal rotates into the conjugate-pair class, never stays diagonal
  EXPECT_EQ(transform_r(diag, 0.4).class_tag, RealityClass::h_r);
  EXPECT_EQ(transform_r(diag, 0.0).class_tag, RealityClass::e_r);
  EXPECT_EQ(transform_r(diag, std::numbers::pi).class_tag, RealityClass::e_r);
  // a complex diagonal rotates to generic unless alpha is 0 or pi
  const Potential cdiag = Potential::diagonal(wave(cplx{0.3, 0.2}, 1) + cosine(0.2));
  EXPECT_EQ(cdiag.class_tag, RealityClass::diagonal);
  EXPECT_EQ(transform_r(cdiag, 0.4).class_tag, RealityClass::generic);
  EXPECT_EQ(transform_r(cdiag, std::numbers::pi).class_tag, RealityClass::diagonal);
}

TEST(Miura, ZeroAndConstant) {
  EXPECT_LT(miura(GridFunction(16)).sup_norm(), 1e-14);
  const GridFunction c = make_trig({{0, cplx{0.6, 0.0}}}, 16);
  const GridFunction b = miura(c);
  for (std::size_t j = 0; j < b.size(); ++j) EXPECT_LT(std::abs(b[j] - 0.36), 1e-13);
}

TEST(Miura, CosineMatchesSymbolicExpansion) {
  const double a = 0.35;
  const GridFunction b = miura(cosine(a));
  EXPECT_LT(max_distance(b, oracles::miura_of_cosine(a, 32)), 1e-12);
}

TEST(Miura, ExactOnDegreeThreePolynomials) {
  // compare against a term-by-term expansion through the coefficient table
  const GridFunction u = make_trig({{0, cplx{0.2, 0.0}},
                                    {1, cplx{0.15, 0.1}},
                                    {-1, cplx{0.15, -0.1}},
                                    {3, cplx{0.05, 0.0}},
                                    {-3, cplx{0.05, 0.0}}},
                                   32);
  const auto cu = u.coeffs();
  std::map<int, cplx> expect;
  for (int k = -3; k <= 3; ++k)
    expect[k] += imag_unit * (two_pi * k) * cu[fft_index(k, cu.size())];
  for (int k1 = -3; k1 <= 3; ++k1)
    for (int k2 = -3; k2 <= 3; ++k2)
      expect[k1 + k2] += cu[fft_index(k1, cu.size())] * cu[fft_index(k2, cu.size())];
  const GridFunction b = miura(u);
  for (const auto& [k, v] : expect) EXPECT_LT(std::abs(b.coeff(k) - v), 1e-12);
}

TEST(Mean, Linearity) {
  const GridFunction f = make_trig({{0, cplx{0.3, 0.0}}, {1, cplx{0.25, 0.0}},
                                    {-1, cplx{0.25, 0.0}}}, 16);
  EXPECT_LT(std::abs(mean(f) - 0.3), 1e-14);
}

TEST(PhaseDetection, FindsRotationAngle) {
  const GridFunction v = wave(cplx{0.4, 0.1}, 2);
  const Potential phi = Potential::make(v, std::polar(1.0, 0.9) * v);
  const auto alpha = phase_between_components(phi);
  ASSERT_TRUE(alpha.has_value());
  EXPECT_NEAR(*alpha, 0.9, 1e-9);
  EXPECT_FALSE(phase_between_components(
                   Potential::make(v, wave(cplx{0.4, 0.1}, 1)))
                   .has_value());
}

TEST(ReflectionParity, DetectsEvenAndOdd) {
  const GridFunction even = cosine(0.5);
  std::map<int, cplx> odd_h{{1, cplx{0.0, -0.25}}, {-1, cplx{0.0, 0.25}}};
  const GridFunction odd = make_trig(odd_h, 32);  // 0.5 sin(2 pi x)
  EXPECT_EQ(reflection_parity(Potential::diagonal(even)), 1);
  EXPECT_EQ(reflection_parity(Potential::diagonal(odd)), -1);
  EXPECT_EQ(reflection_parity(Potential::diagonal(even + odd)), 0);
}

TEST(JsonIo, RoundTripGeneric) {
  const Potential phi = Potential::make(wave(cplx{0.2, 0.5}, 1), wave(cplx{-0.1, 0.3}, -2));
  const json j = to_json(phi);
  const Potential back = potential_from_json(j);
  EXPECT_LT(max_distance(back.minus, phi.minus), 1e-13);
  EXPECT_LT(max_distance(back.plus, phi.plus), 1e-13);
}

TEST(JsonIo, DiagonalShorthand) {
  const json j = {{"n_modes", 16},
                  {"diagonal_of", {{"harmonics", {{"1", {0.25, 0.0}}, {"-1", {0.25, 0.0}}}}}}};
  const Potential phi = potential_from_json(j);
  EXPECT_EQ(phi.class_tag, RealityClass::e_r);
  EXPECT_LT(max_distance(phi.minus, cosine(0.5, 16)), 1e-13);
}

TEST(JsonIo, MissingFieldsThrow) {
  EXPECT_THROW(potential_from_json(json{{"n_modes", 16}}), std::invalid_argument);
  EXPECT_THROW(potential_from_json(json{{"minus", json::object()}}), std::invalid_argument);
}
