#include <gtest/gtest.h>

#include "zslab/spectrum.hpp"
#include "oracles.hpp"

using namespace zslab;

namespace {

GridFunction cosine(double a, int n = 32) {
  return make_trig({{1, cplx{a / 2, 0.0}}, {-1, cplx{a / 2, 0.0}}}, n);
}

GridFunction mixed_real(int n = 32) {
  return make_trig({{0, cplx{0.2, 0.0}},
                    {1, cplx{0.2, 0.1}}, {-1, cplx{0.2, -0.1}},
                    {2, cplx{0.1, 0.0}}, {-2, cplx{0.1, 0.0}},
                    {3, cplx{0.0, 0.08}}, {-3, cplx{0.0, -0.08}}},
                   n);
}

}  // namespace

TEST(ZsSpectrum, FreeEigenvaluesAreMultiplesOfPi) {
  const ZsSystem sys(Potential::diagonal(GridFunction(32)));
  const SpectrumTable t = zs_spectrum(sys, 4);
  for (int n = -4; n <= 4; ++n) {
    const auto& e = t.entries.at(n);
    EXPECT_TRUE(e.double_root);
    EXPECT_NEAR(e.lower, n * std::numbers::pi, 1e-9);
    EXPECT_NEAR(e.gap, 0.0, 1e-12);
  }
}

TEST(ZsSpectrum, DiagonalReflectionSymmetry) {
  const ZsSystem sys(Potential::diagonal(mixed_real()));
  const SpectrumTable t = zs_spectrum(sys, 3);
  for (int n = 0; n <= 3; ++n) {
    EXPECT_NEAR(t.entries.at(-n).upper, -t.entries.at(n).lower, 1e-8);
    EXPECT_NEAR(t.entries.at(-n).lower, -t.entries.at(n).upper, 1e-8);
  }
}

TEST(ZsSpectrum, GapOpensAtFirstOrder) {
  const GridFunction u = cosine(1.0);  // u_hat(1) = 1/2
  for (const double eps : {1e-2, 1e-3}) {
    const ZsSystem sys(Potential::diagonal(eps * u));
    const SpectrumTable t = zs_spectrum(sys, 1);
    const double expected = oracles::perturbative_gap(u, eps, 1);
    EXPECT_NEAR(t.entries.at(1).gap, expected, 30.0 * eps * eps);
  }
  // first-order scaling: gap(1e-2) / gap(1e-3) ~ 10
  const double g2 = zs_spectrum(ZsSystem(Potential::diagonal(1e-2 * u)), 1).entries.at(1).gap;
  const double g3 = zs_spectrum(ZsSystem(Potential::diagonal(1e-3 * u)), 1).entries.at(1).gap;
  EXPECT_NEAR(g2 / g3, 10.0, 0.5);
}

TEST(ZsSpectrum, RejectsNonRealClasses) {
  const GridFunction v = make_trig({{1, cplx{0.2, 0.3}}}, 32);
  EXPECT_THROW(zs_spectrum(ZsSystem(Potential::diagonal(v)), 2), std::invalid_argument);
  const GridFunction u = cosine(0.5);
  EXPECT_THROW(zs_spectrum(ZsSystem(Potential::diagonal(imag_unit * u)), 2),
               std::invalid_argument);
}

TEST(ZsSpectrum, OrderingAndGapSign) {
  const SpectrumTable t = zs_spectrum(ZsSystem(Potential::diagonal(mixed_real())), 4);
  for (int n = -4; n <= 4; ++n) {
    EXPECT_GE(t.entries.at(n).gap, 0.0);
    EXPECT_LE(t.entries.at(n).lower, t.entries.at(n).upper);
    if (n < 4) EXPECT_LE(t.entries.at(n).upper, t.entries.at(n + 1).lower + 1e-12);
  }
}

TEST(ZsSpectrum, DeviationsFromTheLatticeDecay) {
  const SpectrumTable t = zs_spectrum(ZsSystem(Potential::diagonal(mixed_real())), 4);
  auto dev = [&](int n) {
    const auto& e = t.entries.at(n);
    const double c = double(n) * std::numbers::pi;
    return std::max(std::abs(e.lower - c), std::abs(e.upper - c));
  };
  for (int n = -4; n <= 4; ++n) EXPECT_LT(dev(n), 0.6) << n;
  // harmonic content stops at |k| = 3, so the tail deviations collapse
  EXPECT_LT(dev(4), 0.2 * dev(1));
}

TEST(ZsSpectrum, MultiplicityCoherence) {
  const GridFunction u = mixed_real();
  const ZsSystem sys(Potential::diagonal(u));
  const SpectrumTable t = zs_spectrum(sys, 3);
  for (int n = -3; n <= 3; ++n) {
    const auto& e = t.entries.at(n);
    if (e.double_root) {
      EXPECT_LT(std::abs(zs_delta(sys, cplx{e.lower, 0.0}).dvalue), 1e-6);
    } else {
      EXPECT_LT(std::abs(std::abs(zs_delta(sys, cplx{e.lower, 0.0}).value) - 2.0), 1e-8);
      EXPECT_LT(std::abs(std::abs(zs_delta(sys, cplx{e.upper, 0.0}).value) - 2.0), 1e-8);
    }
  }
}

TEST(ZsSpectrum, BandAndGapSignPattern) {
  // Delta^2 - 4 is negative strictly between gaps and positive inside open ones
  const ZsSystem sys(Potential::diagonal(mixed_real()));
  const SpectrumTable t = zs_spectrum(sys, 3);
  for (int n = -3; n < 3; ++n) {
    const double mid = 0.5 * (t.entries.at(n).upper + t.entries.at(n + 1).lower);
    const cplx d = zs_delta(sys, cplx{mid, 0.0}).value;
    EXPECT_LT(std::norm(d.real()) - 4.0, 0.0);
    const auto& e = t.entries.at(n);
    if (e.gap > 1e-3) {
      const cplx dg = zs_delta(sys, cplx{0.5 * (e.lower + e.upper), 0.0}).value;
      EXPECT_GT(std::abs(dg.real()), 2.0);
    }
  }
}

TEST(ZsSpectrum, TransformCovariance) {
  const GridFunction v = make_trig({{1, cplx{0.25, 0.1}}, {-2, cplx{0.1, -0.05}}}, 32);
  const Potential phi = Potential::make(v, v.conjugated());
  const SpectrumTable t = zs_spectrum(ZsSystem(phi), 2);
  const SpectrumTable tp = zs_spectrum(ZsSystem(transform_p(phi)), 2);
  const SpectrumTable tr = zs_spectrum(ZsSystem(transform_r(phi, 0.9)), 2);
  for (int n = -2; n <= 2; ++n) {
    EXPECT_NEAR(tp.entries.at(-n).upper, -t.entries.at(n).lower, 1e-8);
    EXPECT_NEAR(tp.entries.at(-n).lower, -t.entries.at(n).upper, 1e-8);
    EXPECT_NEAR(tr.entries.at(n).lower, t.entries.at(n).lower, 1e-8);
    EXPECT_NEAR(tr.entries.at(n).upper, t.entries.at(n).upper, 1e-8);
  }
}

TEST(HillSpectrum, FreeEigenvalues) {
  const SpectrumTable t = hill_spectrum(GridFunction(32), 3);
  EXPECT_NEAR(t.entries.at(0).upper, 0.0, 1e-9);
  for (int n = 1; n <= 3; ++n) {
    const double expect = double(n) * double(n) * std::numbers::pi * std::numbers::pi;
    EXPECT_NEAR(t.entries.at(n).lower, expect, 1e-7);
    EXPECT_NEAR(t.entries.at(n).gap, 0.0, 1e-9);
  }
}

TEST(HillSpectrum, SquaresOfZsEigenvalues) {
  const GridFunction u = mixed_real();
  const SpectrumTable tz = zs_spectrum(ZsSystem(Potential::diagonal(u)), 4);
  const SpectrumTable th = hill_spectrum(u, 4);
  EXPECT_NEAR(th.entries.at(0).upper, tz.entries.at(0).upper * tz.entries.at(0).upper, 1e-6);
  for (int n = 1; n <= 4; ++n) {
    EXPECT_NEAR(th.entries.at(n).lower,
                tz.entries.at(n).lower * tz.entries.at(n).lower, 1e-6);
    EXPECT_NEAR(th.entries.at(n).upper,
                tz.entries.at(n).upper * tz.entries.at(n).upper, 1e-6);
  }
}

TEST(HillSpectrum, RejectsComplexPotential) {
  EXPECT_THROW(hill_spectrum(make_trig({{1, cplx{0.1, 0.2}}}, 32), 2),
               std::invalid_argument);
}

TEST(IsolatingDiscs, FreeCase) {
  const SpectrumTable t = zs_spectrum(ZsSystem(Potential::diagonal(GridFunction(32))), 3);
  const auto discs = isolating_discs(t);
  for (int n = -3; n <= 3; ++n) {
    EXPECT_NEAR(discs.at(n).center, n * std::numbers::pi, 1e-9);
    EXPECT_NEAR(discs.at(n).radius, std::numbers::pi / 4.0, 1e-12);
  }
}

TEST(IsolatingDiscs, DisjointAndContainGaps) {
  const SpectrumTable t = zs_spectrum(ZsSystem(Potential::diagonal(mixed_real())), 4);
  const auto discs = isolating_discs(t);
  for (int n = -4; n <= 4; ++n) {
    const auto& e = t.entries.at(n);
    const auto& d = discs.at(n);
    EXPECT_GE(d.radius, 0.5 * e.gap);
    if (n < 4) {
      EXPECT_GT(discs.at(n + 1).center - d.center, d.radius + discs.at(n + 1).radius);
    }
  }
}

TEST(IsolatingDiscs, SymmetricFamilyForDiagonalPotentials) {
  const SpectrumTable t = zs_spectrum(ZsSystem(Potential::diagonal(mixed_real())), 3);
  const auto discs = isolating_discs(t);
  for (int n = 0; n <= 3; ++n) {
    EXPECT_NEAR(discs.at(-n).center, -discs.at(n).center, 1e-8);
    EXPECT_NEAR(discs.at(-n).radius, discs.at(n).radius, 1e-8);
  }
}
