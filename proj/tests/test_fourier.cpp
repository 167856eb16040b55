#include <gtest/gtest.h>

#include <random>

#include "zslab/fourier.hpp"

using namespace zslab;

namespace {

GridFunction random_grid(int n_modes, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  auto uni = [&] { return double(eng() >> 11) * 0x1.0p-53 - 0.5; };
  std::vector<cplx> v(2 * std::size_t(n_modes));
  for (auto& x : v) x = cplx{uni(), uni()};
  return GridFunction::from_samples(n_modes, std::move(v));
}

}  // namespace

TEST(Fourier, RoundTripReproducesSamples) {
  for (int n : {8, 32, 64}) {
    const GridFunction f = random_grid(n, 7 + n);
    const GridFunction g = GridFunction::from_coeffs(n, f.coeffs());
    EXPECT_LT(max_distance(f, g), 1e-12 * std::max(1.0, f.sup_norm()));
  }
}

TEST(Fourier, RoundTripOnNonPowerOfTwoGrid) {
  const GridFunction f = random_grid(12, 99);  // exercises the direct transform
  const GridFunction g = GridFunction::from_coeffs(12, f.coeffs());
  EXPECT_LT(max_distance(f, g), 1e-12);
}

TEST(MakeTrig, EmptyTableIsZero) {
  const GridFunction z = make_trig({}, 16);
  EXPECT_EQ(z.sup_norm(), 0.0);
}

TEST(MakeTrig, ConstantMode) {
  const cplx c{0.3, -0.7};
  const GridFunction f = make_trig({{0, c}}, 16);
  for (std::size_t j = 0; j < f.size(); ++j) EXPECT_LT(std::abs(f[j] - c), 1e-14);
}

TEST(MakeTrig, CosineSamples) {
  // {1: 1/2, -1: 1/2} is cos(2 pi x); value 1 at x = 0
  const GridFunction f = make_trig({{1, cplx{0.5, 0.0}}, {-1, cplx{0.5, 0.0}}}, 16);
  EXPECT_LT(std::abs(f[0] - 1.0), 1e-14);
  for (std::size_t j = 0; j < f.size(); ++j)
    EXPECT_LT(std::abs(f[j] - std::cos(two_pi * f.grid_point(j))), 1e-14);
}

TEST(MakeTrig, HarmonicOutOfRangeThrows) {
  EXPECT_THROW(make_trig({{16, cplx{1.0, 0.0}}}, 16), std::invalid_argument);
  EXPECT_THROW(make_trig({{-17, cplx{1.0, 0.0}}}, 16), std::invalid_argument);
}

TEST(Derivative, CosineFirstOrder) {
  const GridFunction f = make_trig({{1, cplx{0.5, 0.0}}, {-1, cplx{0.5, 0.0}}}, 32);
  const GridFunction d = f.derivative(1);
  for (std::size_t j = 0; j < d.size(); ++j) {
    const double x = d.grid_point(j);
    EXPECT_LT(std::abs(d[j] + two_pi * std::sin(two_pi * x)), 1e-12);
  }
}

TEST(Derivative, ConstantVanishes) {
  const GridFunction f = make_trig({{0, cplx{2.0, 1.0}}}, 16);
  EXPECT_LT(f.derivative(1).sup_norm(), 1e-13);
  EXPECT_LT(f.derivative(3).sup_norm(), 1e-13);
}

TEST(Derivative, ThirdOrderMultiplier) {
  // e^{2 pi i 3 x}: third derivative multiplies by (6 pi i)^3
  const GridFunction f = make_trig({{3, cplx{1.0, 0.0}}}, 32);
  const GridFunction d = f.derivative(3);
  const cplx factor = std::pow(cplx{0.0, 3.0 * two_pi}, 3);
  for (std::size_t j = 0; j < d.size(); ++j)
    EXPECT_LT(std::abs(d[j] - factor * f[j]), 1e-9);
}

TEST(Mean, PicksZerothCoefficient) {
  const GridFunction f = make_trig(
      {{0, cplx{0.3, 0.0}}, {1, cplx{0.25, 0.0}}, {-1, cplx{0.25, 0.0}}}, 16);
  EXPECT_LT(std::abs(f.mean() - 0.3), 1e-14);
  EXPECT_LT(std::abs(make_trig({{1, cplx{0.5, 0.0}}, {-1, cplx{0.5, 0.0}}}, 16).mean()),
            1e-14);
}

TEST(Mul, AliasFreeOnTrigPolynomials) {
  // (cos 2pix)^2 = 1/2 + cos(4pix)/2, checked coefficient-wise
  const GridFunction c = make_trig({{1, cplx{0.5, 0.0}}, {-1, cplx{0.5, 0.0}}}, 16);
  const GridFunction p = mul(c, c);
  EXPECT_LT(std::abs(p.coeff(0) - 0.5), 1e-13);
  EXPECT_LT(std::abs(p.coeff(2) - 0.25), 1e-13);
  EXPECT_LT(std::abs(p.coeff(4)), 1e-13);
}

TEST(Antiderivative, InvertsDerivativeUpToMean) {
  const GridFunction f =
      make_trig({{1, cplx{0.2, 0.1}}, {-2, cplx{0.0, 0.4}}, {3, cplx{-0.3, 0.0}}}, 32);
  const GridFunction b = f.derivative(1).antiderivative();
  // both vanish at 0 after removing f(0)
  for (std::size_t j = 0; j < f.size(); ++j)
    EXPECT_LT(std::abs(b[j] - (f[j] - f[0])), 1e-12);
}

TEST(Antiderivative, MeanGivesLinearPart) {
  const GridFunction f = make_trig({{0, cplx{2.0, 0.0}}}, 16);
  const GridFunction a = f.antiderivative();
  for (std::size_t j = 0; j < a.size(); ++j)
    EXPECT_LT(std::abs(a[j] - 2.0 * a.grid_point(j)), 1e-13);
}

TEST(Eval, MatchesSamplesOnAndOffGrid) {
  const GridFunction f = make_trig({{2, cplx{0.3, -0.2}}, {-1, cplx{0.5, 0.1}}}, 16);
  EXPECT_LT(std::abs(f.eval(f.grid_point(3)) - f[3]), 1e-13);
  const cplx direct = cplx{0.3, -0.2} * std::polar(1.0, two_pi * 2 * 0.123) +
                      cplx{0.5, 0.1} * std::polar(1.0, -two_pi * 0.123);
  EXPECT_LT(std::abs(f.eval(0.123) - direct), 1e-13);
}

TEST(Reflect, ExactGridReindexing) {
  const GridFunction f = make_trig({{1, cplx{0.0, 0.6}}, {2, cplx{0.4, 0.0}}}, 16);
  const GridFunction r = f.reflected();
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double x = f.grid_point(j);
    EXPECT_LT(std::abs(r[j] - f.eval(1.0 - x)), 1e-12);
  }
}

TEST(BilinearIntegral, MatchesClosedForm) {
  // int cos(2pix) * cos(2pix) = 1/2
  const GridFunction c = make_trig({{1, cplx{0.5, 0.0}}, {-1, cplx{0.5, 0.0}}}, 16);
  EXPECT_LT(std::abs(bilinear_integral(c, c) - 0.5), 1e-13);
  // int e^{2pi i x} e^{-2pi i x} = 1
  const GridFunction e = make_trig({{1, cplx{1.0, 0.0}}}, 16);
  const GridFunction em = make_trig({{-1, cplx{1.0, 0.0}}}, 16);
  EXPECT_LT(std::abs(bilinear_integral(e, em) - 1.0), 1e-13);
  EXPECT_LT(std::abs(bilinear_integral(e, e)), 1e-13);
}
