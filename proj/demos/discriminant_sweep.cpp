// Sweeps the ZS discriminant of a diagonal cosine potential along the real
// axis and prints where it leaves the [-2, 2] band (the spectral gaps).
#include <cstdio>

#include "zslab/discriminant.hpp"

int main() {
  using namespace zslab;
  const GridFunction u =
      make_trig({{0, cplx{0.4, 0.0}}, {1, cplx{0.25, 0.0}}, {-1, cplx{0.25, 0.0}}}, 64);
  const ZsSystem sys(Potential::diagonal(u));

  std::printf("# lambda   Delta   Delta'\n");
  for (int i = 0; i <= 160; ++i) {
    const double lam = -8.0 + 0.1 * double(i);
    const auto s = zs_delta(sys, cplx{lam, 0.0});
    const char* marker = std::abs(s.value.real()) > 2.0 ? "  <- gap" : "";
    std::printf("%8.3f  %12.8f  %12.8f%s\n", lam, s.value.real(), s.dvalue.real(), marker);
  }
  return 0;
}
