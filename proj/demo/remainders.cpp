// Prints the concavity defect of the relative entropy next to the remainder
// bounds for one random pair of inputs, then the exact two-qubit example
// where the Umegaki remainder is attained.

#include <cstdio>

#include "qcont.hpp"

using namespace qcont;

int main() {
  Rng rng(7);
  const DensityMatrix r1 = sample_ginibre_state(3, 3, rng), r2 = sample_ginibre_state(3, 3, rng);
  const DensityMatrix s1 = sample_ginibre_state(3, 3, rng), s2 = sample_ginibre_state(3, 3, rng);
  const StatePair a{r1, s1}, b{r2, s2};
  const auto f = umegaki_remainder(r1, s1, r2, s2);
  const auto g = bs_remainder(r1, s1, r2, s2);
  std::printf("c1 = %.6f  c2 = %.6f  c^0 = %.6f\n", f.c1, f.c2, g.c0);
  std::printf("%6s %12s %12s %12s %12s\n", "p", "defect", "-f(p)", "defect^", "-f^(p)");
  for (double p : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    std::printf("%6.2f %12.6f %12.6f %12.6f %12.6f\n", p, concavity_defect(DivergenceKind::umegaki, a, b, p), -f(p),
                concavity_defect(DivergenceKind::bs, a, b, p), -g(p));
  }

  const double t = 0.25;
  const StatePair e0{DensityMatrix::basis_state(2, 0), DensityMatrix::diagonal({t, 1 - t})};
  const StatePair e1{DensityMatrix::basis_state(2, 1), DensityMatrix::diagonal({1 - t, t})};
  const auto tight = umegaki_remainder(e0.rho, e0.sigma, e1.rho, e1.sigma);
  std::printf("\nattained case, t = %.2f\n", t);
  for (double p : {0.1, 0.5, 0.9}) {
    std::printf("p = %.1f  f(p) = %.12f  -defect = %.12f\n", p, tight(p),
                -concavity_defect(DivergenceKind::umegaki, e0, e1, p));
  }
  return 0;
}
