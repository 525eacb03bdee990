// Walks a quantum Markov chain towards the maximally mixed state and prints
// the recovery sandwich around the conditional mutual information.

#include <cstdio>

#include "qcont.hpp"

using namespace qcont;

int main() {
  const auto layout = SubsystemLayout::lettered({2, 2, 2});
  Rng rng(3);
  const DensityMatrix chain = tensor(sample_ginibre_state(2, 2, rng), sample_ginibre_state(4, 4, rng));
  const DensityMatrix scrambled = sample_ginibre_state(8, 8, rng);
  std::printf("%6s %14s %14s %14s %14s\n", "w", "lower", "I(A:C|B)", "upper", "||Delta||_1");
  for (double w : {0.0, 1e-3, 1e-2, 0.1, 0.5, 1.0}) {
    const DensityMatrix rho = mix(1.0 - w, chain, scrambled);
    const MarkovSandwich s = markov_sandwich(rho, layout);
    std::printf("%6.3f %14.3e %14.3e %14.3e %14.3e\n", w, s.lower.value_or(0.0), s.cmi, s.upper,
                s.recovery_distance);
  }
  return 0;
}
