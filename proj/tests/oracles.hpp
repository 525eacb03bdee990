#pragma once

// Brute-force reference computations shared by the unit and acceptance tests.

#include <array>
#include <cmath>
#include <limits>

#include "qcont/entropies.hpp"

namespace qcont::oracle {

inline Matrix qubit_from_bloch(double x, double y, double z) {
  Matrix m(2, 2);
  m << 0.5 * (1.0 + z), Complex(0.5 * x, -0.5 * y), Complex(0.5 * x, 0.5 * y), 0.5 * (1.0 - z);
  return m;
}

// min over product states sigma_A (x) sigma_B of D(rho || sigma_A (x) sigma_B) on
// two qubits. A 5^6 grid over both Bloch cubes, then a 3^6 pattern search that
// halves its span whenever the centre is the best point. Points outside the Bloch
// ball (or on its surface, where D is infinite) are skipped.
inline double product_state_distance_grid(const DensityMatrix& rho) {
  using P = std::array<double, 6>;
  auto value = [&](const P& v) {
    const double ra = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    const double rb = v[3] * v[3] + v[4] * v[4] + v[5] * v[5];
    if (ra >= 1.0 - 1e-12 || rb >= 1.0 - 1e-12) return std::numeric_limits<double>::infinity();
    const Matrix s = kron(qubit_from_bloch(v[0], v[1], v[2]), qubit_from_bloch(v[3], v[4], v[5]));
    return umegaki(rho.op(), HermitianOperator::unchecked(s)).value;
  };
  P best{};
  double best_v = value(best);
  const double grid[5] = {-0.8, -0.4, 0.0, 0.4, 0.8};
  for (int code = 0; code < 15625; ++code) {
    P v;
    int c = code;
    for (int k = 0; k < 6; ++k, c /= 5) v[static_cast<std::size_t>(k)] = grid[c % 5];
    const double f = value(v);
    if (f < best_v) {
      best_v = f;
      best = v;
    }
  }
  double span = 0.2;
  while (span > 1e-8) {
    P centre = best;
    bool moved = false;
    for (int code = 0; code < 729; ++code) {
      P v = centre;
      int c = code;
      for (int k = 0; k < 6; ++k, c /= 3) v[static_cast<std::size_t>(k)] += span * (c % 3 - 1);
      const double f = value(v);
      if (f < best_v - 1e-15) {
        best_v = f;
        best = v;
        moved = true;
      }
    }
    if (!moved) span *= 0.5;
  }
  return best_v;
}

}  // namespace qcont::oracle
