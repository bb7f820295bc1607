#pragma once

#include "ghft/gaussian.hpp"
#include "ghft/majorana.hpp"
#include "ghft/verify.hpp"

#include <random>

namespace ghft::testing {

using ghft::random_hamiltonian;
using ghft::random_pure;
using ghft::random_skew;
using ghft::random_terms;

}  // namespace ghft::testing

namespace ghft::testing {

/// Periodic Lx x Ly Hubbard terms, one hopping term per site and direction.
inline DiracTermList small_hubbard_terms(int lx, int ly, double t, double u, double mu) {
  DiracTermList terms;
  auto site = [lx, ly](int x, int y) { return ((x + lx) % lx) + lx * ((y + ly) % ly); };
  for (int y = 0; y < ly; ++y)
    for (int x = 0; x < lx; ++x) {
      const int s = site(x, y);
      for (int sigma = 0; sigma < 2; ++sigma) {
        if (lx > 1) terms.hopping.push_back({2 * s + sigma, 2 * site(x + 1, y) + sigma, t});
        if (ly > 1) terms.hopping.push_back({2 * s + sigma, 2 * site(x, y + 1) + sigma, t});
        terms.number.push_back({2 * s + sigma, -mu});
      }
      terms.density.push_back({2 * s, 2 * s + 1, u});
    }
  return terms;
}

inline MajoranaHamiltonian small_hubbard(int lx, int ly, double t, double u, double mu) {
  return compile_hamiltonian(ModeLayout(lx * ly, 2), small_hubbard_terms(lx, ly, t, u, mu));
}

}  // namespace ghft::testing
