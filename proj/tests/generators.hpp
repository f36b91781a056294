#pragma once

// Seeded random inputs for property tests.

#include <algorithm>
#include <vector>

#include "ptgame/pt_core.hpp"
#include "ptgame/rng.hpp"

namespace ptgame::testing {

inline OutcomeDistribution random_distribution(Rng& rng, std::size_t max_support = 8) {
  const std::size_t m = 1 + rng.index(max_support);
  std::vector<double> support(m), probs(m);
  double x = rng.uniform(-10.0, 10.0);
  for (std::size_t j = 0; j < m; ++j) {
    support[j] = x;
    x += rng.uniform(0.01, 5.0);
  }
  double total = 0.0;
  for (double& q : probs) total += (q = rng.unit() + 1e-3);
  for (double& q : probs) q /= total;
  // Put the rounding residue on the largest entry so the sum is exact to 1e-15.
  double sum = 0.0;
  for (double q : probs) sum += q;
  *std::max_element(probs.begin(), probs.end()) += 1.0 - sum;
  return OutcomeDistribution(std::move(support), std::move(probs));
}

inline WeightingFunction random_weighting(Rng& rng) {
  switch (rng.index(3)) {
    case 0:
      return WeightingFunction::identity();
    case 1:
      return WeightingFunction::prelec(rng.uniform(0.2, 1.5));
    default: {
      const std::size_t n = 1 + rng.index(6);
      std::vector<double> ps(n), vs(n);
      for (std::size_t k = 0; k < n; ++k) {
        ps[k] = rng.uniform(0.01, 0.99);
        vs[k] = rng.unit();
      }
      std::sort(ps.begin(), ps.end());
      std::sort(vs.begin(), vs.end());
      std::vector<std::pair<double, double>> knots{{0.0, 0.0}};
      for (std::size_t k = 0; k < n; ++k) {
        if (ps[k] > knots.back().first) knots.emplace_back(ps[k], vs[k]);
      }
      knots.emplace_back(1.0, 1.0);
      return WeightingFunction::tabulated(std::move(knots));
    }
  }
}

}  // namespace ptgame::testing
