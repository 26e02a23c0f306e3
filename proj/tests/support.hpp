#pragma once

#include "spectral_atlas/potentials.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace atlas::testing {

inline Potential exp_potential() { return Potential(TrigPolynomial1D(1, {1.0})); }
inline Potential cos_potential() { return Potential(TrigPolynomial1D(-1, {1.0, 0.0, 1.0})); }
inline Potential two_mode_potential() { return Potential(TrigPolynomial1D(1, {1.0, 2.0})); }

inline Complex normal_complex(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return {n(rng), n(rng)};
}

// Random trig polynomial with span at most `max_span` and nonzero ends.
inline TrigPolynomial1D random_trig(std::mt19937_64& rng, int max_span) {
  std::uniform_int_distribution<int> span(1, max_span), low(-max_span, max_span);
  const int s = span(rng), l = std::clamp(low(rng), -s, 0);
  std::vector<Complex> c(static_cast<std::size_t>(s) + 1);
  for (auto& x : c) x = normal_complex(rng);
  return TrigPolynomial1D(l, std::move(c));
}

}  // namespace atlas::testing
