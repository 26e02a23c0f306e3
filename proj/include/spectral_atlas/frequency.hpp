#pragma once

#include "spectral_atlas/common.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace atlas {

// alpha = [0; a_1, a_2, ...]. Index n runs from 0; quotient()[0] is unused so
// that quotient(n) reads as a_n. Convergents p_n / q_n with p_0 = 0, q_0 = 1.
struct ContinuedFraction {
  double alpha = 0;
  std::vector<std::int64_t> a{0};
  std::vector<std::int64_t> p{0};
  std::vector<std::int64_t> q{1};
  bool rational = false;  // expansion ended because a residual vanished

  int terms() const { return static_cast<int>(a.size()) - 1; }
  int convergents() const { return static_cast<int>(q.size()); }
};

ContinuedFraction expand(double alpha, int max_terms, std::int64_t q_cap = 1'000'000'000'000);

// max_{n >= 1} ln(q_{n+1}) / q_n over the available convergents: a lower
// estimate of the limsup.
double beta_estimate(const ContinuedFraction& cf);

// Partial quotients a_1 = 1, a_{n+1} = ceil(e^{gamma q_n}); depth counts the
// convergents q_0 .. q_{depth-1}. alpha is summed back from the quotients.
ContinuedFraction liouville_construct(double gamma, int depth);

// ||x||_T, distance to the nearest integer.
double torus_norm(long double x);

// "golden", "silver", "liouville:gamma:depth" or a decimal literal.
ContinuedFraction frequency_from_spec(const std::string& spec, int max_terms = 40);

}  // namespace atlas
