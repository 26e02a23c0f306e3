#include "spectral_atlas/frequency.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace atlas {
namespace {

using i128 = __int128;

bool push_convergent(ContinuedFraction& cf, std::int64_t a_next, std::int64_t q_cap) {
  const std::size_t n = cf.q.size();
  const std::int64_t p_prev2 = n >= 2 ? cf.p[n - 2] : 1;
  const std::int64_t q_prev2 = n >= 2 ? cf.q[n - 2] : 0;
  std::int64_t p = 0, q = 0;
  if (__builtin_mul_overflow(a_next, cf.p[n - 1], &p) || __builtin_add_overflow(p, p_prev2, &p) ||
      __builtin_mul_overflow(a_next, cf.q[n - 1], &q) || __builtin_add_overflow(q, q_prev2, &q) ||
      q > q_cap)
    return false;
  cf.a.push_back(a_next);
  cf.p.push_back(p);
  cf.q.push_back(q);
  return true;
}

}  // namespace

ContinuedFraction expand(double alpha, int max_terms, std::int64_t q_cap) {
  if (!(alpha > 0 && alpha < 1)) throw UsageError("frequency must lie in (0, 1)");
  if (max_terms < 1) throw UsageError("max_terms must be >= 1");

  // alpha is exactly mantissa * 2^exponent; run Euclid on that fraction.
  int exponent = 0;
  const double frac = std::frexp(alpha, &exponent);  // alpha = frac * 2^exponent
  const std::int64_t mantissa = static_cast<std::int64_t>(std::ldexp(frac, 53));
  const int shift = 53 - exponent;  // alpha = mantissa / 2^shift
  if (shift > 126) throw UsageError("frequency too small to expand");
  i128 num = mantissa, den = static_cast<i128>(1) << shift;

  ContinuedFraction cf;
  cf.alpha = alpha;
  for (int j = 1; j <= max_terms; ++j) {
    const i128 a = den / num;
    const i128 r = den - a * num;
    if (a > std::numeric_limits<std::int64_t>::max()) break;
    if (!push_convergent(cf, static_cast<std::int64_t>(a), q_cap)) break;
    if (r == 0 || static_cast<double>(r) / static_cast<double>(num) < 1e-14) {
      cf.rational = true;
      break;
    }
    den = num;
    num = r;
  }
  return cf;
}

double beta_estimate(const ContinuedFraction& cf) {
  if (cf.rational) throw UsageError("beta is undefined for a rational frequency");
  if (cf.convergents() < 3) throw UsageError("beta_estimate needs at least three convergents");
  double best = 0;
  for (std::size_t n = 1; n + 1 < cf.q.size(); ++n)
    best = std::max(best, std::log(static_cast<double>(cf.q[n + 1])) / static_cast<double>(cf.q[n]));
  return best;
}

ContinuedFraction liouville_construct(double gamma, int depth) {
  if (!(gamma > 0) || !std::isfinite(gamma)) throw UsageError("liouville gamma must be > 0");
  if (depth < 2) throw UsageError("liouville depth must be >= 2");
  constexpr std::int64_t cap = 1'000'000'000'000;
  ContinuedFraction cf;
  if (!push_convergent(cf, 1, cap)) throw NumericalError("liouville seed overflow");
  while (cf.convergents() < depth) {
    const double e = gamma * static_cast<double>(cf.q.back());
    const double a = std::ceil(std::exp(e));
    if (!(a < 9.0e18) || !push_convergent(cf, static_cast<std::int64_t>(a), cap))
      throw UsageError("liouville construction exceeds q <= 1e12 at depth " +
                       std::to_string(cf.convergents() + 1));
  }
  long double x = 0;
  for (int j = cf.terms(); j >= 1; --j) x = 1.0L / (static_cast<long double>(cf.a[j]) + x);
  cf.alpha = static_cast<double>(x);
  return cf;
}

double torus_norm(long double x) {
  const long double f = x - std::floor(x);
  return static_cast<double>(std::min(f, 1.0L - f));
}

ContinuedFraction frequency_from_spec(const std::string& spec, int max_terms) {
  if (spec == "golden") return expand((std::sqrt(5.0) - 1.0) / 2.0, max_terms);
  if (spec == "silver") return expand(std::sqrt(2.0) - 1.0, max_terms);
  if (spec.rfind("liouville:", 0) == 0) {
    const auto second = spec.find(':', 10);
    if (second == std::string::npos) throw UsageError("expected liouville:<gamma>:<depth>");
    double gamma = 0;
    int depth = 0;
    const std::string g = spec.substr(10, second - 10), d = spec.substr(second + 1);
    auto r1 = std::from_chars(g.data(), g.data() + g.size(), gamma);
    auto r2 = std::from_chars(d.data(), d.data() + d.size(), depth);
    if (r1.ec != std::errc() || r1.ptr != g.data() + g.size() || r2.ec != std::errc() ||
        r2.ptr != d.data() + d.size())
      throw UsageError("malformed liouville frequency '" + spec + "'");
    return liouville_construct(gamma, depth);
  }
  double alpha = 0;
  auto r = std::from_chars(spec.data(), spec.data() + spec.size(), alpha);
  if (spec.empty() || r.ec != std::errc() || r.ptr != spec.data() + spec.size())
    throw UsageError("unknown frequency '" + spec + "'");
  return expand(alpha, max_terms);
}

}  // namespace atlas
