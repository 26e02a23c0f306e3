#include "spectral_atlas/frequency.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace atlas;

namespace {

void check_invariants(const ContinuedFraction& cf) {
  for (int n = 1; n < cf.convergents(); ++n) {
    const __int128 det = static_cast<__int128>(cf.p[n]) * cf.q[n - 1] -
                         static_cast<__int128>(cf.p[n - 1]) * cf.q[n];
    CHECK(det == ((n - 1) % 2 == 0 ? 1 : -1));
    CHECK(std::gcd(cf.p[n], cf.q[n]) == 1);
    if (n >= 2) {
      CHECK(cf.q[n] == cf.a[n] * cf.q[n - 1] + cf.q[n - 2]);
      CHECK(cf.p[n] == cf.a[n] * cf.p[n - 1] + cf.p[n - 2]);
    }
  }
  for (int n = 0; n + 1 < cf.convergents(); ++n) {
    const long double qa = static_cast<long double>(cf.q[n]) * static_cast<long double>(cf.alpha);
    CHECK(torus_norm(qa) <= 1.0L / cf.q[n + 1] * (1 + 1e-9L));
  }
}

}  // namespace

TEST_SUITE("frequency") {

TEST_CASE("golden mean has Fibonacci denominators") {
  const auto cf = expand((std::sqrt(5.0) - 1) / 2, 20);
  CHECK_FALSE(cf.rational);
  for (int n = 1; n <= cf.terms(); ++n) CHECK(cf.a[n] == 1);
  const std::int64_t fib[] = {1, 1, 2, 3, 5, 8, 13, 21, 34, 55};
  for (int n = 0; n < 10; ++n) CHECK(cf.q[n] == fib[n]);
  check_invariants(cf);
  CHECK(beta_estimate(cf) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("silver mean has all twos") {
  const auto cf = expand(std::sqrt(2.0) - 1, 15);
  for (int n = 1; n <= cf.terms(); ++n) CHECK(cf.a[n] == 2);
  const std::int64_t want[] = {1, 2, 5, 12, 29, 70};
  for (int n = 0; n < 6; ++n) CHECK(cf.q[n] == want[n]);
  check_invariants(cf);
}

TEST_CASE("a rational number terminates") {
  const auto cf = expand(0.5, 10);
  CHECK(cf.rational);
  CHECK(cf.terms() == 1);
  CHECK(cf.a[1] == 2);
  CHECK_THROWS_AS(beta_estimate(cf), UsageError);
}

TEST_CASE("invariants for assorted frequencies") {
  for (double a : {0.1234567, 1 / std::sqrt(3.0), std::exp(-1.0), 0.7071067811865476})
    check_invariants(expand(a, 30));
}

TEST_CASE("best approximation property") {
  const auto cf = expand((std::sqrt(5.0) - 1) / 2, 30);
  for (int n = 1; n < cf.convergents() && cf.q[n] <= 10000; ++n) {
    const long double prev = torus_norm(cf.q[n - 1] * static_cast<long double>(cf.alpha));
    for (std::int64_t k = 1; k < cf.q[n]; ++k)
      REQUIRE(torus_norm(k * static_cast<long double>(cf.alpha)) >= prev * (1 - 1e-12L));
  }
}

TEST_CASE("liouville construction") {
  const auto half = liouville_construct(0.5, 4);
  CHECK(half.q[1] == 1);
  CHECK(half.a[2] == 2);
  CHECK(half.q[2] == 3);
  CHECK(half.a[3] == 5);
  CHECK(half.q[3] == 16);

  const auto one = liouville_construct(1.0, 4);
  const std::int64_t want[] = {1, 1, 4, 221};
  REQUIRE(one.convergents() >= 4);
  for (int n = 0; n < 4; ++n) CHECK(one.q[n] == want[n]);
  CHECK(beta_estimate(one) >= 1.0);
  check_invariants(one);

  CHECK_THROWS_AS(liouville_construct(0.0, 4), UsageError);
  CHECK_THROWS_AS(liouville_construct(1.0, 1), UsageError);
}

TEST_CASE("frequency specs") {
  CHECK(frequency_from_spec("golden").alpha == doctest::Approx((std::sqrt(5.0) - 1) / 2));
  CHECK(frequency_from_spec("silver").alpha == doctest::Approx(std::sqrt(2.0) - 1));
  CHECK(frequency_from_spec("0.25").rational);
  CHECK(frequency_from_spec("liouville:0.5:4").q[3] == 16);
  CHECK_THROWS_AS(frequency_from_spec("bronze"), UsageError);
  CHECK_THROWS_AS(expand(1.5, 3), UsageError);
  CHECK(torus_norm(2.75L) == doctest::Approx(0.25));
}

}
