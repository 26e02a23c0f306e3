#include "spectral_atlas/gd.hpp"
#include "spectral_atlas/potentials.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace atlas;
using namespace atlas::testing;

TEST_SUITE("potentials") {

TEST_CASE("evaluation of the basic potentials") {
  CHECK(std::abs(exp_potential().at(0.25) - Complex(0, 1)) < 1e-15);
  CHECK(std::abs(cos_potential().at(0.0) - 2.0) < 1e-15);
  CHECK(std::abs(Potential(tent_potential()).at(0.75) - 0.25) < 1e-15);
  CHECK(std::abs(Potential(tent_potential()).at(0.1) - 0.1) < 1e-15);
}

TEST_CASE("trig window is trimmed and ends are nonzero") {
  TrigPolynomial1D v(-2, {0.0, 0.0, 1.0, 2.0, 0.0});
  CHECK(v.low() == 0);
  CHECK(v.high() == 1);
  CHECK(v.coefficient(5) == Complex(0));
  CHECK_FALSE(v.constant());
  CHECK(TrigPolynomial1D(0, {3.0}).constant());
}

TEST_CASE("evaluation matches a direct Fourier sum") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 10; ++trial) {
    const TrigPolynomial1D v = random_trig(rng, 5);
    for (int i = 0; i < 100; ++i) {
      const double t = u(rng);
      Complex direct = 0;
      for (int k = v.low(); k <= v.high(); ++k)
        direct += v.coefficient(k) * std::exp(Complex(0, kTwoPi * k * t));
      CHECK(std::abs(v(t) - direct) <= 1e-12 * std::max(1.0, std::abs(direct)));
    }
  }
}

TEST_CASE("range samples") {
  const auto pts = range_sample(exp_potential(), 4);
  REQUIRE(pts.size() == 4);
  const Complex want[] = {1.0, {0, 1}, -1.0, {0, -1}};
  for (int i = 0; i < 4; ++i) CHECK(std::abs(pts[i] - want[i]) < 1e-15);

  for (const auto& z : range_sample(cos_potential(), 1000)) {
    CHECK(z.imag() == 0.0);
    CHECK(std::abs(z.real()) <= 2.0);
  }
  for (const auto& z : range_sample(Potential(tent_potential()), 333)) CHECK(z.imag() == 0.0);
}

TEST_CASE("range sampling is consistent under refinement") {
  for (const Potential& v : {exp_potential(), cos_potential(), two_mode_potential(),
                             Potential(tent_potential())}) {
    for (int n : {16, 64, 256}) {
      const auto coarse = range_sample(v, n);
      const double bound = v.holder_constant() * std::pow(1.0 / n, v.holder_exponent());
      for (const auto& z : coarse) CHECK(dist_to_range(v, z, 2 * n) <= bound + 1e-14);
    }
  }
}

TEST_CASE("distance to the range") {
  // Sampling overestimates by the squared node offset, well below 1e-6 here.
  const double d1 = dist_to_range(cos_potential(), {1, 1}, 4096);
  CHECK(d1 >= 1.0);
  CHECK(d1 <= 1.0 + 1e-6);
  CHECK(dist_to_range(exp_potential(), 2.0, 8) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(dist_to_range(exp_potential(), unit_phase(0.3), 10) < 1e-15);
  // Non-increasing in n along nested grids.
  const Complex z(0.3, 1.7);
  double prev = 1e300;
  for (int n : {4, 8, 16, 32, 64}) {
    const double d = dist_to_range(two_mode_potential(), z, n);
    CHECK(d <= prev);
    prev = d;
  }
}

TEST_CASE("separable sums and sampled grids") {
  const Potential v(SeparableSum({cos_potential(), exp_potential()}));
  CHECK(v.dimension() == 2);
  const double th[] = {0.0, 0.25};
  CHECK(std::abs(v(th) - Complex(2, 1)) < 1e-15);
  CHECK(v.sup_norm() == doctest::Approx(3.0).epsilon(1e-6));

  std::vector<Complex> vals(16);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) vals[static_cast<std::size_t>(i * 4 + j)] = double(i + j);
  const Potential s(SampledGrid({4, 4}, vals));
  const double mid[] = {0.125, 0.0};
  CHECK(std::abs(s(mid) - 0.5) < 1e-15);
  CHECK_THROWS_AS(s.at(0.1), UsageError);
}

TEST_CASE("bad inputs") {
  CHECK_THROWS_AS(TrigPolynomial1D(0, {0.0, 0.0}), UsageError);
  CHECK_THROWS_AS(PiecewiseLinear1D({0, 0.5, 1}, {0, 0.5, 0.2}), UsageError);
  CHECK_THROWS_AS(range_sample(exp_potential(), 1), UsageError);
}

}
