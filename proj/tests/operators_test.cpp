#include "spectral_atlas/operators.hpp"
#include "spectral_atlas/oracles.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace atlas;
using namespace atlas::testing;

namespace {

const double kGolden = (std::sqrt(5.0) - 1) / 2;

BandedOperatorSpec dual_spec(Potential v, double lambda, double theta = 0.0) {
  return {Model::Dual, std::move(v), lambda, {kGolden}, 0.0, {theta}};
}

}  // namespace

TEST_SUITE("operators") {

TEST_CASE("dual truncation is lower bidiagonal") {
  const auto a = build_matrix(dual_spec(exp_potential(), 1.0, 0.1), 0, 2);
  REQUIRE(a.rows() == 3);
  for (int n = 0; n < 3; ++n) CHECK(std::abs(a(n, n) - unit_phase(0.1 + n * kGolden)) < 1e-15);
  CHECK(a(1, 0) == Complex(1.0));
  CHECK(a(2, 1) == Complex(1.0));
  CHECK(a(0, 1) == Complex(0.0));
  CHECK(a(2, 0) == Complex(0.0));
}

TEST_CASE("primal truncations") {
  BandedOperatorSpec s{Model::Primal, exp_potential(), 2.0, {kGolden}, 0.3, {}};
  const auto a = build_matrix(s, -2, 2);
  for (int i = 0; i < 5; ++i) {
    CHECK(std::abs(a(i, i) - 2.0 * unit_phase(0.3 + (i - 2) * kGolden)) < 1e-14);
    if (i > 0) CHECK(a(i, i - 1) == Complex(1.0));
    if (i < 4) CHECK(a(i, i + 1) == Complex(0.0));
  }
  // Coefficient of e^{2 pi i k t} multiplies u(n - k): k = 1 sits below the
  // diagonal, k = -1 above.
  s.potential = Potential(hatano_nelson(1.0));
  const auto h = build_matrix(s, 0, 3);
  CHECK(std::abs(h(1, 0) - std::exp(-1.0)) < 1e-15);
  CHECK(std::abs(h(0, 1) - std::exp(1.0)) < 1e-15);
  CHECK(h(2, 0) == Complex(0.0));

  CHECK_THROWS_AS(build_matrix(s, 0, 5000), UsageError);
  s.potential = Potential(tent_potential());
  CHECK_THROWS_AS(build_matrix(s, 0, 3), UsageError);
}

TEST_CASE("two-dimensional primal truncation") {
  BandedOperatorSpec s{Model::Primal, Potential(SeparableSum({exp_potential(), exp_potential()})),
                       1.0, {kGolden, std::sqrt(2.0) - 1}, 0.0, {}};
  const auto a = build_matrix_2d(s, 0, 2, 0, 3);
  REQUIRE(a.rows() == 12);
  // Site (a, b) -> index 4 a + b; e_1 shifts the first index, e_2 the second.
  CHECK(a(4 * 1 + 2, 4 * 0 + 2) == Complex(1.0));
  CHECK(a(4 * 1 + 2, 4 * 1 + 1) == Complex(1.0));
  CHECK(std::abs(a(5, 5) - unit_phase(kGolden + (std::sqrt(2.0) - 1))) < 1e-14);
  CHECK_THROWS_AS(build_matrix_2d(s, 0, 64, 0, 3), UsageError);
}

TEST_CASE("triangular eigenvalues are the diagonal") {
  const auto a = build_matrix(dual_spec(exp_potential(), 1.0), 0, 255);
  const auto e = eig_dense(a);
  CHECK(e.triangular);
  for (int i = 0; i < 256; ++i) CHECK(std::abs(e.values(i) - a(i, i)) <= 1e-12);
  CHECK(e.residual <= 1e-8 * e.norm);
}

TEST_CASE("companion matrix of z^3 - 1") {
  ComplexMatrix c = ComplexMatrix::Zero(3, 3);
  c(1, 0) = c(2, 1) = 1.0;
  c(0, 2) = 1.0;
  const auto e = eig_dense(c);
  CHECK_FALSE(e.triangular);
  CHECK(e.converged);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(std::pow(e.values(i), 3) - 1.0) < 1e-10);
}

TEST_CASE("eigenvalues are similarity invariant") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(1, 10);
  for (int trial = 0; trial < 10; ++trial) {
    ComplexMatrix a(10, 10);
    for (long i = 0; i < 10; ++i)
      for (long j = 0; j < 10; ++j) a(i, j) = normal_complex(rng);
    Eigen::VectorXd d(10);
    for (long i = 0; i < 10; ++i) d(i) = u(rng);
    const ComplexMatrix b = d.cwiseInverse().asDiagonal() * a * d.asDiagonal();
    const auto ea = eig_dense(a), eb = eig_dense(b);
    const std::vector<Complex> va(ea.values.data(), ea.values.data() + 10),
        vb(eb.values.data(), eb.values.data() + 10);
    CHECK(hausdorff(va, vb) <= 1e-6 * ea.norm);
  }
}

TEST_CASE("Floquet determinant examples") {
  const auto half = floquet_spectrum(exp_potential(), 1.0, {1, 2, std::nullopt}, 1, 1);
  REQUIRE(half.roots.size() == 2);
  for (const auto& z : half.roots) CHECK(std::abs(z) < 1e-7);

  const auto five = floquet_spectrum(exp_potential(), 1.0, {2, 5, std::nullopt}, 4, 6);
  CHECK(five.period == 5);
  CHECK(five.max_residual() <= 1e-8);
  for (std::size_t cell = 0; cell < five.cells(); ++cell) {
    const double theta = five.thetas[cell / 6][0];
    for (int i = 0; i < 5; ++i) {
      const Complex z = five.roots[cell * 5 + i];
      CHECK(std::abs(std::pow(z, 5) - unit_phase(5 * theta)) == doctest::Approx(1.0).epsilon(1e-10));
    }
  }

  const auto zero = floquet_spectrum(exp_potential(), 0.0, {1, 3, std::nullopt}, 2, 2);
  for (std::size_t cell = 0; cell < zero.cells(); ++cell) {
    const double theta = zero.thetas[cell / 2][0];
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(zero.roots[cell * 3 + j] - unit_phase(theta + j / 3.0)) < 1e-15);
  }
  CHECK_THROWS_AS(floquet_spectrum(exp_potential(), 1.0, {1, 600, std::nullopt}, 1, 1), UsageError);
}

TEST_CASE("two-dimensional Floquet period is the product") {
  const Potential v(SeparableSum({exp_potential(), exp_potential()}));
  const auto f = floquet_spectrum(v, 1.0, {1, 2, std::pair<std::int64_t, std::int64_t>{1, 3}}, 2, 2);
  CHECK(f.period == 6);
  CHECK(f.max_residual() <= 1e-8);
}

TEST_CASE("Weyl sequences") {
  const std::vector<double> theta{0.0}, alpha{kGolden};
  const auto psi = weyl_sequence(exp_potential(), 1.0, 0.3, theta, alpha, 10000);
  // Forward recursion reproduced backwards from the far end.
  double worst = 0;
  for (long n = 10000; n > -10000; --n) {
    const Complex d = Complex(0.3) - unit_phase(n * kGolden);
    const double back = psi.log_abs[static_cast<std::size_t>(n + psi.offset)] + std::log(std::abs(d));
    worst = std::max(worst, std::abs(back - psi.log_abs[static_cast<std::size_t>(n - 1 + psi.offset)]));
  }
  CHECK(worst <= 1e-10);

  const auto rep = weyl_certify(exp_potential(), 1.0, 0.3, theta, alpha, 10000);
  CHECK_FALSE(rep.orbit_hit);
  CHECK(rep.min_residual <= 0.1);
  CHECK(rep.tail_exponent <= 0.05);
  CHECK(std::abs(rep.check_residual - rep.residuals[static_cast<std::size_t>(
                     std::find(rep.windows.begin(), rep.windows.end(), rep.check_window) -
                     rep.windows.begin())]) <= 1e-12);

  const auto control = weyl_certify(exp_potential(), 0.1, 0.5, theta, alpha, 10000);
  CHECK(control.min_residual >= 0.3);

  const auto hit = weyl_certify(exp_potential(), 1.0, 1.0, theta, alpha, 100);
  CHECK(hit.orbit_hit);
  CHECK_THROWS_AS(weyl_sequence(exp_potential(), 1.0, 0.3, theta, alpha, 200000), UsageError);
}

TEST_CASE("band matrices") {
  ComplexMatrix a = ComplexMatrix::Zero(4, 4);
  a(1, 0) = 2.0;
  a(0, 0) = 1.0;
  const auto b = BandMatrix::from_dense(a, 1);
  CHECK(b(1, 0) == Complex(2.0));
  CHECK(b(3, 0) == Complex(0.0));
  CHECK(b.max_abs() == 2.0);
  a(3, 0) = 1.0;
  CHECK_THROWS_AS(BandMatrix::from_dense(a, 1), UsageError);
  ComplexVector x = ComplexVector::Ones(4);
  CHECK(b.apply(x)(1) == Complex(2.0));
}

TEST_CASE("window extraction") {
  BandMatrix zero(10, 1);
  ComplexVector psi = ComplexVector::Zero(10);
  psi(3) = 1.0;
  auto w = window_extract(zero, psi, 4);
  CHECK(w.ratio == 0.0);
  // Single candidate: the window is the whole vector.
  const auto t = dual_band(exp_potential(), 1.0, 0.3, {0.0}, {kGolden}, 0, 9);
  psi = ComplexVector::LinSpaced(10, 1.0, 2.0);
  w = window_extract(t, psi, 10);
  CHECK(w.start == 0);
  CHECK(w.ratio == doctest::Approx(w.epsilon).epsilon(1e-12));
  CHECK_THROWS_AS(window_extract(t, psi, 11), UsageError);

  // A near-eigenvector from the Weyl sequence obeys the window bound.
  const long n_max = 400;
  const auto seq = weyl_sequence(exp_potential(), 1.0, 0.3, {0.0}, {kGolden}, n_max);
  const auto band = dual_band(exp_potential(), 1.0, 0.3, {0.0}, {kGolden}, -n_max, n_max);
  ComplexVector v(2 * n_max + 1);
  for (long n = -n_max; n <= n_max; ++n) v(n + n_max) = seq.value(n);
  const long len = (2 * n_max + 1) / 4;
  const auto best = window_extract(band, v, len);
  CHECK(best.ratio <= best.bound);
  CHECK(best.constant == doctest::Approx(2.0 * band.max_abs()));
}

TEST_CASE("duality on periodic approximants") {
  const auto r = duality_check_periodic(*exp_potential().as<TrigPolynomial1D>(), 1.0, 2, 5, 8, 8);
  CHECK(r.hausdorff <= r.resolution_bound);
  const auto zero = duality_check_periodic(*exp_potential().as<TrigPolynomial1D>(), 0.0, 1, 3, 2, 2);
  for (const auto& z : zero.primal) CHECK(std::abs(std::abs(z) - 1.0) < 1e-12);
  CHECK_THROWS_AS(duality_check_periodic(*exp_potential().as<TrigPolynomial1D>(), 1.0, 1, 200, 2, 2),
                  UsageError);
}

}
