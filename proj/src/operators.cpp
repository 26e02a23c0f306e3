#include "spectral_atlas/operators.hpp"

#include "spectral_atlas/geometry.hpp"
#include "spectral_atlas/polynomial.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace atlas {
namespace {

constexpr long kMaxRows = 4096;

double orbit_coordinate(double theta, long n, double alpha) {
  const long double t = static_cast<long double>(theta) +
                        static_cast<long double>(n) * static_cast<long double>(alpha);
  return static_cast<double>(t - std::floor(t));
}

Complex sample_orbit(const Potential& v, const std::vector<double>& theta,
                     const std::vector<double>& alpha, long n) {
  double th[8];
  for (std::size_t c = 0; c < theta.size(); ++c) th[c] = orbit_coordinate(theta[c], n, alpha[c]);
  return v(std::span<const double>(th, theta.size()));
}

const TrigPolynomial1D& hopping_of(const Potential& v) {
  if (const auto* t = v.as<TrigPolynomial1D>()) return *t;
  if (const auto* s = v.as<SeparableSum>())
    if (s->dimension() == 1)
      if (const auto* t = s->parts()[0].as<TrigPolynomial1D>()) return *t;
  throw UsageError("the primal model needs a trig polynomial potential (its Fourier data)");
}

void check_phase(const BandedOperatorSpec& spec) {
  const std::size_t d = static_cast<std::size_t>(spec.potential.dimension());
  if (spec.alpha.size() != d) throw UsageError("frequency has the wrong number of components");
  if (spec.model == Model::Dual && spec.theta.size() != d)
    throw UsageError("phase theta has the wrong number of components");
  if (d > 8) throw UsageError("torus dimension too large");
}

}  // namespace

ComplexMatrix build_matrix(const BandedOperatorSpec& spec, long first, long last) {
  const long size = last - first + 1;
  if (size < 1) throw UsageError("empty index range");
  if (size > kMaxRows) throw UsageError("truncation larger than 4096 rows");
  check_phase(spec);
  ComplexMatrix m = ComplexMatrix::Zero(size, size);
  if (spec.model == Model::Dual) {
    for (long i = 0; i < size; ++i) {
      m(i, i) = sample_orbit(spec.potential, spec.theta, spec.alpha, first + i);
      if (i > 0) m(i, i - 1) = spec.lambda;
    }
    return m;
  }
  if (spec.potential.dimension() != 1)
    throw UsageError("use build_matrix_2d for a two-dimensional primal lattice");
  const auto& v = hopping_of(spec.potential);
  for (long i = 0; i < size; ++i) {
    m(i, i) += spec.lambda * unit_phase(orbit_coordinate(spec.omega, first + i, spec.alpha[0]));
    for (int k = v.low(); k <= v.high(); ++k) {
      const long j = i - k;
      if (j >= 0 && j < size) m(i, j) += v.coefficient(k);
    }
  }
  return m;
}

ComplexMatrix build_matrix_2d(const BandedOperatorSpec& spec, long first0, long last0,
                              long first1, long last1) {
  if (spec.model != Model::Primal) throw UsageError("two-dimensional lattices are primal only");
  const long n0 = last0 - first0 + 1, n1 = last1 - first1 + 1;
  if (n0 < 1 || n1 < 1) throw UsageError("empty index rectangle");
  if (n0 > 64 || n1 > 64) throw UsageError("two-dimensional truncation larger than 64 x 64");
  const auto* sep = spec.potential.as<SeparableSum>();
  if (!sep || sep->dimension() != 2) throw UsageError("2-D primal needs a separable 2-D potential");
  const auto* w0 = sep->parts()[0].as<TrigPolynomial1D>();
  const auto* w1 = sep->parts()[1].as<TrigPolynomial1D>();
  if (!w0 || !w1) throw UsageError("2-D primal needs trig polynomial parts");
  if (spec.alpha.size() != 2) throw UsageError("frequency needs two components");
  const long size = n0 * n1;
  ComplexMatrix m = ComplexMatrix::Zero(size, size);
  auto index = [&](long a, long b) { return a * n1 + b; };
  for (long a = 0; a < n0; ++a)
    for (long b = 0; b < n1; ++b) {
      const long row = index(a, b);
      const long double t = static_cast<long double>(spec.omega) +
                            static_cast<long double>(first0 + a) * spec.alpha[0] +
                            static_cast<long double>(first1 + b) * spec.alpha[1];
      m(row, row) += spec.lambda * unit_phase(static_cast<double>(t - std::floor(t)));
      for (int k = w0->low(); k <= w0->high(); ++k)
        if (a - k >= 0 && a - k < n0) m(row, index(a - k, b)) += w0->coefficient(k);
      for (int k = w1->low(); k <= w1->high(); ++k)
        if (b - k >= 0 && b - k < n1) m(row, index(a, b - k)) += w1->coefficient(k);
    }
  return m;
}

// ---- eigenvalues

namespace {

// Eigenvector of a triangular matrix for its k-th diagonal entry by
// substitution, rescaled as it grows.
ComplexVector triangular_eigenvector(const ComplexMatrix& t, bool lower, long k, double tiny) {
  const long n = t.rows();
  ComplexVector v = ComplexVector::Zero(n);
  v(k) = 1.0;
  const Complex d = t(k, k);
  auto rescale = [&]() {
    const double m = v.cwiseAbs().maxCoeff();
    if (m > 1e100) v /= m;
  };
  if (lower) {
    for (long i = k + 1; i < n; ++i) {
      Complex s = 0;
      for (long j = k; j < i; ++j) s += t(i, j) * v(j);
      Complex den = t(i, i) - d;
      if (std::abs(den) < tiny) den = tiny;
      v(i) = -s / den;
      rescale();
    }
  } else {
    for (long i = k - 1; i >= 0; --i) {
      Complex s = 0;
      for (long j = i + 1; j <= k; ++j) s += t(i, j) * v(j);
      Complex den = t(i, i) - d;
      if (std::abs(den) < tiny) den = tiny;
      v(i) = -s / den;
      rescale();
    }
  }
  return v;
}

}  // namespace

EigenResult eig_dense(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw UsageError("eig_dense needs a square matrix");
  if (a.rows() > kMaxRows) throw UsageError("matrix larger than 4096 rows");
  const long n = a.rows();
  EigenResult out;
  out.norm = a.norm();
  if (n == 0) return out;
  bool upper = true, lower = true;
  for (long j = 0; j < n && (upper || lower); ++j)
    for (long i = 0; i < n; ++i) {
      if (i > j && a(i, j) != Complex(0)) upper = false;
      if (i < j && a(i, j) != Complex(0)) lower = false;
    }
  if (upper || lower) {
    out.triangular = true;
    out.values = a.diagonal();
    const double tiny = std::numeric_limits<double>::epsilon() * std::max(out.norm, 1e-300);
    const long samples = std::min<long>(n, 64);
    for (long s = 0; s < samples; ++s) {
      const long k = samples == 1 ? 0 : s * (n - 1) / (samples - 1);
      const ComplexVector v = triangular_eigenvector(a, lower && !upper, k, tiny);
      const double r = (a * v - out.values(k) * v).norm() / v.norm();
      out.residual = std::max(out.residual, r);
    }
    return out;
  }
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(a, true);
  out.converged = solver.info() == Eigen::Success;
  out.values = solver.eigenvalues();
  const ComplexMatrix& vecs = solver.eigenvectors();
  for (long k = 0; k < n; ++k) {
    const ComplexVector v = vecs.col(k);
    const double r = (a * v - out.values(k) * v).norm() / v.norm();
    out.residual = std::max(out.residual, r);
  }
  return out;
}

// ---- Floquet

double FloquetSpectrum::max_residual() const {
  double m = 0;
  for (double r : residuals) m = std::max(m, r);
  return m;
}

namespace {

struct DeterminantTarget {
  double log_modulus;  // log |K|, -inf for lambda = 0
  double phase;
};

// |P(z) - K| / max(|P(z)|, |K|) with P the product of (z - orbit_j), and the
// Newton step for P - K, both from the factored form.
std::pair<double, Complex> factored_residual(Complex z, const std::vector<Complex>& orbit,
                                             const DeterminantTarget& k) {
  double log_p = 0, arg_p = 0;
  Complex inv_sum = 0;
  for (const auto& w : orbit) {
    const Complex d = z - w;
    if (d == Complex(0)) return {1.0, 0.0};
    log_p += std::log(std::abs(d));
    arg_p += std::arg(d);
    inv_sum += 1.0 / d;
  }
  const Complex ratio = std::polar(std::exp(k.log_modulus - log_p), k.phase - arg_p);  // K / P
  const Complex one_minus = 1.0 - ratio;
  const double rel = std::abs(one_minus) * std::min(1.0, std::exp(log_p - k.log_modulus));
  const Complex step = inv_sum == Complex(0) ? Complex(0) : one_minus / inv_sum;
  return {rel, step};
}

}  // namespace

FloquetSpectrum floquet_spectrum(const Potential& v, double lambda, const RationalFrequency& f,
                                 int n_theta, int n_phi) {
  if (n_theta < 1 || n_phi < 1) throw UsageError("Floquet grids need at least one point");
  if (!(lambda >= 0)) throw UsageError("lambda must be >= 0");
  if (f.q < 1 || (f.second && f.second->second < 1)) throw UsageError("denominator must be >= 1");
  const int d = v.dimension();
  if ((d == 2) != f.second.has_value())
    throw UsageError("frequency components do not match the potential dimension");
  if (d > 2) throw UsageError("Floquet spectra support d <= 2");
  const std::int64_t period = f.period();
  if (period > 512) throw UsageError("Floquet period exceeds 512");

  FloquetSpectrum out;
  out.frequency = f;
  out.period = static_cast<int>(period);
  out.n_theta = n_theta;
  out.n_phi = n_phi;
  if (d == 1) {
    for (int a = 0; a < n_theta; ++a)
      out.thetas.push_back({double(a) / (double(f.q) * n_theta)});
  } else {
    for (int a = 0; a < n_theta; ++a)
      for (int b = 0; b < n_theta; ++b) out.thetas.push_back({double(a) / n_theta, double(b) / n_theta});
  }
  for (int k = 0; k < n_phi; ++k) out.phis.push_back(kTwoPi * k / n_phi);
  const std::size_t cells = out.thetas.size() * out.phis.size();
  const std::size_t q = static_cast<std::size_t>(period);
  out.roots.assign(cells * q, 0.0);
  out.residuals.assign(cells * q, 0.0);
  out.failed.assign(cells, 0);

  parallel_for(cells, [&](std::size_t cell) {
    const auto& theta = out.thetas[cell / out.phis.size()];
    const double phi = out.phis[cell % out.phis.size()];
    std::vector<Complex> orbit(q);
    for (std::int64_t j = 0; j < period; ++j) {
      double th[2];
      th[0] = wrap_unit(theta[0] + double((j * f.p) % f.q) / double(f.q));
      if (d == 2)
        th[1] = wrap_unit(theta[1] + double((j * f.second->first) % f.second->second) /
                                         double(f.second->second));
      orbit[static_cast<std::size_t>(j)] = v(std::span<const double>(th, static_cast<std::size_t>(d)));
    }
    Complex* cell_roots = out.roots.data() + cell * q;
    double* res = out.residuals.data() + cell * q;
    if (lambda == 0) {
      std::copy(orbit.begin(), orbit.end(), cell_roots);
      return;
    }
    const DeterminantTarget target{double(period) * std::log(lambda),
                                   phi + kPi * double(period + 1)};
    double log_scale = 0;
    auto c = expand_linear_factors<double>(orbit, log_scale);
    const double top = std::max(log_scale, target.log_modulus);
    const double keep = std::exp(log_scale - top);
    for (auto& x : c) x *= keep;
    c[0] -= std::polar(std::exp(target.log_modulus - top), target.phase);
    if (keep == 0) {
      out.failed[cell] = 1;
      return;
    }
    RootSet<double> rs;
    try {
      rs = roots<double>(c);
    } catch (const UsageError&) {
      out.failed[cell] = 1;
      return;
    }
    if (!rs.converged) out.failed[cell] = 1;
    for (std::size_t r = 0; r < q; ++r) {
      Complex z = rs.roots[r];
      auto [rel, step] = factored_residual(z, orbit, target);
      // The expanded coefficients carry cancellation error; polish against
      // the product itself.
      for (int it = 0; it < 6 && rel > 1e-15; ++it) {
        const Complex trial = z - step;
        auto [rel2, step2] = factored_residual(trial, orbit, target);
        if (!(rel2 < rel)) break;
        z = trial;
        rel = rel2;
        step = step2;
      }
      cell_roots[r] = z;
      res[r] = rel;
    }
  });
  return out;
}

double neighbour_gap(const std::vector<Complex>& roots, int per_cell, int n_theta, int n_phi,
                     int theta_axes) {
  const std::size_t pc = static_cast<std::size_t>(per_cell);
  const int thetas = theta_axes == 2 ? n_theta * n_theta : n_theta;
  auto cell_of = [&](int a, int k) { return static_cast<std::size_t>(a) * n_phi + k; };
  auto directed = [&](std::size_t c1, std::size_t c2) {
    double worst = 0;
    for (std::size_t i = 0; i < pc; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < pc; ++j)
        best = std::min(best, std::abs(roots[c1 * pc + i] - roots[c2 * pc + j]));
      worst = std::max(worst, best);
    }
    return worst;
  };
  std::vector<double> per(static_cast<std::size_t>(thetas) * n_phi, 0.0);
  parallel_for(per.size(), [&](std::size_t idx) {
    const int a = static_cast<int>(idx / static_cast<std::size_t>(n_phi));
    const int k = static_cast<int>(idx % static_cast<std::size_t>(n_phi));
    std::vector<std::size_t> nbrs{cell_of(a, (k + 1) % n_phi)};
    if (theta_axes == 2) {
      const int a0 = a / n_theta, a1 = a % n_theta;
      nbrs.push_back(cell_of(((a0 + 1) % n_theta) * n_theta + a1, k));
      nbrs.push_back(cell_of(a0 * n_theta + (a1 + 1) % n_theta, k));
    } else {
      nbrs.push_back(cell_of((a + 1) % n_theta, k));
    }
    double g = 0;
    for (auto nb : nbrs) g = std::max({g, directed(idx, nb), directed(nb, idx)});
    per[idx] = g;
  });
  return per.empty() ? 0.0 : *std::max_element(per.begin(), per.end());
}

std::vector<ApproximantLevel> approximant_convergence(const Potential& v, double lambda,
                                                      const ContinuedFraction& cf, int levels,
                                                      const std::vector<Complex>& reference) {
  if (reference.empty()) throw UsageError("empty reference set");
  if (v.dimension() != 1) throw UsageError("approximant convergence supports d = 1");
  PointIndex ref(reference);
  std::vector<ApproximantLevel> out;
  std::int64_t last_q = 0;
  for (std::size_t n = 1; n < cf.q.size() && static_cast<int>(out.size()) < levels; ++n) {
    const std::int64_t q = cf.q[n];
    if (q < 2 || q == last_q) continue;
    if (q > 512) break;
    last_q = q;
    const int grid = static_cast<int>(std::max<std::int64_t>(8, 4 * q));
    const auto fs = floquet_spectrum(v, lambda, {cf.p[n], q, std::nullopt}, grid, grid);
    ApproximantLevel lvl;
    lvl.p = cf.p[n];
    lvl.q = q;
    lvl.cloud_size = fs.roots.size();
    lvl.to_reference = directed_hausdorff(fs.roots, ref);
    lvl.from_reference = directed_hausdorff(reference, PointIndex(fs.roots));
    lvl.hausdorff = std::max(lvl.to_reference, lvl.from_reference);
    lvl.max_residual = fs.max_residual();
    out.push_back(lvl);
  }
  if (static_cast<int>(out.size()) < levels)
    throw UsageError("not enough convergents with 2 <= q <= 512 for the requested levels");
  return out;
}

// ---- Weyl sequences

Complex LogVector::value(long n) const {
  const auto i = static_cast<std::size_t>(n + offset);
  return std::polar(std::exp(log_abs[i]), phase[i]);
}

LogVector weyl_sequence(const Potential& v, double lambda, Complex z,
                        const std::vector<double>& theta, const std::vector<double>& alpha,
                        long n_max) {
  if (!(lambda > 0)) throw UsageError("Weyl sequences need lambda > 0");
  if (n_max < 1 || n_max > 100000) throw UsageError("N_max must lie in [1, 1e5]");
  if (theta.size() != static_cast<std::size_t>(v.dimension()) || alpha.size() != theta.size())
    throw UsageError("theta/alpha dimension mismatch");
  LogVector psi;
  psi.offset = n_max + 1;
  const std::size_t len = static_cast<std::size_t>(2 * n_max + 3);
  psi.log_abs.assign(len, 0.0);
  psi.phase.assign(len, 0.0);
  const double log_lambda = std::log(lambda);
  auto factor = [&](long n) {
    const Complex d = z - sample_orbit(v, theta, alpha, n);
    if (std::abs(d) < 1e-13) throw NumericalError("z hits the sampled orbit at n = " + std::to_string(n));
    return d;
  };
  for (long n = 1; n <= n_max + 1; ++n) {
    const Complex d = factor(n);
    const auto i = static_cast<std::size_t>(n + psi.offset);
    psi.log_abs[i] = psi.log_abs[i - 1] + log_lambda - std::log(std::abs(d));
    psi.phase[i] = psi.phase[i - 1] - std::arg(d);
  }
  for (long n = -1; n >= -n_max - 1; --n) {
    const Complex d = factor(n + 1);
    const auto i = static_cast<std::size_t>(n + psi.offset);
    psi.log_abs[i] = psi.log_abs[i + 1] + std::log(std::abs(d)) - log_lambda;
    psi.phase[i] = psi.phase[i + 1] + std::arg(d);
  }
  return psi;
}

namespace {

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

}  // namespace

WeylReport weyl_certify(const Potential& v, double lambda, Complex z,
                        const std::vector<double>& theta, const std::vector<double>& alpha,
                        long n_max) {
  WeylReport rep;
  rep.z = z;
  rep.lambda = lambda;
  rep.theta = theta;
  rep.alpha = alpha;
  LogVector psi;
  try {
    psi = weyl_sequence(v, lambda, z, theta, alpha, n_max);
  } catch (const NumericalError&) {
    rep.orbit_hit = true;
    return rep;
  }
  auto l = [&](long n) { return psi.log_abs[static_cast<std::size_t>(n + psi.offset)]; };
  const double log_lambda = std::log(lambda);
  double log_norm2 = 0;  // |psi_0| = 1
  rep.min_residual_any = std::numeric_limits<double>::infinity();
  long next_rung = 1;
  for (long n = 1; n <= n_max; ++n) {
    log_norm2 = log_add(log_norm2, log_add(2 * l(n), 2 * l(-n)));
    const double log_r = log_lambda + 0.5 * log_add(2 * l(-n - 1), 2 * l(n)) - 0.5 * log_norm2;
    const double r = std::exp(log_r);
    if (r < rep.min_residual_any) rep.min_residual_any = r;
    if (n == next_rung || n == n_max) {
      rep.windows.push_back(n);
      rep.residuals.push_back(r);
      if (n == next_rung) next_rung *= 2;
    }
  }
  const auto best = std::min_element(rep.residuals.begin(), rep.residuals.end());
  rep.min_residual = *best;
  rep.argmin = rep.windows[static_cast<std::size_t>(best - rep.residuals.begin())];
  for (long n = std::max<long>(1, n_max / 2); n <= n_max; ++n)
    rep.tail_exponent = std::max({rep.tail_exponent, std::abs(l(n)) / double(n),
                                  std::abs(l(-n)) / double(n)});

  // Direct check at the best rung: apply the operator to the truncated
  // sequence (rescaled to avoid overflow) on [-N-1, N+1].
  const long nc = rep.argmin;
  double top = -std::numeric_limits<double>::infinity();
  for (long n = -nc; n <= nc; ++n) top = std::max(top, l(n));
  const long first = -nc - 1, last = nc + 1;
  ComplexVector u = ComplexVector::Zero(last - first + 1);
  for (long n = -nc; n <= nc; ++n) {
    const auto i = static_cast<std::size_t>(n + psi.offset);
    u(n - first) = std::polar(std::exp(psi.log_abs[i] - top), psi.phase[i]);
  }
  const BandMatrix t = dual_band(v, lambda, z, theta, alpha, first, last);
  rep.check_window = nc;
  rep.check_residual = t.apply(u).norm() / u.norm();
  return rep;
}

// ---- band matrices and windows

BandMatrix::BandMatrix(long size, int half_width)
    : size_(size), m_(half_width), bands_(ComplexMatrix::Zero(size, 2 * half_width + 1)) {
  if (size < 1 || half_width < 0) throw UsageError("bad band matrix shape");
}

BandMatrix BandMatrix::from_dense(const ComplexMatrix& a, int half_width) {
  if (a.rows() != a.cols()) throw UsageError("band matrix must be square");
  BandMatrix b(a.rows(), half_width);
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j) {
      if (std::abs(i - j) <= half_width)
        b.set(i, j, a(i, j));
      else if (a(i, j) != Complex(0))
        throw UsageError("matrix has entries outside the stated band");
    }
  return b;
}

Complex BandMatrix::operator()(long i, long j) const {
  if (std::abs(i - j) > m_ || i < 0 || j < 0 || i >= size_ || j >= size_) return 0.0;
  return bands_(i, j - i + m_);
}

void BandMatrix::set(long i, long j, Complex v) {
  if (std::abs(i - j) > m_) throw UsageError("entry outside band");
  bands_(i, j - i + m_) = v;
}

double BandMatrix::max_abs() const { return bands_.cwiseAbs().maxCoeff(); }

ComplexVector BandMatrix::apply(const ComplexVector& x) const {
  ComplexVector y = ComplexVector::Zero(size_);
  for (long i = 0; i < size_; ++i) {
    Complex s = 0;
    for (long j = std::max(0L, i - m_); j <= std::min(size_ - 1, i + m_); ++j)
      s += bands_(i, j - i + m_) * x(j);
    y(i) = s;
  }
  return y;
}

BandMatrix dual_band(const Potential& v, double lambda, Complex z, const std::vector<double>& theta,
                     const std::vector<double>& alpha, long first, long last) {
  BandMatrix b(last - first + 1, 1);
  for (long i = 0; i < b.size(); ++i) {
    b.set(i, i, sample_orbit(v, theta, alpha, first + i) - z);
    if (i > 0) b.set(i, i - 1, lambda);
  }
  return b;
}

WindowResult window_extract(const BandMatrix& t, const ComplexVector& psi_in, long length) {
  const long n = t.size();
  if (psi_in.size() != n) throw UsageError("vector length does not match the matrix");
  if (length < 1 || length > n) throw UsageError("window length exceeds the support");
  const double psi_norm = psi_in.norm();
  if (psi_norm == 0) throw UsageError("zero vector");
  const ComplexVector psi = psi_in / psi_norm;
  const int m = t.half_width();
  const ComplexVector tpsi = t.apply(psi);

  std::vector<double> mass(static_cast<std::size_t>(n) + 1, 0.0), image(mass);
  for (long i = 0; i < n; ++i) {
    mass[static_cast<std::size_t>(i) + 1] = mass[static_cast<std::size_t>(i)] + std::norm(psi(i));
    image[static_cast<std::size_t>(i) + 1] = image[static_cast<std::size_t>(i)] + std::norm(tpsi(i));
  }
  auto window_row = [&](long i, long s) {
    Complex acc = 0;
    for (long j = std::max({0L, i - m, s}); j <= std::min({n - 1, i + m, s + length - 1}); ++j)
      acc += t(i, j) * psi(j);
    return std::norm(acc);
  };

  WindowResult best;
  best.length = length;
  best.ratio = std::numeric_limits<double>::infinity();
  for (long s = 0; s + length <= n; ++s) {
    const double w = mass[static_cast<std::size_t>(s + length)] - mass[static_cast<std::size_t>(s)];
    if (!(w > 0)) continue;
    // Rows whose whole stencil sits inside the window see T psi unchanged.
    const long lo = s + m, hi = s + length - 1 - m;
    double sq = 0;
    if (lo <= hi) {
      sq += image[static_cast<std::size_t>(hi) + 1] - image[static_cast<std::size_t>(lo)];
      for (long i = std::max(0L, s - m); i < lo; ++i) sq += window_row(i, s);
      for (long i = hi + 1; i <= std::min(n - 1, s + length - 1 + m); ++i) sq += window_row(i, s);
    } else {
      for (long i = std::max(0L, s - m); i <= std::min(n - 1, s + length - 1 + m); ++i)
        sq += window_row(i, s);
    }
    const double ratio = std::sqrt(std::max(sq, 0.0) / w);
    if (ratio < best.ratio) {
      best.ratio = ratio;
      best.start = s;
    }
  }
  if (!std::isfinite(best.ratio)) throw UsageError("no window carries any mass");
  best.window = ComplexVector::Zero(n);
  best.window.segment(best.start, length) = psi.segment(best.start, length);
  const double big_m = t.max_abs();
  best.constant = std::sqrt(4.0 * m * m * m) * big_m;
  best.epsilon = tpsi.norm();
  best.bound = best.constant / std::sqrt(double(length)) + best.epsilon;
  return best;
}

// ---- duality

DualityReport duality_check_periodic(const TrigPolynomial1D& v, double lambda, std::int64_t p,
                                     std::int64_t q, int n_theta, int n_phi) {
  if (q < 1 || q > 128) throw UsageError("duality check needs 1 <= q <= 128");
  if (n_theta < 1 || n_phi < 1) throw UsageError("grids need at least one point");
  const std::size_t qs = static_cast<std::size_t>(q);
  const std::size_t cells = static_cast<std::size_t>(n_theta) * static_cast<std::size_t>(n_phi);
  DualityReport rep;
  rep.primal.assign(cells * qs, 0.0);
  parallel_for(cells, [&](std::size_t cell) {
    const int a = static_cast<int>(cell / static_cast<std::size_t>(n_phi));
    const int k = static_cast<int>(cell % static_cast<std::size_t>(n_phi));
    const double omega = double(a) / (double(q) * n_theta);
    const double phi = kTwoPi * k / n_phi;
    ComplexMatrix block = ComplexMatrix::Zero(q, q);
    for (std::int64_t r = 0; r < q; ++r) {
      block(r, r) += lambda * unit_phase(omega + double((r * p) % q) / double(q));
      for (int kk = v.low(); kk <= v.high(); ++kk) {
        const std::int64_t col = r - kk;
        const std::int64_t c = ((col % q) + q) % q;
        const std::int64_t s = (col - c) / q;  // u(col) = e^{i s phi} u(c)
        block(r, c) += v.coefficient(kk) * std::polar(1.0, double(s) * phi);
      }
    }
    const auto eig = eig_dense(block);
    for (std::size_t i = 0; i < qs; ++i) rep.primal[cell * qs + i] = eig.values(static_cast<long>(i));
  });
  const auto fs = floquet_spectrum(Potential(v), lambda, {p, q, std::nullopt}, n_theta, n_phi);
  rep.dual = fs.roots;
  rep.hausdorff = hausdorff(rep.primal, rep.dual);
  rep.primal_gap = neighbour_gap(rep.primal, static_cast<int>(q), n_theta, n_phi);
  rep.dual_gap = neighbour_gap(rep.dual, static_cast<int>(q), n_theta, n_phi);
  rep.resolution_bound = rep.primal_gap + rep.dual_gap;
  return rep;
}

}  // namespace atlas
