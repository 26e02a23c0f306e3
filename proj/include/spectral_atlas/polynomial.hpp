#pragma once

#include "spectral_atlas/common.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <vector>

namespace atlas {

template <class Real>
struct RootSet {
  std::vector<std::complex<Real>> coefficients;  // ascending powers, trimmed
  std::vector<std::complex<Real>> roots;
  std::vector<Real> residual;        // |p(z_i)|
  std::vector<Real> backward_error;  // smallest max-norm coefficient change making z_i exact
  int iterations = 0;
  bool converged = false;

  int degree() const { return static_cast<int>(coefficients.size()) - 1; }
  Real coefficient_norm() const {
    Real m = 0;
    for (const auto& c : coefficients) m = std::max(m, std::abs(c));
    return m;
  }
  Real max_backward_error() const {
    Real m = 0;
    for (Real b : backward_error) m = std::max(m, b);
    return m;
  }
};

struct RootOptions {
  int max_iterations = 200;
  double step_tolerance = 1e-13;
};

namespace detail {

// Newton quotient p/p' and the pair (|p(z)|, sum |z|^k) for the backward
// error. For |z| > 1 the reversed polynomial in w = 1/z keeps everything
// bounded: p(z) = z^n r(w), so p/p' = z / (n - w r'(w) / r(w)).
template <class Real>
struct Evaluation {
  std::complex<Real> newton;
  Real residual;
  Real backward;
};

template <class Real>
Evaluation<Real> evaluate_at(std::span<const std::complex<Real>> c, std::complex<Real> z) {
  using C = std::complex<Real>;
  const int n = static_cast<int>(c.size()) - 1;
  const Real az = std::abs(z);
  if (az <= 1) {
    C p = c[static_cast<std::size_t>(n)], dp = 0;
    Real weight = 0;
    for (int k = n - 1; k >= 0; --k) {
      dp = dp * z + p;
      p = p * z + c[static_cast<std::size_t>(k)];
    }
    for (int k = n; k >= 0; --k) weight = weight * az + 1;
    const Real ap = std::abs(p);
    C newton = ap == 0 ? C(0) : (dp == C(0) ? C(std::numeric_limits<Real>::max()) : p / dp);
    return {newton, ap, ap / weight};
  }
  const C w = Real(1) / z;
  const Real aw = Real(1) / az;
  C r = c[0], dr = 0;
  Real weight = 0;
  for (int k = 1; k <= n; ++k) {
    dr = dr * w + r;
    r = r * w + c[static_cast<std::size_t>(k)];
  }
  for (int k = n; k >= 0; --k) weight = weight * aw + 1;
  const Real ar = std::abs(r);
  C newton = 0;
  if (ar != 0) {
    const C denom = Real(n) - w * dr / r;
    newton = denom == C(0) ? C(std::numeric_limits<Real>::max()) : z / denom;
  }
  // |p(z)| = |z|^n |r(w)| may overflow; keep it for the record only.
  return {newton, ar * std::pow(az, Real(n)), ar / weight};
}

}  // namespace detail

// All roots of sum_k c_k z^k by Aberth-Ehrlich simultaneous iteration.
template <class Real>
RootSet<Real> roots(std::span<const std::complex<Real>> coeffs, const RootOptions& opt = {}) {
  using C = std::complex<Real>;
  RootSet<Real> out;
  out.coefficients.assign(coeffs.begin(), coeffs.end());
  while (!out.coefficients.empty() && out.coefficients.back() == C(0)) out.coefficients.pop_back();
  if (out.coefficients.size() < 2) throw UsageError("root finding needs degree >= 1");
  for (const auto& c : out.coefficients)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw UsageError("polynomial coefficient is not finite");

  const auto& all = out.coefficients;
  std::size_t zeros = 0;
  while (all[zeros] == C(0)) ++zeros;
  std::vector<C> c(all.begin() + static_cast<long>(zeros), all.end());
  const int n = static_cast<int>(c.size()) - 1;

  std::vector<C> z(static_cast<std::size_t>(n));
  out.converged = true;
  if (n == 1) {
    z[0] = -c[0] / c[1];
  } else if (n > 1) {
    const Real radius =
        Real(1.1) * std::pow(std::abs(c[0]) / std::abs(c[static_cast<std::size_t>(n)]), Real(1) / n);
    for (int k = 0; k < n; ++k)
      z[static_cast<std::size_t>(k)] =
          std::polar(radius, Real(2 * kPi) * k / n + Real(0.4));
    const Real eps = std::numeric_limits<Real>::epsilon();
    out.converged = false;
    for (int it = 1; it <= opt.max_iterations && !out.converged; ++it) {
      out.iterations = it;
      bool done = true;
      for (int k = 0; k < n; ++k) {
        auto& zk = z[static_cast<std::size_t>(k)];
        const auto ev = detail::evaluate_at<Real>(c, zk);
        // A backward error at rounding level is as good as it gets; moving on
        // from there follows noise (clustered roots stall short of the step
        // test and can be thrown far off by the next correction).
        if (ev.residual == 0 || ev.backward <= 8 * n * eps * out.coefficient_norm()) continue;
        C sum = 0;
        for (int j = 0; j < n; ++j)
          if (j != k) {
            const C diff = zk - z[static_cast<std::size_t>(j)];
            if (diff != C(0)) sum += Real(1) / diff;
          }
        const C step = ev.newton / (Real(1) - ev.newton * sum);
        zk -= step;
        if (!(std::abs(step) <= Real(opt.step_tolerance) * (1 + std::abs(zk)))) done = false;
      }
      out.converged = done;
    }
  }
  out.roots.assign(zeros, C(0));
  out.roots.insert(out.roots.end(), z.begin(), z.end());
  for (const auto& r : out.roots) {
    const auto ev = detail::evaluate_at<Real>(all, r);
    out.residual.push_back(ev.residual);
    out.backward_error.push_back(ev.backward);
  }
  return out;
}

template <class Real>
RootSet<Real> roots(const std::vector<std::complex<Real>>& coeffs, const RootOptions& opt = {}) {
  return roots<Real>(std::span<const std::complex<Real>>(coeffs), opt);
}

// Ascending coefficients of prod_j (z - r_j), scaled to keep magnitudes
// near one; the dropped scale is returned as a natural log.
template <class Real>
std::vector<std::complex<Real>> expand_linear_factors(std::span<const std::complex<Real>> r,
                                                      Real& log_scale) {
  using C = std::complex<Real>;
  std::vector<C> acc{C(1)};
  log_scale = 0;
  std::vector<std::size_t> order(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(r[a]) > std::abs(r[b]); });
  for (std::size_t idx : order) {
    std::vector<C> next(acc.size() + 1, C(0));
    for (std::size_t k = 0; k < acc.size(); ++k) {
      next[k + 1] += acc[k];
      next[k] -= r[idx] * acc[k];
    }
    Real m = 0;
    for (const auto& v : next) m = std::max(m, std::abs(v));
    if (m > 0) {
      for (auto& v : next) v /= m;
      log_scale += std::log(m);
    }
    acc.swap(next);
  }
  return acc;
}

}  // namespace atlas
