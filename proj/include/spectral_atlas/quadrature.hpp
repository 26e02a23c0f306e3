#pragma once

#include "spectral_atlas/common.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <type_traits>

namespace atlas {

struct QuadratureResult {
  double value = 0;
  double error = 0;  // sum of panel-pair differences
  double bias = 0;   // regularization bias removed on floor-width panels
  bool near_singular = false;
  bool exhausted = false;  // evaluation budget ran out before tolerance was met
  long evaluations = 0;

  double bound() const { return error + bias; }
};

struct AdaptiveOptions {
  double tolerance = 1e-10;   // absolute, over the whole interval
  double floor_width = 0x1p-30;
  long max_evaluations = 4'000'000;
  // Only for log-modulus integrands.
  double cut_radius = 1e-3;
  double delta = 1e-8;
};

// 16-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre16 {
  std::array<double, 16> nodes, weights;
};
const GaussLegendre16& gauss_legendre16();

namespace detail {

template <class F, bool LogModulus>
class Adaptive {
 public:
  Adaptive(F& f, const AdaptiveOptions& o, double total) : f_(f), o_(o), total_(total) {}

  struct Panel {
    double value, minimum;
  };

  Panel eval(double a, double b, bool regularized = false) {
    const auto& gl = gauss_legendre16();
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0, lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 16; ++i) {
      const double y = f_(c + h * gl.nodes[i]);
      if constexpr (LogModulus) {
        lo = std::min(lo, y);
        s += gl.weights[i] * (regularized ? std::log(y + o_.delta) : std::log(y));
      } else {
        s += gl.weights[i] * y;
      }
    }
    result.evaluations += 16;
    return {s * h, lo};
  }

  double bias(double a, double b) {
    const auto& gl = gauss_legendre16();
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0;
    for (int i = 0; i < 16; ++i) {
      const double m = std::max(f_(c + h * gl.nodes[i]), 1e-300);
      s += gl.weights[i] * std::log1p(o_.delta / m);
    }
    result.evaluations += 16;
    return s * h;
  }

  void refine(double a, double b, Panel whole) {
    const double mid = 0.5 * (a + b);
    const Panel left = eval(a, mid), right = eval(mid, b);
    const double pair = left.value + right.value;
    const double diff = std::abs(pair - whole.value);
    const double local = o_.tolerance * (b - a) / total_;
    if (std::isfinite(pair) && diff <= local) {
      result.value += pair;
      result.error += diff;
      return;
    }
    if (result.evaluations >= o_.max_evaluations) {
      result.exhausted = true;
      result.value += pair;
      result.error += std::isfinite(diff) ? diff : std::abs(pair);
      return;
    }
    if (0.5 * (b - a) < o_.floor_width) {
      if constexpr (LogModulus) {
        if (std::min(left.minimum, right.minimum) < o_.cut_radius || !std::isfinite(pair)) {
          const Panel rl = eval(a, mid, true), rr = eval(mid, b, true);
          const Panel rw = eval(a, b, true);
          const double shift = bias(a, mid) + bias(mid, b);
          result.value += rl.value + rr.value - shift;
          result.error += std::abs(rl.value + rr.value - rw.value);
          result.bias += shift;
          result.near_singular = true;
          return;
        }
      }
      result.value += pair;
      result.error += diff;
      return;
    }
    refine(a, mid, left);
    refine(mid, b, right);
  }

  QuadratureResult result;

 private:
  F& f_;
  const AdaptiveOptions& o_;
  double total_;
};

template <bool LogModulus, class F>
QuadratureResult adaptive_gauss(F&& f, std::span<const double> breaks, const AdaptiveOptions& o) {
  if (breaks.size() < 2) throw UsageError("quadrature needs at least one panel");
  const double total = breaks.back() - breaks.front();
  Adaptive<std::remove_reference_t<F>, LogModulus> run(f, o, total);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    if (!(b > a)) continue;
    run.refine(a, b, run.eval(a, b));
  }
  return run.result;
}

}  // namespace detail

// Integral of f over consecutive panels [breaks[i], breaks[i+1]].
template <class F>
QuadratureResult integrate(F&& f, std::span<const double> breaks, const AdaptiveOptions& o) {
  return detail::adaptive_gauss<false>(std::forward<F>(f), breaks, o);
}

// Integral of log(m(t)) for a modulus m >= 0 that may vanish. Panels that
// reach the floor width close to a zero are integrated as log(m + delta) and
// the estimated bias of doing so is subtracted; its size is kept in `bias` as
// the allowance for that estimate.
template <class M>
QuadratureResult integrate_log_modulus(M&& m, std::span<const double> breaks,
                                       const AdaptiveOptions& o) {
  return detail::adaptive_gauss<true>(std::forward<M>(m), breaks, o);
}

}  // namespace atlas
