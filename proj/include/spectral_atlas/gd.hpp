#pragma once

#include "spectral_atlas/common.hpp"
#include "spectral_atlas/polynomial.hpp"
#include "spectral_atlas/potentials.hpp"

#include <functional>
#include <memory>
#include <string>

namespace atlas {

enum class GdMethod { Quadrature, Jensen, Iterated, Oracle };

std::string to_string(GdMethod m);
GdMethod parse_method(const std::string& name);  // jensen | quad | quadrature | iterated

struct GdValue {
  double value = 0;
  double error_bound = 0;
  bool near_singular = false;
  bool converged = true;
  GdMethod method = GdMethod::Quadrature;
};

// Roots of w^{-s}(z - sum_k v_k w^k) with s = min(low, 0), the polynomial
// whose Jensen sum gives the integral of log|z - V|.
RootSet<double> jensen_roots(const TrigPolynomial1D& v, Complex z);

GdValue gd_jensen(const TrigPolynomial1D& v, Complex z);
GdValue gd_quadrature(const Potential& v, Complex z, double eps);
GdValue gd_iterated(const SeparableSum& v, Complex z, double eps);

// Tent potential t on [0, 1/2], 1 - t on [1/2, 1].
double gd_pwl_closed_form(Complex z);
PiecewiseLinear1D tent_potential();

// Immutable G evaluator bound to one potential and method.
class GdEvaluator {
 public:
  GdEvaluator(Potential v, GdMethod method, double eps = 0);
  // jensen for trig polynomials, iterated for separable sums ending in a trig
  // polynomial, quadrature otherwise.
  static GdEvaluator automatic(Potential v, double eps = 0);
  static GdEvaluator closed_form(Potential v, std::function<double(Complex)> g,
                                 double level_tolerance = 1e-8);

  GdValue operator()(Complex z) const;
  double value(Complex z) const { return (*this)(z).value; }

  const Potential& potential() const { return potential_; }
  GdMethod method() const { return method_; }
  double accuracy() const { return eps_; }
  double level_tolerance() const { return level_tolerance_; }
  const RangeIndex& range() const { return *range_; }
  double range_tolerance() const { return range_->tolerance(); }

 private:
  Potential potential_;
  GdMethod method_;
  double eps_;
  double level_tolerance_;
  std::function<double(Complex)> closed_;
  std::shared_ptr<const RangeIndex> range_;
};

enum class GradientPath { Automatic, Integral, Difference };

struct Gradient {
  double dx = 0, dy = 0;
  GradientPath path = GradientPath::Automatic;
};

Gradient gd_gradient(const GdEvaluator& ev, Complex z, double h,
                     GradientPath path = GradientPath::Automatic);

}  // namespace atlas
