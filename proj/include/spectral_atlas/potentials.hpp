#pragma once

#include "spectral_atlas/common.hpp"
#include "spectral_atlas/geometry.hpp"

#include <memory>
#include <span>
#include <variant>
#include <vector>

namespace atlas {

class Potential;

// sum_{k=low}^{high} c_k e^{2 pi i k t}; zero coefficients at either end are
// trimmed so both end coefficients are nonzero.
class TrigPolynomial1D {
 public:
  TrigPolynomial1D(int low, std::vector<Complex> coefficients);

  int low() const { return low_; }
  int high() const { return low_ + static_cast<int>(coeffs_.size()) - 1; }
  int degree_span() const { return high() - low(); }
  Complex coefficient(int k) const;
  std::span<const Complex> coefficients() const { return coeffs_; }
  bool constant() const { return coeffs_.size() == 1 && low_ == 0; }

  Complex operator()(double t) const;
  double lipschitz() const;
  bool real_valued() const;

 private:
  int low_;
  std::vector<Complex> coeffs_;
};

// Continuous tent-like interpolant on the circle. Breaks run from 0 to 1 and
// the value at 1 must equal the value at 0.
class PiecewiseLinear1D {
 public:
  PiecewiseLinear1D(std::vector<double> breaks, std::vector<double> values);

  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<double>& values() const { return values_; }
  double operator()(double t) const;
  double lipschitz() const;

 private:
  std::vector<double> breaks_, values_;
};

// Samples on a uniform periodic grid, multilinear in between.
class SampledGrid {
 public:
  SampledGrid(std::vector<int> shape, std::vector<Complex> values, double holder_exponent = 1.0);

  int dimension() const { return static_cast<int>(shape_.size()); }
  const std::vector<int>& shape() const { return shape_; }
  const std::vector<Complex>& values() const { return values_; }
  double holder_exponent() const { return holder_exponent_; }
  double holder_constant() const;
  Complex operator()(std::span<const double> theta) const;

 private:
  std::vector<int> shape_;
  std::vector<Complex> values_;
  double holder_exponent_;
};

// V(theta) = sum_j W_j(theta_j), one one-dimensional part per coordinate.
class SeparableSum {
 public:
  explicit SeparableSum(std::vector<Potential> parts);

  int dimension() const { return static_cast<int>(parts_.size()); }
  const std::vector<Potential>& parts() const { return parts_; }
  Complex operator()(std::span<const double> theta) const;

 private:
  std::vector<Potential> parts_;
};

// Immutable, cheaply copyable handle over one of the representations above.
class Potential {
 public:
  using Representation =
      std::variant<TrigPolynomial1D, SeparableSum, PiecewiseLinear1D, SampledGrid>;

  Potential(TrigPolynomial1D p);
  Potential(SeparableSum p);
  Potential(PiecewiseLinear1D p);
  Potential(SampledGrid p);

  int dimension() const { return dim_; }
  double sup_norm() const { return sup_; }
  double holder_constant() const { return holder_constant_; }
  double holder_exponent() const { return holder_exponent_; }
  bool real_valued() const { return real_; }
  const Representation& representation() const { return *rep_; }

  template <class T>
  const T* as() const {
    return std::get_if<T>(rep_.get());
  }

  Complex operator()(std::span<const double> theta) const;
  // One-dimensional shortcut; throws for d != 1.
  Complex at(double t) const;

  // Points to grid-sample per coordinate when standing in for R(V).
  int default_range_samples() const { return dim_ == 1 ? 4096 : dim_ == 2 ? 512 : 64; }
  // Grid gap bound 3 L (1/n)^t used as the range-membership threshold.
  double range_tolerance(int n) const;

 private:
  void init_metadata();

  std::shared_ptr<const Representation> rep_;
  int dim_ = 1;
  double sup_ = 0, holder_constant_ = 0, holder_exponent_ = 1;
  bool real_ = false;
};

Complex evaluate(const Potential& v, std::span<const double> theta);

// V on the uniform n^d grid theta_j = i_j / n, first coordinate slowest.
std::vector<Complex> range_sample(const Potential& v, int n);

// Brute-force min |z - V| over range_sample(v, n).
double dist_to_range(const Potential& v, Complex z, int n);

// Range samples with a nearest-neighbour index, built once and shared.
class RangeIndex {
 public:
  RangeIndex(const Potential& v, int n);
  explicit RangeIndex(const Potential& v) : RangeIndex(v, v.default_range_samples()) {}

  int samples_per_axis() const { return n_; }
  double tolerance() const { return tolerance_; }
  const std::vector<Complex>& points() const { return index_.points(); }
  double distance(Complex z) const { return index_.nearest_distance(z); }
  bool contains(Complex z) const { return distance(z) <= tolerance_; }

 private:
  int n_;
  double tolerance_;
  PointIndex index_;
};

}  // namespace atlas
