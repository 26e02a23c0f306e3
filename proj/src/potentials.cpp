#include "spectral_atlas/potentials.hpp"

#include <algorithm>
#include <numeric>

namespace atlas {

// ---- TrigPolynomial1D

TrigPolynomial1D::TrigPolynomial1D(int low, std::vector<Complex> coefficients)
    : low_(low), coeffs_(std::move(coefficients)) {
  while (!coeffs_.empty() && coeffs_.back() == Complex(0)) coeffs_.pop_back();
  std::size_t lead = 0;
  while (lead < coeffs_.size() && coeffs_[lead] == Complex(0)) ++lead;
  if (coeffs_.empty()) throw UsageError("trig polynomial has no nonzero coefficient");
  coeffs_.erase(coeffs_.begin(), coeffs_.begin() + static_cast<long>(lead));
  low_ += static_cast<int>(lead);
  for (const auto& c : coeffs_)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw UsageError("trig polynomial coefficient is not finite");
}

Complex TrigPolynomial1D::coefficient(int k) const {
  if (k < low_ || k > high()) return 0.0;
  return coeffs_[static_cast<std::size_t>(k - low_)];
}

Complex TrigPolynomial1D::operator()(double t) const {
  const Complex w = unit_phase(t);
  Complex s = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) s = s * w + *it;
  if (low_ == 0) return s;
  return s * unit_phase(wrap_unit(t) * low_);
}

double TrigPolynomial1D::lipschitz() const {
  double l = 0;
  for (int k = low(); k <= high(); ++k) l += kTwoPi * std::abs(k) * std::abs(coefficient(k));
  return l;
}

bool TrigPolynomial1D::real_valued() const {
  double scale = 0;
  for (const auto& c : coeffs_) scale = std::max(scale, std::abs(c));
  for (int k = low(); k <= high(); ++k)
    if (std::abs(coefficient(k) - std::conj(coefficient(-k))) > 1e-14 * scale) return false;
  return true;
}

// ---- PiecewiseLinear1D

PiecewiseLinear1D::PiecewiseLinear1D(std::vector<double> breaks, std::vector<double> values)
    : breaks_(std::move(breaks)), values_(std::move(values)) {
  if (breaks_.size() < 2 || breaks_.size() != values_.size())
    throw UsageError("pwl potential needs matching breaks and values (at least two)");
  if (breaks_.front() != 0.0 || breaks_.back() != 1.0)
    throw UsageError("pwl breaks must start at 0 and end at 1");
  for (std::size_t i = 1; i < breaks_.size(); ++i)
    if (!(breaks_[i] > breaks_[i - 1])) throw UsageError("pwl breaks must increase strictly");
  if (values_.front() != values_.back())
    throw UsageError("pwl potential must be continuous on the circle (first value == last)");
}

double PiecewiseLinear1D::operator()(double t) const {
  t = wrap_unit(t);
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
  std::size_t i = static_cast<std::size_t>(std::distance(breaks_.begin(), it));
  if (i == 0) i = 1;
  if (i >= breaks_.size()) i = breaks_.size() - 1;
  const double a = breaks_[i - 1], b = breaks_[i];
  const double s = (t - a) / (b - a);
  return values_[i - 1] + s * (values_[i] - values_[i - 1]);
}

double PiecewiseLinear1D::lipschitz() const {
  double l = 0;
  for (std::size_t i = 1; i < breaks_.size(); ++i)
    l = std::max(l, std::abs(values_[i] - values_[i - 1]) / (breaks_[i] - breaks_[i - 1]));
  return l;
}

// ---- SampledGrid

SampledGrid::SampledGrid(std::vector<int> shape, std::vector<Complex> values,
                         double holder_exponent)
    : shape_(std::move(shape)), values_(std::move(values)), holder_exponent_(holder_exponent) {
  if (shape_.empty() || shape_.size() > 2)
    throw UsageError("sampled potential must be one- or two-dimensional");
  std::size_t total = 1;
  for (int n : shape_) {
    if (n < 2) throw UsageError("sampled potential needs at least two nodes per axis");
    total *= static_cast<std::size_t>(n);
  }
  if (values_.size() != total) throw UsageError("sampled potential: value count != grid size");
  if (!(holder_exponent_ > 0 && holder_exponent_ <= 1))
    throw UsageError("holder exponent must lie in (0, 1]");
}

Complex SampledGrid::operator()(std::span<const double> theta) const {
  if (static_cast<int>(theta.size()) != dimension())
    throw UsageError("dimension mismatch evaluating sampled potential");
  if (dimension() == 1) {
    const int n = shape_[0];
    const double u = wrap_unit(theta[0]) * n;
    const int i = static_cast<int>(u) % n;
    const double f = u - std::floor(u);
    return (1 - f) * values_[static_cast<std::size_t>(i)] +
           f * values_[static_cast<std::size_t>((i + 1) % n)];
  }
  const int n0 = shape_[0], n1 = shape_[1];
  const double u = wrap_unit(theta[0]) * n0, v = wrap_unit(theta[1]) * n1;
  const int i = static_cast<int>(u) % n0, j = static_cast<int>(v) % n1;
  const double f = u - std::floor(u), g = v - std::floor(v);
  auto at = [&](int a, int b) {
    return values_[static_cast<std::size_t>((a % n0) * n1 + (b % n1))];
  };
  return (1 - f) * (1 - g) * at(i, j) + f * (1 - g) * at(i + 1, j) + (1 - f) * g * at(i, j + 1) +
         f * g * at(i + 1, j + 1);
}

double SampledGrid::holder_constant() const {
  double total = 0;
  const int d = dimension();
  for (int axis = 0; axis < d; ++axis) {
    double jump = 0;
    const int n0 = shape_[0], n1 = d == 2 ? shape_[1] : 1;
    for (int i = 0; i < n0; ++i)
      for (int j = 0; j < n1; ++j) {
        const int ni = axis == 0 ? (i + 1) % n0 : i;
        const int nj = axis == 1 ? (j + 1) % n1 : j;
        jump = std::max(jump, std::abs(values_[static_cast<std::size_t>(i * n1 + j)] -
                                       values_[static_cast<std::size_t>(ni * n1 + nj)]));
      }
    total += jump * std::pow(static_cast<double>(shape_[static_cast<std::size_t>(axis)]),
                             holder_exponent_);
  }
  return total;
}

// ---- SeparableSum

SeparableSum::SeparableSum(std::vector<Potential> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw UsageError("separable potential needs at least one part");
  for (const auto& p : parts_)
    if (p.dimension() != 1) throw UsageError("separable parts must be one-dimensional");
}

Complex SeparableSum::operator()(std::span<const double> theta) const {
  if (theta.size() != parts_.size())
    throw UsageError("dimension mismatch evaluating separable potential");
  Complex s = 0;
  for (std::size_t j = 0; j < parts_.size(); ++j) s += parts_[j].at(theta[j]);
  return s;
}

// ---- Potential

Potential::Potential(TrigPolynomial1D p)
    : rep_(std::make_shared<const Representation>(std::move(p))) {
  init_metadata();
}
Potential::Potential(SeparableSum p)
    : rep_(std::make_shared<const Representation>(std::move(p))) {
  init_metadata();
}
Potential::Potential(PiecewiseLinear1D p)
    : rep_(std::make_shared<const Representation>(std::move(p))) {
  init_metadata();
}
Potential::Potential(SampledGrid p)
    : rep_(std::make_shared<const Representation>(std::move(p))) {
  init_metadata();
}

void Potential::init_metadata() {
  struct Meta {
    int dim;
    double constant, exponent;
    bool real;
  };
  const Meta m = std::visit(
      [](const auto& r) -> Meta {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, TrigPolynomial1D>) {
          return {1, r.lipschitz(), 1.0, r.real_valued()};
        } else if constexpr (std::is_same_v<T, PiecewiseLinear1D>) {
          return {1, r.lipschitz(), 1.0, true};
        } else if constexpr (std::is_same_v<T, SampledGrid>) {
          bool real = std::all_of(r.values().begin(), r.values().end(),
                                  [](Complex c) { return c.imag() == 0; });
          return {r.dimension(), r.holder_constant(), r.holder_exponent(), real};
        } else {
          Meta acc{r.dimension(), 0.0, 1.0, true};
          for (const auto& p : r.parts()) {
            acc.constant += p.holder_constant();
            acc.exponent = std::min(acc.exponent, p.holder_exponent());
            acc.real = acc.real && p.real_valued();
          }
          return acc;
        }
      },
      *rep_);
  dim_ = m.dim;
  holder_constant_ = m.constant;
  holder_exponent_ = m.exponent;
  real_ = m.real;
  if (dim_ > 2 && !as<SeparableSum>())
    throw UsageError("potentials beyond two dimensions must be separable");
  sup_ = 0;
  for (const auto& z : range_sample(*this, default_range_samples()))
    sup_ = std::max(sup_, std::abs(z));
}

Complex Potential::operator()(std::span<const double> theta) const {
  if (static_cast<int>(theta.size()) != dim_)
    throw UsageError("dimension mismatch: potential is " + std::to_string(dim_) +
                     "-dimensional, point has " + std::to_string(theta.size()) +
                     " coordinates");
  Complex v = std::visit(
      [&](const auto& r) -> Complex {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, TrigPolynomial1D> ||
                      std::is_same_v<T, PiecewiseLinear1D>)
          return r(theta[0]);
        else
          return r(theta);
      },
      *rep_);
  return real_ ? Complex(v.real(), 0.0) : v;
}

Complex Potential::at(double t) const {
  const double th[1] = {t};
  return (*this)(std::span<const double>(th, 1));
}

double Potential::range_tolerance(int n) const {
  return 3.0 * holder_constant_ * std::pow(1.0 / n, holder_exponent_);
}

Complex evaluate(const Potential& v, std::span<const double> theta) { return v(theta); }

std::vector<Complex> range_sample(const Potential& v, int n) {
  if (n < 2) throw UsageError("range_sample needs n >= 2");
  const int d = v.dimension();
  if (const auto* sep = v.as<SeparableSum>()) {
    // Combine per-coordinate samples instead of evaluating the full grid.
    std::vector<Complex> out{0.0};
    for (const auto& part : sep->parts()) {
      std::vector<Complex> axis(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) axis[static_cast<std::size_t>(i)] = part.at(double(i) / n);
      std::vector<Complex> next;
      next.reserve(out.size() * axis.size());
      for (const auto& a : out)
        for (const auto& b : axis) next.push_back(a + b);
      out.swap(next);
    }
    if (v.real_valued())
      for (auto& z : out) z = {z.real(), 0.0};
    return out;
  }
  std::vector<Complex> out;
  if (d == 1) {
    out.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = v.at(double(i) / n);
  } else {
    out.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double th[2] = {double(i) / n, double(j) / n};
        out.push_back(v(std::span<const double>(th, 2)));
      }
  }
  return out;
}

double dist_to_range(const Potential& v, Complex z, int n) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& w : range_sample(v, n)) best = std::min(best, std::abs(z - w));
  return best;
}

RangeIndex::RangeIndex(const Potential& v, int n)
    : n_(n), tolerance_(v.range_tolerance(n)), index_(range_sample(v, n)) {}

}  // namespace atlas
