#include "spectral_atlas/oracles.hpp"

#include "spectral_atlas/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace atlas {

std::string to_string(Membership m) {
  switch (m) {
    case Membership::Out: return "out";
    case Membership::In: return "in";
    case Membership::Boundary: return "boundary";
  }
  return "out";
}

namespace {

constexpr int kCurveSamples = 4096;

Polyline sample_closed(const std::function<Complex(double)>& curve, int n = kCurveSamples) {
  Polyline line;
  line.closed = true;
  line.points.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) line.points.push_back(curve(double(i) / n));
  return line;
}

Polyline circle(double r, Complex c = 0.0) {
  return sample_closed([=](double t) { return c + r * unit_phase(t); });
}

Polyline segment(Complex a, Complex b, int n = 512) {
  Polyline line;
  for (int i = 0; i <= n; ++i) line.points.push_back(a + (b - a) * (double(i) / n));
  return line;
}

// Distance from z to a closed parametrized curve: dense sampling, then golden
// section on the bracket around the best sample.
double curve_distance(const std::function<Complex(double)>& curve, Complex z, int n = kCurveSamples) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double d = std::abs(z - curve(double(i) / n));
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  double a = double(best - 1) / n, b = double(best + 1) / n;
  const double phi = 0.5 * (std::sqrt(5.0) - 1);
  auto f = [&](double t) { return std::abs(z - curve(t)); };
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 80 && b - a > 1e-16; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return std::min({best_d, fc, fd});
}

// Smaller root modulus of e^{-g} x^2 - z x + e^{g}.
double hn_inner_modulus(Complex g, Complex z) {
  const Complex a = std::exp(-g), c = std::exp(g);
  const Complex disc = std::sqrt(z * z - 4.0 * a * c);
  const Complex q = std::abs(z + disc) >= std::abs(z - disc) ? 0.5 * (z + disc) : 0.5 * (z - disc);
  if (q == Complex(0)) return std::sqrt(std::abs(c / a));
  return std::min(std::abs(q / a), std::abs(c / q));
}

bool same_lambda(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, b); }

// The classifier resolves G = log lambda only to the level tolerance, so a
// coupling that close to a critical value behaves as the critical one.
double resolved_lambda(double lambda, double critical, double level_tolerance) {
  return std::abs(std::log(lambda) - std::log(critical)) <= level_tolerance ? critical : lambda;
}

Complex two5_curve(double t) { return unit_phase(t) + 2.0 * unit_phase(2 * t); }

double two5_loop_start() { return std::acos(-0.25) / kTwoPi; }

const std::vector<Complex>& two5_inner_loop() {
  static const std::vector<Complex> loop = [] {
    const double t0 = two5_loop_start(), t1 = 1 - t0;
    std::vector<Complex> pts;
    for (int i = 0; i < kCurveSamples; ++i) pts.push_back(two5_curve(t0 + (t1 - t0) * i / kCurveSamples));
    return pts;
  }();
  return loop;
}

// Ray from 1/4 at angle t to the tent level curve G = level.
Complex pwl_level_point(double level, double t) {
  const Complex dir = unit_phase(t);
  double lo = 0, hi = 0.5;
  while (gd_pwl_closed_form(0.25 + hi * dir) <= level) hi *= 2;
  for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (gd_pwl_closed_form(0.25 + mid * dir) <= level ? lo : hi) = mid;
  }
  return 0.25 + 0.5 * (lo + hi) * dir;
}

}  // namespace

Membership oracle_monomial(double lambda, Complex z) {
  if (!(lambda >= 0)) throw UsageError("lambda must be >= 0");
  const double r = std::abs(z);
  if (same_lambda(lambda, 1.0)) {
    if (std::abs(r - 1) <= kCurveTolerance) return Membership::Boundary;
    return r < 1 ? Membership::In : Membership::Out;
  }
  const double radius = lambda < 1 ? 1.0 : lambda;
  return std::abs(r - radius) <= kCurveTolerance ? Membership::In : Membership::Out;
}

// ---- radial profile

RadialProfile::RadialProfile(std::function<double(double)> g, double r_max, int samples)
    : g_(std::move(g)), r_max_(r_max) {
  if (!(r_max > 0) || samples < 2) throw UsageError("bad radial profile range");
  radii_.resize(static_cast<std::size_t>(samples));
  values_.resize(radii_.size());
  for (int i = 0; i < samples; ++i) radii_[static_cast<std::size_t>(i)] = r_max * i / (samples - 1);
  parallel_for(radii_.size(), [&](std::size_t i) { values_[i] = g_(radii_[i]); });
  for (std::size_t i = 1; i < values_.size(); ++i)
    if (values_[i] < values_[i - 1] - 1e-7)
      throw NumericalError("radial profile of G is not monotone near r = " +
                           std::to_string(radii_[i]));
}

double RadialProfile::interpolate(double r) const {
  if (r <= 0) return values_.front();
  if (r >= r_max_) return values_.back();
  const double f = r / r_max_ * double(radii_.size() - 1);
  const auto i = std::min(static_cast<std::size_t>(f), radii_.size() - 2);
  const double w = f - double(i);
  return (1 - w) * values_[i] + w * values_[i + 1];
}

double RadialProfile::invert(double level) const {
  if (level <= values_.front()) return 0;
  if (level > values_.back()) throw UsageError("level above the sampled radial profile");
  const auto it = std::lower_bound(values_.begin(), values_.end(), level);
  const auto i = static_cast<std::size_t>(it - values_.begin());
  double lo = radii_[i - 1], hi = radii_[i];
  for (int k = 0; k < 100 && hi - lo > 1e-13 * std::max(1.0, hi); ++k) {
    const double mid = 0.5 * (lo + hi);
    (g_(mid) < level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Membership oracle_cosine_sum(int d, double lambda, Complex z, const RadialProfile& profile) {
  if (d < 2) throw UsageError("the annulus case needs d >= 2");
  if (!(lambda >= 0)) throw UsageError("lambda must be >= 0");
  const double r = std::abs(z), dd = d;
  const double lambda1 = std::exp(profile.at_origin());
  auto disc_outer = [&](double inner) {
    if (std::abs(r - dd) <= kCurveTolerance || (inner > 0 && std::abs(r - inner) <= kCurveTolerance))
      return Membership::Boundary;
    return r >= inner && r <= dd ? Membership::In : Membership::Out;
  };
  if (lambda <= lambda1) return disc_outer(0);
  if (lambda < dd) return disc_outer(profile.invert(std::log(lambda)));
  return std::abs(r - lambda) <= kCurveTolerance ? Membership::In : Membership::Out;
}

// ---- Hatano-Nelson

TrigPolynomial1D hatano_nelson(Complex g) {
  return TrigPolynomial1D(-1, {std::exp(g), 0.0, std::exp(-g)});
}

SeparableSum hatano_nelson_2d(double g) {
  return SeparableSum({Potential(TrigPolynomial1D(-1, {1.0, 0.0, 1.0})), Potential(hatano_nelson(g))});
}

Membership oracle_hn_1d(Complex g, double lambda, Complex z) {
  if (g.real() < 0) throw UsageError("Hatano-Nelson oracle needs Re g >= 0");
  if (!(lambda >= 0)) throw UsageError("lambda must be >= 0");
  const double a = g.real(), ea = std::exp(a);
  const double r1 = hn_inner_modulus(g, z);
  if (same_lambda(lambda, ea)) {
    if (std::abs(r1 - 1) <= kCurveTolerance) return Membership::Boundary;
    return r1 > 1 ? Membership::In : Membership::Out;
  }
  const double eta = lambda < ea ? 1.0 : ea / lambda;
  return std::abs(r1 - eta) <= kCurveTolerance ? Membership::In : Membership::Out;
}

Membership oracle_hn_2d(double g, double lambda, Complex z) {
  if (!(g > 0)) throw UsageError("two-dimensional Hatano-Nelson oracle needs g > 0");
  if (!(lambda >= 0)) throw UsageError("lambda must be >= 0");
  const double eg = std::exp(g);
  if (lambda > eg && !same_lambda(lambda, eg))
    throw UsageError("no closed form above lambda = e^g; use the level-set path");
  const double ax = eg + 1 / eg, by = eg - 1 / eg;
  const double x = std::abs(z.real()), y = std::abs(z.imag());
  if (y > by * (1 + 1e-15)) return Membership::Out;
  const double s = std::sqrt(std::max(0.0, 1 - (y / by) * (y / by)));
  const double reach = ax * s;  // the ellipse meets this horizontal line at +-reach
  if (same_lambda(lambda, eg)) {
    if (std::abs(x - (reach + 2)) <= kCurveTolerance) return Membership::Boundary;
    return x <= reach + 2 ? Membership::In : Membership::Out;
  }
  return std::abs(x - reach) <= 2 + kCurveTolerance ? Membership::In : Membership::Out;
}

Membership oracle_two5(Complex z) {
  if (curve_distance(two5_curve, z) <= kCurveTolerance) return Membership::In;
  return inside_polygon(z, two5_inner_loop()) ? Membership::In : Membership::Out;
}

std::pair<double, double> pwl_thresholds() {
  // G on [0, 1/2] is symmetric about 1/4 and increases away from it.
  return {std::exp(gd_pwl_closed_form(0.25)), std::exp(gd_pwl_closed_form(0.0))};
}

Membership oracle_pwl(double lambda, Complex z) {
  if (!(lambda >= 0)) throw UsageError("lambda must be >= 0");
  if (lambda == 0)
    return z.imag() == 0 && z.real() >= 0 && z.real() <= 0.5 ? Membership::In : Membership::Out;
  const double f = gd_pwl_closed_form(z) - std::log(lambda);
  if (std::abs(f) <= 1e-10) return Membership::In;
  const bool on_segment = std::abs(z.imag()) <= kCurveTolerance && z.real() >= -kCurveTolerance &&
                          z.real() <= 0.5 + kCurveTolerance;
  return on_segment && f > 0 ? Membership::In : Membership::Out;
}

// ---- oracle spectra

void OracleSpectrum::index_boundaries() {
  const double scale = std::max(frame.width(), frame.height());
  auto pts = densify(boundaries, 2e-5 * scale);
  if (pts.empty()) pts.push_back(Complex(std::numeric_limits<double>::max(), 0));
  dense_ = std::make_shared<const std::vector<Complex>>(pts);
  index_ = std::make_shared<const PointIndex>(std::move(pts));
}

double OracleSpectrum::boundary_distance(Complex z) const {
  if (!index_) throw UsageError("oracle boundaries are not indexed");
  return index_->nearest_distance(z);
}

Complex OracleSpectrum::nearest_boundary(Complex z) const {
  if (!index_) throw UsageError("oracle boundaries are not indexed");
  return (*dense_)[index_->nearest(z)];
}

namespace {

OracleSpectrum monomial_spectrum(const std::string& tag, double lambda, Box frame) {
  OracleSpectrum o;
  o.tag = tag;
  o.lambda = lambda;
  o.frame = frame;
  o.membership = [lambda](Complex z) { return oracle_monomial(lambda, z); };
  o.boundaries = {circle(lambda <= 1 ? 1.0 : lambda)};
  o.level_curve = {lambda >= 1 || same_lambda(lambda, 1)};
  o.index_boundaries();
  return o;
}

Polyline hn_ellipse(Complex g, double eta) {
  const Complex c1 = eta * std::exp(-g), c2 = std::exp(g) / eta;
  return sample_closed([=](double t) { return c1 * unit_phase(t) + c2 * unit_phase(-t); });
}

double hn_eta(Complex g, double lambda) {
  const double ea = std::exp(g.real());
  return lambda <= ea || same_lambda(lambda, ea) ? 1.0 : ea / lambda;
}

Box square(double half) { return {-half, -half, half, half}; }

}  // namespace

const std::vector<std::string>& gallery_tags() {
  static const std::vector<std::string> tags{"app2", "app3", "two6", "two5", "pwl", "hn1d", "hn2d"};
  return tags;
}

GalleryCase gallery_case(const std::string& tag, double g) {
  GalleryCase c;
  c.tag = tag;
  c.g = g;
  if (tag == "app2" || tag == "two6") {
    if (tag == "app2") {
      c.title = "u(n-1) + lambda e^{2 pi i (omega + n alpha)} u(n)";
      c.potential = Potential(TrigPolynomial1D(1, {1.0}));
      c.evaluator = [p = c.potential] { return GdEvaluator(p, GdMethod::Jensen); };
    } else {
      // e^{2 pi i (theta_1 + theta_2)}: the pushforward of the torus measure
      // under theta_1 + theta_2 is uniform, so G reduces to log+ |z|.
      c.title = "u(n_1 - 1, n_2 - 1) + lambda e^{2 pi i (omega + <n, alpha>)} u(n)";
      const int n = 512;
      std::vector<Complex> values;
      values.reserve(static_cast<std::size_t>(n) * n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) values.push_back(unit_phase(double((i + j) % n) / n));
      c.potential = Potential(SampledGrid({n, n}, std::move(values)));
      c.evaluator = [p = c.potential] {
        return GdEvaluator::closed_form(p, [](Complex z) { return std::max(0.0, std::log(std::abs(z))); });
      };
    }
    c.frame = [](double lambda) { return square(std::max(2.5, 1.25 * lambda)); };
    c.has_oracle = [](double) { return true; };
    c.oracle = [tag, frame = c.frame](double lambda, const GdEvaluator& ev) {
      const double l = resolved_lambda(lambda, 1.0, ev.level_tolerance());
      auto o = monomial_spectrum(tag, l, frame(l));
      o.lambda = lambda;
      return o;
    };
  } else if (tag == "app3") {
    c.title = "u(n - e_1) + u(n - e_2) + lambda e^{2 pi i (omega + <n, alpha>)} u(n)";
    c.potential = Potential(SeparableSum({Potential(TrigPolynomial1D(1, {1.0})),
                                          Potential(TrigPolynomial1D(1, {1.0}))}));
    c.evaluator = [p = c.potential] { return GdEvaluator(p, GdMethod::Iterated); };
    c.frame = [](double lambda) { return square(std::max(2.5, 1.25 * lambda)); };
    c.has_oracle = [](double) { return true; };
    c.oracle = [frame = c.frame](double lambda, const GdEvaluator& ev) {
      const RadialProfile p([&ev](double r) { return ev.value(r); }, 2.0);
      OracleSpectrum o;
      o.tag = "app3";
      o.lambda = lambda;
      o.frame = frame(lambda);
      const double lambda1 = std::exp(p.at_origin());
      o.parameters = {{"d", 2}, {"lambda_1", lambda1}};
      if (lambda <= lambda1) {
        o.boundaries = {circle(2)};
        o.level_curve = {false};
      } else if (lambda < 2) {
        const double inner = p.invert(std::log(lambda));
        o.parameters.push_back({"inner_radius", inner});
        o.boundaries = {circle(inner), circle(2)};
        o.level_curve = {true, false};
      } else {
        o.boundaries = {circle(lambda)};
        o.level_curve = {true};
      }
      const double inner = lambda > lambda1 && lambda < 2 ? o.parameters.back().second : 0.0;
      o.membership = [lambda, lambda1, inner](Complex z) {
        const double r = std::abs(z);
        if (lambda <= lambda1 || lambda < 2) {
          if (std::abs(r - 2) <= kCurveTolerance || (inner > 0 && std::abs(r - inner) <= kCurveTolerance))
            return Membership::Boundary;
          return r >= inner && r <= 2 ? Membership::In : Membership::Out;
        }
        return std::abs(r - lambda) <= kCurveTolerance ? Membership::In : Membership::Out;
      };
      o.index_boundaries();
      return o;
    };
  } else if (tag == "two5") {
    c.title = "2 u(n-2) + u(n-1) + lambda e^{2 pi i (omega + n alpha)} u(n)";
    c.potential = Potential(TrigPolynomial1D(1, {1.0, 2.0}));
    c.evaluator = [p = c.potential] { return GdEvaluator(p, GdMethod::Jensen); };
    c.frame = [](double lambda) {
      const double h = std::max(3.5, 1.2 * lambda);
      return Box{-h, -h * 6 / 7, h, h * 6 / 7};
    };
    c.has_oracle = [](double lambda) { return same_lambda(lambda, 2.0); };
    c.oracle = [frame = c.frame](double lambda, const GdEvaluator&) {
      if (!same_lambda(lambda, 2.0)) throw UsageError("the two5 closed form is for lambda = 2");
      OracleSpectrum o;
      o.tag = "two5";
      o.lambda = lambda;
      o.frame = frame(lambda);
      o.membership = oracle_two5;
      const double t0 = two5_loop_start();
      Polyline inner, outer;
      inner.closed = true;
      for (int i = 0; i <= kCurveSamples; ++i) {
        inner.points.push_back(two5_curve(t0 + (1 - 2 * t0) * i / kCurveSamples));
        outer.points.push_back(two5_curve(-t0 + 2 * t0 * i / kCurveSamples));
      }
      o.boundaries = {inner, outer};
      o.level_curve = {true, false};
      o.index_boundaries();
      return o;
    };
  } else if (tag == "pwl") {
    c.title = "tent potential, Fourier hopping";
    c.potential = Potential(tent_potential());
    c.evaluator = [p = c.potential] { return GdEvaluator(p, GdMethod::Quadrature); };
    c.frame = [](double lambda) {
      const double h = std::max(0.75, 1.5 * lambda);
      return Box{0.25 - h, -h, 0.25 + h, h};
    };
    c.has_oracle = [](double) { return true; };
    c.oracle = [frame = c.frame](double lambda, const GdEvaluator&) {
      const auto [l2, l3] = pwl_thresholds();
      OracleSpectrum o;
      o.tag = "pwl";
      o.lambda = lambda;
      o.frame = frame(lambda);
      o.parameters = {{"lambda_2", l2}, {"lambda_3", l3}};
      o.membership = [lambda](Complex z) { return oracle_pwl(lambda, z); };
      if (lambda <= l2) {
        o.boundaries = {segment(0.0, 0.5)};
        o.level_curve = {false};
      } else {
        const double level = std::log(lambda);
        o.boundaries = {sample_closed([level](double t) { return pwl_level_point(level, t); })};
        o.level_curve = {true};
        if (lambda < l3) {
          // G = level on the segment at 1/4 +- r
          double lo = 0, hi = 0.25;
          for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            (gd_pwl_closed_form(0.25 + mid) < level ? lo : hi) = mid;
          }
          const double r = 0.5 * (lo + hi);
          o.parameters.push_back({"gap_half_width", r});
          o.boundaries.push_back(segment(0.0, 0.25 - r));
          o.boundaries.push_back(segment(0.25 + r, 0.5));
          o.level_curve.push_back(false);
          o.level_curve.push_back(false);
        }
      }
      o.index_boundaries();
      return o;
    };
  } else if (tag == "hn1d") {
    c.title = "e^{-g} u(n-1) + e^{g} u(n+1) + lambda e^{2 pi i (omega + n alpha)} u(n)";
    c.potential = Potential(hatano_nelson(g));
    c.evaluator = [p = c.potential] { return GdEvaluator(p, GdMethod::Jensen); };
    c.frame = [g](double lambda) {
      const double eta = hn_eta(g, lambda);
      return square(1.15 * (eta * std::exp(-g) + std::exp(g) / eta));
    };
    c.has_oracle = [](double) { return true; };
    c.oracle = [g, frame = c.frame](double lambda, const GdEvaluator& ev) {
      const double l = resolved_lambda(lambda, std::exp(g), ev.level_tolerance());
      OracleSpectrum o;
      o.tag = "hn1d";
      o.lambda = lambda;
      o.frame = frame(l);
      o.parameters = {{"g", g}};
      o.membership = [g, l](Complex z) { return oracle_hn_1d(g, l, z); };
      o.boundaries = {hn_ellipse(g, hn_eta(g, l))};
      o.level_curve = {l >= std::exp(g) || same_lambda(l, std::exp(g))};
      o.index_boundaries();
      return o;
    };
  } else if (tag == "hn2d") {
    c.title = "two-dimensional Hatano-Nelson hopping + lambda e^{2 pi i (omega + <n, alpha>)} u(n)";
    c.potential = Potential(hatano_nelson_2d(g));
    c.evaluator = [p = c.potential] { return GdEvaluator(p, GdMethod::Iterated); };
    c.frame = [g](double) {
      const double ax = std::exp(g) + std::exp(-g), by = std::exp(g) - std::exp(-g);
      return Box{-1.18 * (ax + 2), -1.28 * by, 1.18 * (ax + 2), 1.28 * by};
    };
    c.has_oracle = [g](double lambda) { return lambda <= std::exp(g) || same_lambda(lambda, std::exp(g)); };
    c.oracle = [g, frame = c.frame](double lambda_in, const GdEvaluator& ev) {
      const double lambda = resolved_lambda(lambda_in, std::exp(g), ev.level_tolerance());
      OracleSpectrum o;
      o.tag = "hn2d";
      o.lambda = lambda_in;
      o.frame = frame(lambda);
      o.parameters = {{"g", g}};
      o.membership = [g, lambda](Complex z) { return oracle_hn_2d(g, lambda, z); };
      const double ax = std::exp(g) + std::exp(-g), by = std::exp(g) - std::exp(-g);
      auto ellipse = [=](double t, double shift) {
        return Complex(ax * std::cos(kTwoPi * t) + shift, by * std::sin(kTwoPi * t));
      };
      // Outer stadium: right half of the ellipse shifted by +2, left half by -2.
      Polyline outer;
      outer.closed = true;
      const int n = kCurveSamples / 2;
      for (int i = 0; i <= n; ++i) outer.points.push_back(ellipse(-0.25 + 0.5 * i / n, 2));
      for (int i = 0; i <= n; ++i) outer.points.push_back(ellipse(0.25 + 0.5 * i / n, -2));
      o.boundaries = {outer};
      o.level_curve = {same_lambda(lambda, std::exp(g))};
      if (!same_lambda(lambda, std::exp(g)) && ax > 2) {
        // The hole: the ellipse shifted by -2 where its x exceeds 2 - 2, and
        // its mirror image.
        const double tc = std::acos(2 / ax) / kTwoPi;
        Polyline right, left;
        for (int i = 0; i <= n; ++i) {
          right.points.push_back(ellipse(-tc + 2 * tc * i / n, -2));
          left.points.push_back(ellipse(0.5 - tc + 2 * tc * i / n, 2));
        }
        o.boundaries.push_back(right);
        o.boundaries.push_back(left);
        o.level_curve.push_back(false);
        o.level_curve.push_back(false);
      }
      o.index_boundaries();
      return o;
    };
  } else {
    throw UsageError("unknown gallery case '" + tag + "'");
  }
  return c;
}

AgreementReport oracle_agreement(const GdEvaluator& ev, const OracleSpectrum& oracle, int samples,
                                 std::uint64_t seed, int resolution) {
  if (samples < 1) throw UsageError("need at least one sample");
  if (resolution < 2) throw UsageError("resolution must be >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(oracle.frame.x0, oracle.frame.x1),
      uy(oracle.frame.y0, oracle.frame.y1);
  std::vector<Complex> pts(static_cast<std::size_t>(samples));
  for (auto& z : pts) {
    const double x = ux(rng);
    z = Complex(x, uy(rng));
  }
  const double h = std::max(oracle.frame.width(), oracle.frame.height()) / (resolution - 1);
  const double step = 1e-4 * std::max(oracle.frame.width(), oracle.frame.height());
  std::vector<int> verdict(pts.size());
  std::vector<double> widths(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    const Complex z = pts[i];
    const bool oracle_in = member(oracle.membership(z));
    const bool numeric_in = in_spectrum(classify(ev, z, oracle.lambda).label);
    // Spatial width of the level tolerance at the nearest boundary point.
    const Complex b = oracle.nearest_boundary(z);
    double grad = std::numeric_limits<double>::infinity();
    try {
      const double gx = (ev.value(b + step) - ev.value(b - step)) / (2 * step);
      const double gy = (ev.value(b + Complex(0, step)) - ev.value(b - Complex(0, step))) / (2 * step);
      if (std::isfinite(gx) && std::isfinite(gy)) grad = std::hypot(gx, gy);
    } catch (const std::exception&) {
    }
    const double level_width = ev.level_tolerance() / std::max(grad, 1e-3);
    const double width = 2 * std::max({ev.range_tolerance(), level_width, h});
    widths[i] = width;
    if (oracle_in == numeric_in)
      verdict[i] = 0;
    else
      verdict[i] = oracle.boundary_distance(z) <= width ? 1 : 2;
  });
  AgreementReport rep;
  rep.tag = oracle.tag;
  rep.lambda = oracle.lambda;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    rep.tube_width_max = std::max(rep.tube_width_max, widths[i]);
    if (verdict[i] == 0) ++rep.agree;
    if (verdict[i] == 1) ++rep.tube;
    if (verdict[i] == 2) {
      ++rep.disagree;
      rep.disagreements.push_back(pts[i]);
    }
  }
  return rep;
}

}  // namespace atlas
