#include "spectral_atlas/gd.hpp"

#include "spectral_atlas/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace atlas {
namespace {

constexpr double kDefaultQuadratureEps = 1e-8;

// Panel boundaries matching the kinks of the representation.
std::vector<double> natural_breaks(const Potential& v) {
  if (const auto* pwl = v.as<PiecewiseLinear1D>()) return pwl->breaks();
  if (const auto* grid = v.as<SampledGrid>()) {
    const int n = grid->shape()[0];
    std::vector<double> b(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) b[static_cast<std::size_t>(i)] = double(i) / n;
    return b;
  }
  int panels = 8;
  if (const auto* trig = v.as<TrigPolynomial1D>()) panels = std::max(8, 2 * trig->degree_span());
  if (const auto* sep = v.as<SeparableSum>()) return natural_breaks(sep->parts().front());
  std::vector<double> b(static_cast<std::size_t>(panels) + 1);
  for (int i = 0; i <= panels; ++i) b[static_cast<std::size_t>(i)] = double(i) / panels;
  return b;
}

std::vector<double> axis_breaks(const Potential& v, int axis) {
  if (const auto* sep = v.as<SeparableSum>())
    return natural_breaks(sep->parts()[static_cast<std::size_t>(axis)]);
  if (const auto* grid = v.as<SampledGrid>()) {
    const int n = grid->shape()[static_cast<std::size_t>(axis)];
    std::vector<double> b(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) b[static_cast<std::size_t>(i)] = double(i) / n;
    return b;
  }
  return natural_breaks(v);
}

AdaptiveOptions log_options(const Potential& v, double tol) {
  AdaptiveOptions o;
  o.tolerance = tol;
  o.cut_radius = 1e-3 * (1.0 + v.sup_norm());
  return o;
}

RootSet<double> quadratic_roots(std::vector<Complex> c) {
  RootSet<double> out;
  out.coefficients = std::move(c);
  const auto& k = out.coefficients;
  if (k.size() == 2) {
    out.roots = {-k[0] / k[1]};
  } else {
    const Complex disc = std::sqrt(k[1] * k[1] - 4.0 * k[2] * k[0]);
    // Pick the sign that avoids cancellation, then use Vieta for the other.
    const Complex q = -0.5 * (k[1] + (std::real(std::conj(k[1]) * disc) >= 0 ? disc : -disc));
    if (q == Complex(0)) {
      out.roots = {0.0, 0.0};
    } else {
      out.roots = {q / k[2], k[0] / q};
    }
  }
  out.converged = true;
  for (const auto& r : out.roots) {
    const auto ev = detail::evaluate_at<double>(out.coefficients, r);
    out.residual.push_back(ev.residual);
    out.backward_error.push_back(ev.backward);
  }
  return out;
}

}  // namespace

std::string to_string(GdMethod m) {
  switch (m) {
    case GdMethod::Quadrature: return "quadrature";
    case GdMethod::Jensen: return "jensen";
    case GdMethod::Iterated: return "iterated";
    case GdMethod::Oracle: return "oracle";
  }
  return "unknown";
}

GdMethod parse_method(const std::string& name) {
  if (name == "jensen") return GdMethod::Jensen;
  if (name == "quad" || name == "quadrature") return GdMethod::Quadrature;
  if (name == "iterated") return GdMethod::Iterated;
  throw UsageError("unknown G method '" + name + "' (jensen | quad | iterated)");
}

RootSet<double> jensen_roots(const TrigPolynomial1D& v, Complex z) {
  const int s = std::min(v.low(), 0);
  const int top = std::max(v.high(), 0) - s;
  std::vector<Complex> c(static_cast<std::size_t>(top) + 1, 0.0);
  for (int k = v.low(); k <= v.high(); ++k) c[static_cast<std::size_t>(k - s)] -= v.coefficient(k);
  c[static_cast<std::size_t>(-s)] += z;
  while (!c.empty() && c.back() == Complex(0)) c.pop_back();
  if (c.empty()) throw UsageError("z equals the constant potential; G is -infinity");
  if (c.size() == 1) {
    RootSet<double> out;
    out.coefficients = std::move(c);
    out.converged = true;
    return out;
  }
  if (c.size() <= 3) return quadratic_roots(std::move(c));
  return roots<double>(c);
}

GdValue gd_jensen(const TrigPolynomial1D& v, Complex z) {
  if (v.constant()) throw UsageError("gd_jensen needs a non-constant potential");
  const auto rs = jensen_roots(v, z);
  GdValue out;
  out.method = GdMethod::Jensen;
  out.converged = rs.converged;
  double g = std::log(std::abs(rs.coefficients.back()));
  double err = 0;
  for (const auto& w : rs.roots) {
    const double a = std::abs(w);
    if (a > 1) g += std::log(a);
    // First-order size of the remaining Newton correction, relative.
    const auto ev = detail::evaluate_at<double>(rs.coefficients, w);
    const double rel = a > 0 ? std::abs(ev.newton) / a : 0.0;
    if (std::abs(std::log(std::max(a, 1e-300))) <= rel) err += rel;
  }
  out.value = g;
  out.error_bound = err + 4e-16 * static_cast<double>(rs.coefficients.size()) * (1 + std::abs(g));
  return out;
}

GdValue gd_quadrature(const Potential& v, Complex z, double eps) {
  if (!(eps >= 1e-10)) throw UsageError("quadrature accuracy must be >= 1e-10");
  GdValue out;
  out.method = GdMethod::Quadrature;
  if (v.dimension() == 1) {
    const auto breaks = natural_breaks(v);
    auto r = integrate_log_modulus([&](double t) { return std::abs(z - v.at(t)); }, breaks,
                                   log_options(v, eps));
    out.value = r.value;
    out.error_bound = r.bound();
    out.near_singular = r.near_singular;
    out.converged = !r.exhausted && r.error <= eps;
    return out;
  }
  if (v.dimension() != 2) throw UsageError("gd_quadrature supports d = 1 or 2");
  const auto outer_breaks = axis_breaks(v, 0), inner_breaks = axis_breaks(v, 1);
  const auto inner_opt = log_options(v, 0.5 * eps);
  double worst_inner = 0;
  bool singular = false, inner_ok = true;
  auto slice = [&](double t1) {
    auto r = integrate_log_modulus(
        [&](double t2) {
          const double th[2] = {t1, t2};
          return std::abs(z - v(std::span<const double>(th, 2)));
        },
        inner_breaks, inner_opt);
    worst_inner = std::max(worst_inner, r.bound());
    singular = singular || r.near_singular;
    inner_ok = inner_ok && !r.exhausted && r.error <= 0.5 * eps;
    return r.value;
  };
  AdaptiveOptions outer;
  outer.tolerance = 0.5 * eps;
  outer.max_evaluations = 200'000;
  auto r = integrate(slice, outer_breaks, outer);
  out.value = r.value;
  out.error_bound = r.error + worst_inner;
  out.near_singular = singular;
  out.converged = inner_ok && !r.exhausted && r.error <= 0.5 * eps;
  return out;
}

namespace {

// Integrates G of the trailing parts over the leading coordinates, one at a
// time; the last coordinate is done exactly by Jensen.
GdValue iterated_from(const std::vector<Potential>& parts, std::size_t j, Complex z, double tol) {
  const auto* last = parts.back().as<TrigPolynomial1D>();
  if (j + 1 == parts.size()) return gd_jensen(*last, z);
  const auto breaks = natural_breaks(parts[j]);
  const double share = tol / static_cast<double>(parts.size() - 1 - j);
  double inner_err = 0;
  bool ok = true;
  auto f = [&](double t) {
    const GdValue g = iterated_from(parts, j + 1, z - parts[j].at(t), tol - share);
    inner_err = std::max(inner_err, g.error_bound);
    ok = ok && g.converged;
    return g.value;
  };
  AdaptiveOptions o;
  o.tolerance = share;
  o.max_evaluations = 400'000;
  const auto r = integrate(f, breaks, o);
  GdValue out;
  out.method = GdMethod::Iterated;
  out.value = r.value;
  out.error_bound = r.error + inner_err;
  out.converged = ok && !r.exhausted && r.error <= share;
  return out;
}

}  // namespace

GdValue gd_iterated(const SeparableSum& v, Complex z, double eps) {
  if (!(eps > 0)) throw UsageError("iterated accuracy must be positive");
  const auto* last = v.parts().back().as<TrigPolynomial1D>();
  if (!last) throw UsageError("gd_iterated needs a trig polynomial as the last part");
  GdValue out = iterated_from(v.parts(), 0, z, eps);
  out.method = GdMethod::Iterated;
  return out;
}

double gd_pwl_closed_form(Complex z) {
  const double x = z.real(), y = z.imag();
  const double u = x - 0.5;
  if (y == 0) {
    const double a = x == 0 ? 0.0 : 2 * x * std::log(std::abs(x));
    const double b = u == 0 ? 0.0 : u * std::log(u * u);
    return a - b - 1;
  }
  return 2 * x * std::log(std::abs(z)) - u * std::log(u * u + y * y) - 1 +
         2 * y * (std::atan(x / y) - std::atan(u / y));
}

PiecewiseLinear1D tent_potential() { return PiecewiseLinear1D({0.0, 0.5, 1.0}, {0.0, 0.5, 0.0}); }

// ---- GdEvaluator

GdEvaluator::GdEvaluator(Potential v, GdMethod method, double eps)
    : potential_(std::move(v)), method_(method), eps_(eps) {
  switch (method_) {
    case GdMethod::Jensen: {
      const auto* sep = potential_.as<SeparableSum>();
      const bool ok = potential_.as<TrigPolynomial1D>() ||
                      (sep && sep->dimension() == 1 && sep->parts()[0].as<TrigPolynomial1D>());
      if (!ok) throw UsageError("jensen method needs a one-dimensional trig polynomial");
      level_tolerance_ = 1e-8;
      break;
    }
    case GdMethod::Iterated: {
      const auto* sep = potential_.as<SeparableSum>();
      if (!sep || !sep->parts().back().as<TrigPolynomial1D>())
        throw UsageError("iterated method needs a separable potential ending in a trig polynomial");
      if (eps_ == 0) eps_ = kDefaultQuadratureEps;
      level_tolerance_ = 1e-5;
      break;
    }
    case GdMethod::Quadrature:
      if (potential_.dimension() > 2) throw UsageError("quadrature supports d <= 2");
      if (eps_ == 0) eps_ = kDefaultQuadratureEps;
      level_tolerance_ = 1e-5;
      break;
    case GdMethod::Oracle:
      throw UsageError("closed-form evaluators are built with GdEvaluator::closed_form");
  }
  range_ = std::make_shared<const RangeIndex>(potential_);
}

GdEvaluator GdEvaluator::automatic(Potential v, double eps) {
  if (v.as<TrigPolynomial1D>()) return GdEvaluator(std::move(v), GdMethod::Jensen, eps);
  if (const auto* sep = v.as<SeparableSum>())
    if (sep->parts().back().as<TrigPolynomial1D>()) {
      if (sep->dimension() == 1) return GdEvaluator(std::move(v), GdMethod::Jensen, eps);
      return GdEvaluator(std::move(v), GdMethod::Iterated, eps);
    }
  return GdEvaluator(std::move(v), GdMethod::Quadrature, eps);
}

GdEvaluator GdEvaluator::closed_form(Potential v, std::function<double(Complex)> g,
                                     double level_tolerance) {
  GdEvaluator ev(std::move(v), GdMethod::Quadrature);
  ev.method_ = GdMethod::Oracle;
  ev.closed_ = std::move(g);
  ev.eps_ = 1e-12;
  ev.level_tolerance_ = level_tolerance;
  return ev;
}

GdValue GdEvaluator::operator()(Complex z) const {
  switch (method_) {
    case GdMethod::Jensen: {
      const auto* trig = potential_.as<TrigPolynomial1D>();
      if (!trig) trig = potential_.as<SeparableSum>()->parts()[0].as<TrigPolynomial1D>();
      return gd_jensen(*trig, z);
    }
    case GdMethod::Iterated:
      return gd_iterated(*potential_.as<SeparableSum>(), z, eps_);
    case GdMethod::Quadrature:
      return gd_quadrature(potential_, z, eps_);
    case GdMethod::Oracle: {
      GdValue out;
      out.method = GdMethod::Oracle;
      out.value = closed_(z);
      out.error_bound = 1e-12 * (1 + std::abs(out.value));
      return out;
    }
  }
  return {};
}

// ---- gradient

namespace {

Gradient integral_gradient(const Potential& v, Complex z) {
  AdaptiveOptions o;
  o.tolerance = 1e-10;
  auto component = [&](bool imaginary) {
    auto f1 = [&](double t) {
      const Complex d = z - v.at(t);
      return (imaginary ? d.imag() : d.real()) / std::norm(d);
    };
    if (v.dimension() == 1) return integrate(f1, natural_breaks(v), o).value;
    const auto inner_breaks = axis_breaks(v, 1);
    auto outer = [&](double t1) {
      auto f2 = [&](double t2) {
        const double th[2] = {t1, t2};
        const Complex d = z - v(std::span<const double>(th, 2));
        return (imaginary ? d.imag() : d.real()) / std::norm(d);
      };
      return integrate(f2, inner_breaks, o).value;
    };
    return integrate(outer, axis_breaks(v, 0), o).value;
  };
  return {component(false), component(true), GradientPath::Integral};
}

}  // namespace

Gradient gd_gradient(const GdEvaluator& ev, Complex z, double h, GradientPath path) {
  if (path == GradientPath::Automatic)
    path = ev.method() == GdMethod::Quadrature && ev.potential().real_valued()
               ? GradientPath::Integral
               : GradientPath::Difference;
  const double dist = ev.range().distance(z);
  if (path == GradientPath::Integral) {
    if (ev.potential().dimension() > 2) throw UsageError("integral gradient supports d <= 2");
    if (dist <= ev.range_tolerance())
      throw UsageError("z lies on the sampled range; the gradient integral is singular");
    return integral_gradient(ev.potential(), z);
  }
  if (!(h >= 1e-6 && h <= 1e-2)) throw UsageError("difference step must lie in [1e-6, 1e-2]");
  // The sampled distance overshoots the true one by at most the range tolerance.
  if (dist - ev.range_tolerance() < 2 * h) throw UsageError("z is closer than 2h to the range");
  Gradient g;
  g.path = GradientPath::Difference;
  g.dx = (ev.value(z + Complex(h, 0)) - ev.value(z - Complex(h, 0))) / (2 * h);
  g.dy = (ev.value(z + Complex(0, h)) - ev.value(z - Complex(0, h))) / (2 * h);
  return g;
}

}  // namespace atlas
