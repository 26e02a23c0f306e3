// Acceptance run: one line per criterion, one JSON artifact per criterion.
#include "spectral_atlas/gd.hpp"
#include "spectral_atlas/io.hpp"
#include "spectral_atlas/operators.hpp"
#include "spectral_atlas/oracles.hpp"
#include "spectral_atlas/spectrum.hpp"
#include "support.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>

using namespace atlas;
using namespace atlas::testing;
namespace fs = std::filesystem;

namespace {

const double kGolden = (std::sqrt(5.0) - 1) / 2;
const double kE = std::exp(1.0);

struct Outcome {
  bool pass = false;
  std::string summary;  // printed only
  Json report;          // written and compared across thread counts
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

Potential tent() { return gallery_case("pwl").potential; }

Complex uniform_in_box(std::mt19937_64& rng, const Box& b) {
  std::uniform_real_distribution<double> ux(b.x0, b.x1), uy(b.y0, b.y1);
  const double x = ux(rng);
  return {x, uy(rng)};
}

// 1. Jensen against quadrature away from the range.
Outcome jensen_vs_quadrature() {
  std::mt19937_64 rng(1);
  std::vector<std::pair<std::string, TrigPolynomial1D>> cases{
      {"exp", *exp_potential().as<TrigPolynomial1D>()},
      {"cos", *cos_potential().as<TrigPolynomial1D>()},
      {"exp+2exp2", *two_mode_potential().as<TrigPolynomial1D>()}};
  for (int k = 0; k < 10; ++k) cases.emplace_back("random" + std::to_string(k), random_trig(rng, 5));

  Outcome o;
  o.report["tolerance"] = 1e-6;
  o.report["min_range_distance"] = 0.05;
  o.report["cases"] = Json::array();
  double worst = 0;
  for (const auto& [name, v] : cases) {
    const Potential pv(v);
    const double reach = pv.sup_norm() + 1;
    const Box box{-reach, -reach, reach, reach};
    std::vector<Complex> zs;
    while (zs.size() < 100) {
      const Complex z = uniform_in_box(rng, box);
      if (dist_to_range(pv, z, 4096) >= 0.05) zs.push_back(z);
    }
    std::vector<double> diff(zs.size());
    parallel_for(zs.size(), [&](std::size_t i) {
      diff[i] = std::abs(gd_jensen(v, zs[i]).value - gd_quadrature(pv, zs[i], 1e-10).value);
    });
    const double m = *std::max_element(diff.begin(), diff.end());
    worst = std::max(worst, m);
    o.report["cases"].push_back({{"potential", name}, {"points", zs.size()}, {"max_difference", m}});
  }
  o.report["max_difference"] = worst;
  o.pass = worst <= 1e-6;
  o.summary = "13 potentials x 100 points, max |jensen - quad| = " + fmt("%.2e", worst) + " (<= 1e-6)";
  return o;
}

// 2. Monomial potential on a 201 grid against the circle / disc / circle.
Outcome monomial_grid() {
  const auto c = gallery_case("app2");
  const auto ev = c.evaluator();
  const Box box{-2.5, -2.5, 2.5, 2.5};
  Outcome o;
  o.pass = true;
  o.report["res"] = 201;
  o.report["runs"] = Json::array();
  long total = 0;
  for (double lambda : {0.5, 1.0, 2.0}) {
    const auto s = rasterize(ev, lambda, box, 201);
    const double tube = 2 * s.step();
    const double radius = lambda > 1 ? lambda : 1.0;
    long bad = 0, excused = 0;
    for (int j = 0; j < s.n; ++j)
      for (int i = 0; i < s.n; ++i) {
        const Complex z = s.node(i, j);
        if (member(oracle_monomial(lambda, z)) == in_spectrum(s.label(i, j))) continue;
        (std::abs(std::abs(z) - radius) <= tube ? excused : bad) += 1;
      }
    total += bad;
    o.pass = o.pass && bad == 0;
    o.report["runs"].push_back({{"lambda", lambda},
                                {"tube", tube},
                                {"mismatch_in_tube", excused},
                                {"mismatch_outside_tube", bad},
                                {"level_set_nodes", s.count(Label::LevelSet)},
                                {"range_nodes", s.count(Label::Range)}});
  }
  o.summary = "lambda in {0.5, 1, 2}, 201x201: " + std::to_string(total) +
              " disagreements outside the 2-cell tube";
  return o;
}

// Edge nodes of the classified region: in-spectrum nodes with a 4-neighbour out.
std::vector<Complex> region_edge(const SpectrumSet& s) {
  std::vector<Complex> out;
  for (int j = 0; j < s.n; ++j)
    for (int i = 0; i < s.n; ++i) {
      if (!in_spectrum(s.label(i, j))) continue;
      const bool edge = i == 0 || j == 0 || i + 1 == s.n || j + 1 == s.n ||
                        !in_spectrum(s.label(i - 1, j)) || !in_spectrum(s.label(i + 1, j)) ||
                        !in_spectrum(s.label(i, j - 1)) || !in_spectrum(s.label(i, j + 1));
      if (edge) out.push_back(s.node(i, j));
    }
  return out;
}

// 3. One-dimensional asymmetric hopping.
Outcome hn_1d() {
  const auto c = gallery_case("hn1d", 1.0);
  const auto ev = c.evaluator();
  Outcome o;
  o.pass = true;
  o.report["res"] = 301;
  o.report["runs"] = Json::array();
  std::string summary;
  for (double lambda : {0.5, kE, kE * kE}) {
    const Box box = c.frame(lambda);
    const auto s = compute_spectrum(ev, lambda, box, 301);
    const auto oracle = c.oracle(lambda, ev);
    const double h = s.step();
    const auto truth = densify(oracle.boundaries, 1e-3 * h);
    Json run{{"lambda", lambda}, {"h", h}, {"tolerance", 2 * h}};
    bool ok = true;
    if (lambda < kE) {
      // Curve-type spectrum carried by the range: compare the C set.
      const double d = s.range_points.empty() ? INFINITY : hausdorff(s.range_points, truth);
      run["c_points"] = s.range_points.size();
      run["level_curves"] = s.curves.size();
      run["hausdorff_c"] = d;
      ok = d <= 2 * h && s.curves.empty();
    } else {
      const auto traced = densify(s.curves, 1e-3 * h);
      const double d = traced.empty() ? INFINITY : hausdorff(traced, truth);
      run["level_curves"] = s.curves.size();
      run["c_points"] = s.range_points.size();
      run["hausdorff_level"] = d;
      ok = d <= 2 * h && s.range_points.empty();
      if (lambda == kE) {
        long interior = 0, filled = 0;
        for (int j = 0; j < s.n; ++j)
          for (int i = 0; i < s.n; ++i) {
            const Complex z = s.node(i, j);
            if (!member(oracle.membership(z)) || oracle.boundary_distance(z) <= 2 * h) continue;
            ++interior;
            filled += in_spectrum(s.label(i, j)) ? 1 : 0;
          }
        const double frac = interior ? double(filled) / double(interior) : 0.0;
        const double edge = hausdorff(region_edge(s), truth);
        run["interior_nodes"] = interior;
        run["filled_fraction"] = frac;
        run["hausdorff_region_edge"] = edge;
        ok = ok && frac >= 0.99 && edge <= 2 * h;
        summary += " fill " + fmt("%.4f", frac) + ";";
      }
    }
    run["pass"] = ok;
    o.pass = o.pass && ok;
    o.report["runs"].push_back(run);
  }
  summary = "g = 1, lambda in {0.5, e, e^2}, 301x301: boundaries within 2h;" + summary;
  o.summary = summary;
  return o;
}

// 4. Two-dimensional asymmetric hopping: the hole.
Outcome hn_2d(std::map<int, double>& seconds) {
  const auto c = gallery_case("hn2d", 1.0);
  const auto ev = c.evaluator();
  Outcome o;
  const auto below = classify(ev, 0.0, 0.5 * kE), at = classify(ev, 0.0, kE);
  o.report["origin_below"] = std::string(1, label_code(below.label));
  o.report["origin_at"] = std::string(1, label_code(at.label));
  bool ok = below.label == Label::Resolvent && in_spectrum(at.label);
  o.report["runs"] = Json::array();
  double slowest = 0;
  for (double lambda : {0.5 * kE, kE}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto s = compute_spectrum(ev, lambda, c.frame(lambda), 201);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    slowest = std::max(slowest, secs);
    const bool hole = encloses_hole(s, 0.0);
    const bool want = lambda < kE;
    o.report["runs"].push_back({{"lambda", lambda},
                                {"hole_at_origin", hole},
                                {"expected_hole", want},
                                {"failed_nodes", s.failures()},
                                {"within_time_budget", secs <= 300}});
    ok = ok && hole == want && s.failures() == 0 && secs <= 300;
  }
  seconds[4] = slowest;
  o.pass = ok;
  o.summary = "origin " + o.report["origin_below"].get<std::string>() + " at 0.5e, " +
              o.report["origin_at"].get<std::string>() +
              " at e; hole present/absent by flood fill; slowest 201x201 grid " +
              fmt("%.1f", slowest) + " s (<= 300 s)";
  return o;
}

// 5. Finite sections of the dual model stay on the circle.
Outcome truncation() {
  Outcome o;
  o.pass = true;
  // Disc sample for the gap: polar grid including the centre.
  std::vector<Complex> disc{0.0};
  for (int r = 1; r <= 100; ++r)
    for (int k = 0; k < 8 * r; ++k) disc.push_back(r / 100.0 * unit_phase(double(k) / (8 * r)));
  o.report["runs"] = Json::array();
  double gap_min = INFINITY;
  for (long n : {64L, 256L, 1024L}) {
    const BandedOperatorSpec spec{Model::Dual, exp_potential(), 1.0, {kGolden}, 0.0, {0.0}};
    const auto e = eig_dense(build_matrix(spec, 0, n - 1));
    double off = 0;
    std::vector<Complex> vals(e.values.data(), e.values.data() + e.values.size());
    for (const auto& z : vals) off = std::max(off, std::abs(std::abs(z) - 1.0));
    const double gap = hausdorff(vals, disc);
    gap_min = std::min(gap_min, gap);
    const bool ok = e.triangular && off <= 1e-12 && gap >= 0.9;
    o.pass = o.pass && ok;
    o.report["runs"].push_back({{"size", n},
                                {"triangular", e.triangular},
                                {"max_modulus_deviation", off},
                                {"hausdorff_to_disc", gap},
                                {"pass", ok}});
  }
  o.summary = "sizes 64/256/1024 triangular, all |z| = 1; Hausdorff gap to the disc >= " +
              fmt("%.4f", gap_min) + " (>= 0.9)";
  return o;
}

// 6. Golden-mean approximants converge onto the disc.
Outcome floquet_convergence() {
  Outcome o;
  const auto cf = expand(kGolden, 20);
  std::vector<Complex> disc{0.0};
  for (int r = 1; r <= 50; ++r)
    for (int k = 0; k < 8 * r; ++k) disc.push_back(r / 50.0 * unit_phase(double(k) / (8 * r)));
  o.report["levels"] = Json::array();
  std::vector<double> dist;
  bool clean = true;
  for (int n = 0; n < cf.convergents(); ++n) {
    const std::int64_t q = cf.q[n];
    if (q < 2 || q > 34) continue;
    const int grid = std::max(8, static_cast<int>(4 * q));
    const auto fs = floquet_spectrum(exp_potential(), 1.0, {cf.p[n], q, std::nullopt}, grid, grid);
    double out = 0;
    for (const auto& z : fs.roots) out = std::max(out, std::abs(z) - 1.0);
    out = std::max(out, 0.0);
    const PointIndex cloud(fs.roots);
    const double back = directed_hausdorff(disc, cloud);
    std::size_t failed = 0;
    for (auto f : fs.failed) failed += f;
    clean = clean && failed == 0 && fs.max_residual() <= 1e-8;
    dist.push_back(out);
    o.report["levels"].push_back({{"p", cf.p[n]},
                                  {"q", q},
                                  {"grid", grid},
                                  {"cloud_to_disc", out},
                                  {"disc_to_cloud", back},
                                  {"max_residual", fs.max_residual()},
                                  {"failed_cells", failed}});
  }
  const std::size_t m = dist.size();
  const bool monotone = m >= 3 && dist[m - 3] >= dist[m - 2] && dist[m - 2] >= dist[m - 1];
  o.pass = m == 7 && monotone && dist.back() <= 0.15 && clean;
  o.report["non_increasing_last_three"] = monotone;
  o.summary = "q = 2..34: cloud-to-disc " + fmt("%.4f", dist.empty() ? NAN : dist.back()) +
              " at q = 34 (<= 0.15), last three non-increasing: " + (monotone ? "yes" : "no");
  return o;
}

// 7. Weyl sequences inside the disc, with a subcritical negative control.
Outcome weyl() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  Outcome o;
  o.report["points"] = Json::array();
  int certified = 0, tails = 0, controls = 0;
  const std::vector<double> theta{0.0}, alpha{kGolden};
  std::vector<Complex> zs;
  for (int k = 0; k < 10; ++k) {
    const double r = 0.9 * std::sqrt(u(rng));
    zs.push_back(r * unit_phase(u(rng)));
  }
  std::vector<WeylReport> in(10), ctl(10);
  parallel_for(10, [&](std::size_t k) {
    in[k] = weyl_certify(exp_potential(), 1.0, zs[k], theta, alpha, 10000);
    ctl[k] = weyl_certify(exp_potential(), 0.1, zs[k], theta, alpha, 10000);
  });
  // At lambda = 0.1 the spectrum is the unit circle, so the infimum of the
  // residual at z over all vectors is at most 1 - |z|, and no vector gets
  // below 1 - |z| - lambda. A control at 0.3 is only reachable for |z| <= 0.7.
  int reachable = 0, reachable_ok = 0, bounded = 0;
  for (std::size_t k = 0; k < 10; ++k) {
    const double m = std::abs(zs[k]);
    const bool c = !in[k].orbit_hit && in[k].min_residual <= 0.1;
    const bool t = !in[k].orbit_hit && in[k].tail_exponent <= 0.05;
    const bool n = !ctl[k].orbit_hit && ctl[k].min_residual >= 0.3;
    const double lower = std::max(0.0, 1 - m - 0.1), upper = 1 - m;
    const bool above = ctl[k].min_residual >= lower - 1e-12;
    certified += c;
    tails += t;
    controls += n;
    bounded += above;
    if (upper >= 0.3) {
      ++reachable;
      reachable_ok += n;
    }
    o.report["points"].push_back({{"z", complex_json(zs[k])},
                                  {"modulus", m},
                                  {"min_residual", in[k].min_residual},
                                  {"argmin", in[k].argmin},
                                  {"tail_exponent", in[k].tail_exponent},
                                  {"check_residual", in[k].check_residual},
                                  {"control_min_residual", ctl[k].min_residual},
                                  {"control_lower_bound", lower},
                                  {"control_distance_to_spectrum", upper}});
  }
  o.report["certified"] = certified;
  o.report["tails_ok"] = tails;
  o.report["controls_ok"] = controls;
  o.report["controls_reachable"] = reachable;
  o.report["controls_reachable_ok"] = reachable_ok;
  o.report["controls_above_lower_bound"] = bounded;
  o.pass = certified >= 9 && tails == 10 && controls == 10;
  o.summary = std::to_string(certified) + "/10 certified (need 9), " + std::to_string(tails) +
              "/10 tail exponents <= 0.05, " + std::to_string(controls) +
              "/10 negative controls >= 0.3; " + std::to_string(reachable_ok) + "/" +
              std::to_string(reachable) + " where 1 - |z| >= 0.3, " + std::to_string(bounded) +
              "/10 above 1 - |z| - 0.1";
  return o;
}

// 8. The Rouche disc of the second-order example.
Outcome rouche() {
  const Potential v = two_mode_potential();
  const auto& tp = *v.as<TrigPolynomial1D>();
  const auto disc = rouche_disc(tp);
  const auto ev = GdEvaluator::automatic(v);
  const double lambda = std::abs(tp.coefficient(tp.high()));
  const double r = disc.radius;
  const auto s = rasterize(ev, lambda, {-r, -r, r, r}, 201);
  long inside = 0, missed = 0;
  for (int j = 0; j < s.n; ++j)
    for (int i = 0; i < s.n; ++i)
      if (std::abs(s.node(i, j) - disc.center) <= 0.95 * r) {
        ++inside;
        missed += in_spectrum(s.label(i, j)) ? 0 : 1;
      }
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  double worst = 0;
  for (int k = 0; k < 100; ++k) {
    const Complex z = disc.center + r * std::sqrt(u(rng)) * unit_phase(u(rng));
    worst = std::max(worst, std::abs(gd_jensen(tp, z).value - std::log(2.0)));
  }
  Outcome o;
  o.report = {{"radius", r},          {"admissible", disc.admissible}, {"lambda", lambda},
              {"grid_nodes", inside}, {"grid_missed", missed},         {"max_jensen_error", worst}};
  o.pass = disc.admissible && r == 1.0 && missed == 0 && worst <= 1e-9;
  o.summary = "radius " + fmt("%g", r) + ", " + std::to_string(missed) + "/" +
              std::to_string(inside) + " disc nodes missed, max |G - log 2| = " + fmt("%.1e", worst);
  return o;
}

// 9. PT thresholds and the three tent regimes.
Outcome pt() {
  const auto t = pt_thresholds(GdEvaluator::automatic(cos_potential()));
  const auto [l2, l3] = pwl_thresholds();
  const auto c = gallery_case("pwl");
  const auto ev = c.evaluator();
  const auto tent = pt_thresholds(ev);
  Outcome o;
  o.report["cos"] = {{"lambda0", t.lower}, {"lambda1", t.upper}};
  o.report["tent"] = {{"lambda2", l2}, {"lambda3", l3}, {"sampled_lower", tent.lower},
                      {"sampled_upper", tent.upper}};
  bool ok = std::abs(t.lower - 1) <= 1e-5 && std::abs(t.upper - 1) <= 1e-5 && l2 < l3 &&
            std::abs(tent.lower - l2) <= 1e-5 && std::abs(tent.upper - l3) <= 1e-5;
  o.report["regimes"] = Json::array();
  int bad = 0;
  for (double lambda : {0.8 * l2, std::sqrt(l2 * l3), 1.5 * l3}) {
    const auto r = oracle_agreement(ev, c.oracle(lambda, ev), 300, 1);
    bad += r.disagree;
    o.report["regimes"].push_back({{"lambda", lambda}, {"agree", r.agree}, {"tube", r.tube},
                                   {"disagree", r.disagree}});
  }
  o.pass = ok && bad == 0;
  o.summary = "cos thresholds " + fmt("%.7f", t.lower) + ", " + fmt("%.7f", t.upper) +
              "; tent lambda2 " + fmt("%.5f", l2) + " < lambda3 " + fmt("%.5f", l3) + "; " +
              std::to_string(bad) + " out-of-tube disagreements over 3 x 300 points";
  return o;
}

// 10. Analytic invariants of G.
Outcome invariants() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  Outcome o;
  bool ok = true;

  // Conjugate symmetry.
  double conj_worst = 0;
  for (const auto& ev : {GdEvaluator::automatic(cos_potential()),
                         GdEvaluator::automatic(tent())}) {
    for (int k = 0; k < 50; ++k) {
      const Complex z(6 * u(rng) - 3, 3 * u(rng));
      const double d = std::abs(ev.value(z) - ev.value(std::conj(z)));
      conj_worst = std::max(conj_worst, d / (2 * ev.level_tolerance()));
    }
  }
  o.report["conjugate_symmetry_worst_ratio"] = conj_worst;
  ok = ok && conj_worst <= 1;

  // Directional monotonicity: dG/dy has the sign of y, dG/dx > 0 right of the range.
  int sign_bad = 0, sign_total = 0;
  for (const Potential& v : {cos_potential(), tent()}) {
    const GdEvaluator ev(v, GdMethod::Quadrature, 1e-10);
    const double top = v.sup_norm();
    for (int k = 0; k < 20; ++k) {
      const Complex z(2 * top * (2 * u(rng) - 1), (0.1 + u(rng)) * (u(rng) < 0.5 ? -1 : 1));
      const auto g = gd_gradient(ev, z, 1e-4);
      sign_bad += (g.dy > 0) != (z.imag() > 0);
      const Complex right(top + 0.1 + 2 * u(rng), 2 * u(rng) - 1);
      sign_bad += !(gd_gradient(ev, right, 1e-4).dx > 0);
      sign_total += 2;
    }
  }
  o.report["monotonicity_sign_failures"] = sign_bad;
  o.report["monotonicity_checks"] = sign_total;
  ok = ok && sign_bad == 0;

  // Radial symmetry and monotonicity for e^{2 pi i t1} + e^{2 pi i t2}.
  const auto radial = GdEvaluator::automatic(Potential(SeparableSum({exp_potential(), exp_potential()})));
  double sym_worst = 0;
  for (double r : {0.5, 1.0, 1.7, 2.5}) {
    const double g0 = radial.value(r);
    for (int k = 0; k < 8; ++k)
      sym_worst = std::max(sym_worst, std::abs(radial.value(r * unit_phase(u(rng))) - g0) /
                                          (2 * radial.level_tolerance()));
  }
  std::vector<double> profile;
  for (double r = 1.0; r <= 4.0 + 1e-12; r += 0.5) profile.push_back(radial.value(r));
  bool increasing = true;
  for (std::size_t k = 1; k < profile.size(); ++k) increasing = increasing && profile[k] > profile[k - 1];
  o.report["radial_symmetry_worst_ratio"] = sym_worst;
  o.report["radial_profile"] = profile;
  o.report["radial_increasing"] = increasing;
  ok = ok && sym_worst <= 1 && increasing;

  // 8-point mean value off the range, where G is harmonic: sub-mean and
  // equality up to 3 eps plus the (r/d)^8 aliasing term of the 8-point rule.
  double mean_worst = 0;
  int sub_bad = 0;
  for (const Potential& v : {cos_potential(), two_mode_potential(), tent()}) {
    const auto ev = GdEvaluator::automatic(v);
    const double eps = ev.level_tolerance();
    int tested = 0;
    while (tested < 10) {
      const Complex z(8 * u(rng) - 4, 8 * u(rng) - 4);
      const double d = dist_to_range(v, z, 4096);
      if (d < 0.2) continue;
      const double r = 0.05 * d;
      const double allowance = 3 * eps + 8 * std::pow(r / d, 8);
      double mean = 0;
      for (int k = 0; k < 8; ++k) mean += ev.value(z + r * unit_phase(k / 8.0)) / 8;
      const double g = ev.value(z);
      sub_bad += g > mean + allowance;
      mean_worst = std::max(mean_worst, std::abs(g - mean) / allowance);
      ++tested;
    }
  }
  o.report["mean_value_worst_ratio"] = mean_worst;
  o.report["sub_mean_failures"] = sub_bad;
  ok = ok && mean_worst <= 1 && sub_bad == 0;

  // Integral gradient against central differences.
  double grad_worst = 0;
  for (const Potential& v : {cos_potential(), tent(), exp_potential()}) {
    const GdEvaluator ev(v, GdMethod::Quadrature, 1e-10);
    int tested = 0;
    while (tested < 20) {
      const Complex z(6 * u(rng) - 3, 6 * u(rng) - 3);
      if (dist_to_range(v, z, 4096) < 0.1) continue;
      const auto a = gd_gradient(ev, z, 1e-4, GradientPath::Integral);
      const auto b = gd_gradient(ev, z, 1e-4, GradientPath::Difference);
      grad_worst = std::max({grad_worst, std::abs(a.dx - b.dx), std::abs(a.dy - b.dy)});
      ++tested;
    }
  }
  o.report["gradient_worst"] = grad_worst;
  ok = ok && grad_worst <= 1e-4;

  o.pass = ok;
  o.summary = "conjugate " + fmt("%.2f", conj_worst) + ", radial " + fmt("%.2f", sym_worst) +
              ", mean value " + fmt("%.2f", mean_worst) + " of tolerance; " +
              std::to_string(sign_bad) + " sign failures; gradient gap " + fmt("%.1e", grad_worst);
  return o;
}

// Characteristic polynomial of an upper Hessenberg matrix by the determinant
// recursion over leading principal minors.
std::vector<std::complex<long double>> hessenberg_charpoly(const ComplexMatrix& h) {
  using C = std::complex<long double>;
  const long n = h.rows();
  std::vector<std::vector<C>> p(static_cast<std::size_t>(n) + 1);
  p[0] = {C(1)};
  for (long k = 1; k <= n; ++k) {
    std::vector<C> next(static_cast<std::size_t>(k) + 1, C(0));
    const auto& prev = p[static_cast<std::size_t>(k - 1)];
    const C hkk(h(k - 1, k - 1));
    for (std::size_t i = 0; i < prev.size(); ++i) {
      next[i + 1] += prev[i];
      next[i] -= hkk * prev[i];
    }
    C prod(1);
    for (long i = k - 1; i >= 1; --i) {
      prod *= C(h(i, i - 1));
      const C coeff = C(h(i - 1, k - 1)) * prod;
      const auto& lower = p[static_cast<std::size_t>(i - 1)];
      for (std::size_t t = 0; t < lower.size(); ++t) next[t] -= coeff * lower[t];
    }
    p[static_cast<std::size_t>(k)] = std::move(next);
  }
  return p[static_cast<std::size_t>(n)];
}

// 11. Eigensolver and root finder cross-checks.
Outcome solver_oracles() {
  std::mt19937_64 rng(1);
  double eig_worst = 0, trace_worst = 0;
  for (int trial = 0; trial < 50; ++trial) {
    ComplexMatrix a(8, 8);
    for (long i = 0; i < 8; ++i)
      for (long j = 0; j < 8; ++j) a(i, j) = normal_complex(rng);
    const auto e = eig_dense(a);
    const ComplexMatrix h = Eigen::HessenbergDecomposition<ComplexMatrix>(a).matrixH();
    const auto r = roots<long double>(hessenberg_charpoly(h));
    // Greedy matching on all pair distances.
    std::vector<std::tuple<double, int, int>> pairs;
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j)
        pairs.emplace_back(std::abs(e.values(i) - Complex(r.roots[static_cast<std::size_t>(j)])), i, j);
    std::sort(pairs.begin(), pairs.end());
    std::vector<bool> used_e(8), used_r(8);
    double worst = 0;
    for (const auto& [d, i, j] : pairs) {
      if (used_e[static_cast<std::size_t>(i)] || used_r[static_cast<std::size_t>(j)]) continue;
      used_e[static_cast<std::size_t>(i)] = used_r[static_cast<std::size_t>(j)] = true;
      worst = std::max(worst, d);
    }
    eig_worst = std::max(eig_worst, worst);
    trace_worst = std::max(trace_worst, std::abs(e.values.sum() - a.trace()) / a.norm());
  }
  double backward_worst = 0;
  bool counts = true;
  std::uniform_int_distribution<int> deg(1, 12);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Complex> c(static_cast<std::size_t>(deg(rng)) + 1);
    for (auto& x : c) x = normal_complex(rng);
    const auto r = roots<double>(c);
    counts = counts && static_cast<int>(r.roots.size()) == r.degree() && r.converged;
    backward_worst = std::max(backward_worst, r.max_backward_error() / r.coefficient_norm());
  }
  Outcome o;
  o.report = {{"eigen_vs_charpoly_roots", eig_worst},
              {"trace_relative", trace_worst},
              {"backward_error_relative", backward_worst},
              {"root_counts_ok", counts}};
  o.pass = eig_worst <= 1e-7 && trace_worst <= 1e-9 && backward_worst <= 1e-10 && counts;
  o.summary = "8x8 eig vs charpoly roots " + fmt("%.1e", eig_worst) + " (<= 1e-7), trace " +
              fmt("%.1e", trace_worst) + " ||A|| (<= 1e-9), backward error " +
              fmt("%.1e", backward_worst) + " ||p|| (<= 1e-10)";
  return o;
}

// 12. Primal Bloch blocks against dual Floquet roots.
Outcome duality() {
  struct Case {
    std::string name;
    TrigPolynomial1D v;
    double lambda;
    std::int64_t p, q;
  };
  const std::vector<Case> cases{{"exp", *exp_potential().as<TrigPolynomial1D>(), 1.0, 2, 5},
                                {"cos", *cos_potential().as<TrigPolynomial1D>(), 0.5, 1, 3},
                                {"hatano-nelson g=1", hatano_nelson(1.0), 1.0, 3, 8}};
  Outcome o;
  o.pass = true;
  o.report["cases"] = Json::array();
  std::string summary;
  for (const auto& c : cases) {
    const auto r = duality_check_periodic(c.v, c.lambda, c.p, c.q, 16, 16);
    const bool ok = r.hausdorff <= r.resolution_bound;
    o.pass = o.pass && ok;
    o.report["cases"].push_back({{"potential", c.name},
                                 {"lambda", c.lambda},
                                 {"p", c.p},
                                 {"q", c.q},
                                 {"hausdorff", r.hausdorff},
                                 {"resolution_bound", r.resolution_bound},
                                 {"pass", ok}});
    summary += " " + c.name + " " + fmt("%.1e", r.hausdorff) + " <= " + fmt("%.1e", r.resolution_bound) + ";";
  }
  o.summary = "Hausdorff vs grid bound:" + summary;
  return o;
}

using Criterion = std::function<Outcome()>;

std::map<int, Criterion> criteria(std::map<int, double>& seconds) {
  return {{1, jensen_vs_quadrature}, {2, monomial_grid},       {3, hn_1d},
          {4, [&] { return hn_2d(seconds); }},                 {5, truncation},
          {6, floquet_convergence},  {7, weyl},                {8, rouche},
          {9, pt},                   {10, invariants},         {11, solver_oracles},
          {12, duality}};
}

void write(const fs::path& dir, int n, const Json& j) {
  fs::create_directories(dir);
  char name[32];
  std::snprintf(name, sizeof name, "criterion_%02d.json", n);
  std::ofstream(dir / name, std::ios::binary) << dump(j);
}

Json tagged(int n, const Outcome& o) {
  Json j;
  j["schema"] = "v1";
  j["criterion"] = n;
  j["pass"] = o.pass;
  j["report"] = o.report;
  return j;
}

// 13. Criteria 1-12 at 1 and 8 threads, artifacts compared byte for byte.
Outcome determinism(const fs::path& out) {
  std::map<int, double> seconds;
  auto all = criteria(seconds);
  Outcome o;
  o.report["thread_counts"] = {1, 8};
  o.report["criteria"] = Json::array();
  int same = 0;
  for (const auto& [n, run] : all) {
    std::string text[2];
    for (int t = 0; t < 2; ++t) {
      const int threads = t == 0 ? 1 : 8;
      set_thread_count(threads);
      const Json j = tagged(n, run());
      write(out / ("threads_" + std::to_string(threads)), n, j);
      text[t] = dump(j);
    }
    const bool eq = text[0] == text[1];
    same += eq;
    o.report["criteria"].push_back({{"criterion", n}, {"identical", eq}, {"bytes", text[0].size()}});
  }
  set_thread_count(0);
  o.pass = same == static_cast<int>(all.size());
  o.summary = std::to_string(same) + "/12 criterion artifacts byte-identical at 1 and 8 threads";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> which;
  std::string out = "acceptance";
  app.add_option("--criterion", which, "criterion number (repeatable; default all)")
      ->check(CLI::Range(1, 13));
  app.add_option("--out", out, "directory for per-criterion JSON");
  CLI11_PARSE(app, argc, argv);
  if (which.empty())
    for (int n = 1; n <= 13; ++n) which.push_back(n);

  std::map<int, double> seconds;
  auto all = criteria(seconds);
  bool ok = true;
  for (int n : which) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = n == 13 ? determinism(out) : all.at(n)();
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = std::string("error: ") + e.what();
      o.report["error"] = e.what();
    }
    write(out, n, tagged(n, o));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d: %s  %s  [%.1f s]\n", n, o.pass ? "PASS" : "FAIL", o.summary.c_str(), secs);
    std::fflush(stdout);
    ok = ok && o.pass;
  }
  return ok ? 0 : 1;
}
