#include "spectral_atlas/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>

namespace atlas {

char label_code(Label l) {
  switch (l) {
    case Label::Resolvent: return 'R';
    case Label::Range: return 'C';
    case Label::LevelSet: return 'P';
  }
  return '?';
}

namespace {

double level_tol(const GdEvaluator& ev, const ClassifyOptions& opt) {
  return opt.level_tolerance > 0 ? opt.level_tolerance : ev.level_tolerance();
}
double range_tol(const GdEvaluator& ev, const ClassifyOptions& opt) {
  return opt.range_tolerance > 0 ? opt.range_tolerance : ev.range_tolerance();
}

Classification classify_with(const GdEvaluator& ev, Complex z, double lambda, double eps_level,
                             double eps_range) {
  if (!(lambda >= 0) || !std::isfinite(lambda))
    throw UsageError("lambda must be a finite modulus >= 0");
  Classification c;
  c.range_distance = ev.range().distance(z);
  const bool on_range = c.range_distance <= eps_range;
  if (lambda == 0) {
    c.log_lambda = -std::numeric_limits<double>::infinity();
    c.g = std::numeric_limits<double>::quiet_NaN();
    c.label = on_range ? Label::Range : Label::Resolvent;
    return c;
  }
  const GdValue g = ev(z);
  c.g = g.value;
  c.near_singular = g.near_singular;
  c.converged = g.converged;
  c.log_lambda = std::log(lambda);
  const double f = c.g - c.log_lambda;
  if (std::abs(f) <= eps_level)
    c.label = Label::LevelSet;
  else if (f > eps_level && on_range)
    c.label = Label::Range;
  else
    c.label = Label::Resolvent;
  return c;
}

}  // namespace

Classification classify(const GdEvaluator& ev, Complex z, double lambda,
                        const ClassifyOptions& opt) {
  return classify_with(ev, z, lambda, level_tol(ev, opt), range_tol(ev, opt));
}

std::size_t SpectrumSet::count(Label l) const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [l](const auto& c) { return c.label == l; }));
}

std::size_t SpectrumSet::failures() const {
  return static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
}

SpectrumSet rasterize(const GdEvaluator& ev, double lambda, Box box, int n,
                      const ClassifyOptions& opt) {
  if (n < 16) throw UsageError("grid resolution must be >= 16");
  if (!(box.width() > 0) || !(box.height() > 0)) throw UsageError("box has zero area");
  SpectrumSet s;
  s.lambda = lambda;
  s.box = box;
  s.n = n;
  s.hx = box.width() / (n - 1);
  s.hy = box.height() / (n - 1);
  s.level_tolerance = level_tol(ev, opt);
  s.range_tolerance = range_tol(ev, opt);
  const std::size_t total = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  s.nodes.resize(total);
  s.failed.assign(total, 0);
  parallel_for(total, [&](std::size_t k) {
    const int i = static_cast<int>(k % static_cast<std::size_t>(n));
    const int j = static_cast<int>(k / static_cast<std::size_t>(n));
    try {
      s.nodes[k] = classify_with(ev, s.node(i, j), lambda, s.level_tolerance, s.range_tolerance);
      s.failed[k] = s.nodes[k].converged ? 0 : 1;
    } catch (const NumericalError&) {
      s.nodes[k].label = Label::Resolvent;
      s.nodes[k].g = std::numeric_limits<double>::quiet_NaN();
      s.failed[k] = 1;
    }
  });
  return s;
}

namespace {

// Cell corners c0 (i,j), c1 (i+1,j), c2 (i+1,j+1), c3 (i,j+1); edges
// e0 = c0c1, e1 = c1c2, e2 = c3c2, e3 = c0c3.
struct EdgeId {
  static long horizontal(int i, int j, int n) { return 2L * (long(j) * n + i); }
  static long vertical(int i, int j, int n) { return 2L * (long(j) * n + i) + 1; }
};

struct Segment {
  long a, b;
};

}  // namespace

std::vector<Polyline> trace_level_set(const GdEvaluator& ev, const SpectrumSet& grid,
                                      int* unrefined) {
  const int n = grid.n;
  const double log_lambda = std::log(grid.lambda);
  const double eps = grid.level_tolerance;
  if (grid.lambda <= 0) return {};
  auto f_at = [&](Complex z) { return ev(z).value - log_lambda; };
  auto inside_node = [&](int i, int j) {
    const double f = grid.at(i, j).g - log_lambda;
    return std::isfinite(f) && f <= eps;
  };

  std::vector<Segment> segments;
  std::vector<std::pair<long, std::pair<Complex, Complex>>> edges;  // id -> (in, out) endpoints
  std::map<long, std::size_t> edge_slot;
  auto note_edge = [&](long id, int ia, int ja, int ib, int jb) {
    if (edge_slot.count(id)) return;
    Complex in = grid.node(ia, ja), out = grid.node(ib, jb);
    if (!inside_node(ia, ja)) std::swap(in, out);
    edge_slot[id] = edges.size();
    edges.push_back({id, {in, out}});
  };

  std::vector<std::pair<int, int>> saddle_cells;
  for (int j = 0; j + 1 < n; ++j)
    for (int i = 0; i + 1 < n; ++i) {
      const int bits = (inside_node(i, j) ? 1 : 0) | (inside_node(i + 1, j) ? 2 : 0) |
                       (inside_node(i + 1, j + 1) ? 4 : 0) | (inside_node(i, j + 1) ? 8 : 0);
      if (bits == 0 || bits == 15) continue;
      if (bits == 5 || bits == 10) saddle_cells.emplace_back(i, j);
    }
  // Cell-centre values for ambiguous cells.
  std::vector<std::uint8_t> centre_inside(saddle_cells.size());
  parallel_for(saddle_cells.size(), [&](std::size_t k) {
    const auto [i, j] = saddle_cells[k];
    const Complex c = grid.node(i, j) + Complex(0.5 * grid.hx, 0.5 * grid.hy);
    const double f = f_at(c);
    centre_inside[k] = std::isfinite(f) && f <= eps ? 1 : 0;
  });

  std::size_t saddle = 0;
  for (int j = 0; j + 1 < n; ++j)
    for (int i = 0; i + 1 < n; ++i) {
      const bool in0 = inside_node(i, j), in1 = inside_node(i + 1, j),
                 in2 = inside_node(i + 1, j + 1), in3 = inside_node(i, j + 1);
      const int bits = (in0 ? 1 : 0) | (in1 ? 2 : 0) | (in2 ? 4 : 0) | (in3 ? 8 : 0);
      if (bits == 0 || bits == 15) continue;
      const long e[4] = {EdgeId::horizontal(i, j, n), EdgeId::vertical(i + 1, j, n),
                         EdgeId::horizontal(i, j + 1, n), EdgeId::vertical(i, j, n)};
      if (in0 != in1) note_edge(e[0], i, j, i + 1, j);
      if (in1 != in2) note_edge(e[1], i + 1, j, i + 1, j + 1);
      if (in3 != in2) note_edge(e[2], i, j + 1, i + 1, j + 1);
      if (in0 != in3) note_edge(e[3], i, j, i, j + 1);
      if (bits == 5 || bits == 10) {
        const bool centre = centre_inside[saddle++] != 0;
        if ((bits == 5) == centre) {
          segments.push_back({e[0], e[1]});
          segments.push_back({e[3], e[2]});
        } else {
          segments.push_back({e[0], e[3]});
          segments.push_back({e[1], e[2]});
        }
        continue;
      }
      long found[2];
      int k = 0;
      if (in0 != in1) found[k++] = e[0];
      if (in1 != in2) found[k++] = e[1];
      if (in3 != in2) found[k++] = e[2];
      if (in0 != in3) found[k++] = e[3];
      segments.push_back({found[0], found[1]});
    }

  // Refine every crossing by bisection.
  std::vector<Complex> vertex(edges.size());
  std::vector<std::uint8_t> bad(edges.size(), 0);
  const double h = std::min(grid.hx, grid.hy);
  parallel_for(edges.size(), [&](std::size_t k) {
    Complex in = edges[k].second.first, out = edges[k].second.second;
    double f_in = f_at(in);
    for (int it = 0; it < 80; ++it) {
      const bool small = std::abs(out - in) <= 1e-6 * h;
      if (small && std::abs(f_in) <= eps) break;
      if (std::abs(out - in) <= 1e-14 * (1 + std::abs(in))) break;
      const Complex mid = 0.5 * (in + out);
      const double f = f_at(mid);
      if (std::isfinite(f) && f <= eps) {
        in = mid;
        f_in = f;
      } else {
        out = mid;
      }
    }
    vertex[k] = in;
    bad[k] = std::abs(f_in) <= eps ? 0 : 1;
  });
  if (unrefined) *unrefined = static_cast<int>(std::count(bad.begin(), bad.end(), 1));

  // Stitch segments that share an edge.
  std::map<long, std::vector<std::size_t>> incident;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    incident[segments[s].a].push_back(s);
    incident[segments[s].b].push_back(s);
  }
  std::vector<bool> used(segments.size(), false);
  std::vector<Polyline> lines;
  auto walk = [&](long start_edge, std::size_t first) {
    Polyline line;
    long edge = start_edge;
    std::size_t seg = first;
    line.points.push_back(vertex[edge_slot.at(edge)]);
    while (true) {
      used[seg] = true;
      const long next = segments[seg].a == edge ? segments[seg].b : segments[seg].a;
      if (next == start_edge) {
        line.closed = true;
        break;
      }
      line.points.push_back(vertex[edge_slot.at(next)]);
      edge = next;
      std::size_t following = segments.size();
      for (std::size_t cand : incident[edge])
        if (!used[cand]) {
          following = cand;
          break;
        }
      if (following == segments.size()) break;
      seg = following;
    }
    lines.push_back(std::move(line));
  };
  for (const auto& [edge, segs] : incident)
    if (segs.size() == 1 && !used[segs[0]]) walk(edge, segs[0]);
  for (const auto& [edge, segs] : incident)
    for (std::size_t s : segs)
      if (!used[s]) walk(edge, s);
  return lines;
}

std::vector<Polyline> trace_level_set(const GdEvaluator& ev, double lambda, Box box, int n) {
  return trace_level_set(ev, rasterize(ev, lambda, box, n));
}

std::vector<Complex> range_set(const GdEvaluator& ev, double lambda, const ClassifyOptions& opt) {
  const auto& pts = ev.range().points();
  const double eps = level_tol(ev, opt);
  if (lambda == 0) return pts;
  const double log_lambda = std::log(lambda);
  std::vector<std::uint8_t> keep(pts.size(), 0);
  parallel_for(pts.size(), [&](std::size_t k) {
    keep[k] = ev(pts[k]).value - log_lambda > eps ? 1 : 0;
  });
  std::vector<Complex> out;
  for (std::size_t k = 0; k < pts.size(); ++k)
    if (keep[k]) out.push_back(pts[k]);
  return out;
}

SpectrumSet compute_spectrum(const GdEvaluator& ev, double lambda, Box box, int n,
                             const ClassifyOptions& opt) {
  SpectrumSet s = rasterize(ev, lambda, box, n, opt);
  if (lambda > 0) s.curves = trace_level_set(ev, s, &s.unrefined_vertices);
  if (ev.potential().dimension() == 1) s.range_points = range_set(ev, lambda, opt);
  return s;
}

Thresholds pt_thresholds(const GdEvaluator& ev) {
  if (!ev.potential().real_valued())
    throw UsageError("PT thresholds need a real-valued potential");
  const auto& pts = ev.range().points();
  if (pts.empty()) throw UsageError("no range samples");
  double lo = pts[0].real(), hi = pts[0].real();
  for (const auto& p : pts) {
    lo = std::min(lo, p.real());
    hi = std::max(hi, p.real());
  }
  Thresholds out;
  std::vector<double> g;  // values on the current nested grid
  int intervals = 64;
  double prev_min = 0, prev_max = 0;
  bool have_prev = false;
  while (true) {
    std::vector<double> next(static_cast<std::size_t>(intervals) + 1);
    std::vector<std::size_t> fresh;
    for (int k = 0; k <= intervals; ++k) {
      if (!g.empty() && k % 2 == 0)
        next[static_cast<std::size_t>(k)] = g[static_cast<std::size_t>(k / 2)];
      else
        fresh.push_back(static_cast<std::size_t>(k));
    }
    parallel_for(fresh.size(), [&](std::size_t idx) {
      const std::size_t k = fresh[idx];
      const double x = hi == lo ? lo : lo + (hi - lo) * double(k) / intervals;
      next[k] = ev(Complex(x, 0)).value;
    });
    g.swap(next);
    const auto [mn, mx] = std::minmax_element(g.begin(), g.end());
    out.samples = intervals + 1;
    if (have_prev && std::abs(*mn - prev_min) <= 1e-6 && std::abs(*mx - prev_max) <= 1e-6) {
      out.lower = std::exp(*mn);
      out.upper = std::exp(*mx);
      return out;
    }
    if (intervals >= (1 << 16)) {
      out.lower = std::exp(*mn);
      out.upper = std::exp(*mx);
      throw NumericalError("PT thresholds did not settle to 1e-6 within 65537 samples");
    }
    prev_min = *mn;
    prev_max = *mx;
    have_prev = true;
    intervals *= 2;
  }
}

RoucheDisc rouche_disc(const TrigPolynomial1D& v) {
  if (v.constant()) throw UsageError("rouche disc needs a non-constant potential");
  double rest = 0;
  for (int k = v.low(); k < v.high(); ++k)
    if (k != 0) rest += std::abs(v.coefficient(k));
  RoucheDisc d;
  d.center = v.coefficient(0);
  const double top = std::abs(v.coefficient(v.high()));
  d.admissible = rest < top;
  d.radius = d.admissible ? top - rest : 0.0;
  return d;
}

bool encloses_hole(const SpectrumSet& grid, Complex z) {
  const int n = grid.n;
  const int i0 = static_cast<int>(std::lround((z.real() - grid.box.x0) / grid.hx));
  const int j0 = static_cast<int>(std::lround((z.imag() - grid.box.y0) / grid.hy));
  if (i0 < 0 || j0 < 0 || i0 >= n || j0 >= n) return false;
  if (grid.label(i0, j0) != Label::Resolvent) return false;
  std::vector<std::uint8_t> seen(grid.nodes.size(), 0);
  std::deque<std::pair<int, int>> queue{{i0, j0}};
  seen[static_cast<std::size_t>(j0 * n + i0)] = 1;
  while (!queue.empty()) {
    const auto [i, j] = queue.front();
    queue.pop_front();
    if (i == 0 || j == 0 || i == n - 1 || j == n - 1) return false;
    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int a = i + di[k], b = j + dj[k];
      const auto idx = static_cast<std::size_t>(b * n + a);
      if (!seen[idx] && grid.label(a, b) == Label::Resolvent) {
        seen[idx] = 1;
        queue.emplace_back(a, b);
      }
    }
  }
  return true;
}

}  // namespace atlas
