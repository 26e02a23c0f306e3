#pragma once

#include "spectral_atlas/gd.hpp"
#include "spectral_atlas/geometry.hpp"

#include <cstdint>
#include <vector>

namespace atlas {

// LevelSet: G = log lambda. Range: G > log lambda on the range of V.
enum class Label : std::uint8_t { Resolvent = 0, Range = 1, LevelSet = 2 };

inline bool in_spectrum(Label l) { return l != Label::Resolvent; }
char label_code(Label l);  // 'R', 'C', 'P'

struct Classification {
  Label label = Label::Resolvent;
  double g = 0;
  double log_lambda = 0;
  double range_distance = 0;
  bool near_singular = false;
  bool converged = true;
};

// Zero means "use the evaluator's default".
struct ClassifyOptions {
  double level_tolerance = 0;
  double range_tolerance = 0;
};

// lambda is a modulus; lambda == 0 classifies by range membership alone.
Classification classify(const GdEvaluator& ev, Complex z, double lambda,
                        const ClassifyOptions& opt = {});

struct SpectrumSet {
  double lambda = 0;
  Box box;
  int n = 0;
  double hx = 0, hy = 0;
  double level_tolerance = 0, range_tolerance = 0;
  std::vector<Classification> nodes;  // row-major, index j * n + i
  std::vector<std::uint8_t> failed;   // evaluator missed its accuracy contract
  std::vector<Polyline> curves;       // level-set polylines
  std::vector<Complex> range_points;  // range samples labelled Range (d = 1)
  int unrefined_vertices = 0;

  Complex node(int i, int j) const {
    return {box.x0 + hx * i, box.y0 + hy * j};
  }
  const Classification& at(int i, int j) const {
    return nodes[static_cast<std::size_t>(j) * static_cast<std::size_t>(n) +
                 static_cast<std::size_t>(i)];
  }
  Label label(int i, int j) const { return at(i, j).label; }
  std::size_t count(Label l) const;
  std::size_t failures() const;
  double step() const { return std::max(hx, hy); }
};

// Grid classification only.
SpectrumSet rasterize(const GdEvaluator& ev, double lambda, Box box, int n,
                      const ClassifyOptions& opt = {});

// Marching squares on F = G - log lambda over an existing raster; edge
// crossings are bisected until the inside endpoint has |F| <= level tolerance.
std::vector<Polyline> trace_level_set(const GdEvaluator& ev, const SpectrumSet& grid,
                                      int* unrefined = nullptr);
std::vector<Polyline> trace_level_set(const GdEvaluator& ev, double lambda, Box box, int n);

// Range samples whose label is Range, i.e. G > log lambda + tolerance.
std::vector<Complex> range_set(const GdEvaluator& ev, double lambda,
                               const ClassifyOptions& opt = {});

// rasterize + trace_level_set + range_set (the latter for d = 1).
SpectrumSet compute_spectrum(const GdEvaluator& ev, double lambda, Box box, int n,
                             const ClassifyOptions& opt = {});

struct Thresholds {
  double lower = 0, upper = 0;  // e^{min G}, e^{max G} over the range
  int samples = 0;
};
Thresholds pt_thresholds(const GdEvaluator& ev);

struct RoucheDisc {
  Complex center;
  double radius = 0;
  bool admissible = false;
};
RoucheDisc rouche_disc(const TrigPolynomial1D& v);

// True when the grid node nearest to z is Resolvent and its 4-connected
// Resolvent component does not reach the edge of the grid.
bool encloses_hole(const SpectrumSet& grid, Complex z);

}  // namespace atlas
