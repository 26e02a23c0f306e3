#pragma once

#include "spectral_atlas/common.hpp"

#include <span>
#include <vector>

namespace atlas {

struct Polyline {
  std::vector<Complex> points;
  bool closed = false;
};

// Uniform bucket grid over a fixed point cloud; nearest-distance queries are
// exact.
class PointIndex {
 public:
  PointIndex() = default;
  explicit PointIndex(std::vector<Complex> points);

  bool empty() const { return points_.empty(); }
  std::size_t size() const { return points_.size(); }
  const std::vector<Complex>& points() const { return points_; }

  double nearest_distance(Complex z) const;
  std::size_t nearest(Complex z) const;  // lowest id among ties

 private:
  std::vector<Complex> points_;
  std::vector<std::size_t> order_;   // point ids grouped by bucket
  std::vector<std::size_t> offset_;  // bucket b owns order_[offset_[b], offset_[b+1])
  double x0_ = 0, y0_ = 0, cell_ = 1;
  long nx_ = 1, ny_ = 1;
};

// sup over a in A of dist(a, B).
double directed_hausdorff(std::span<const Complex> from, std::span<const Complex> to);
double directed_hausdorff(std::span<const Complex> from, const PointIndex& to);
double hausdorff(std::span<const Complex> a, std::span<const Complex> b);

double segment_distance(Complex z, Complex a, Complex b);
double distance_to_polyline(Complex z, const Polyline& line);
double distance_to_polylines(Complex z, std::span<const Polyline> lines);

// Even-odd rule against a closed polygon.
bool inside_polygon(Complex z, std::span<const Complex> polygon);

// Densely resamples polylines so that consecutive points are at most `step`
// apart; used to compare curves as point sets.
std::vector<Complex> densify(std::span<const Polyline> lines, double step);

}  // namespace atlas
