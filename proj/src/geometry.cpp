#include "spectral_atlas/geometry.hpp"

#include <algorithm>
#include <limits>

namespace atlas {

PointIndex::PointIndex(std::vector<Complex> points) : points_(std::move(points)) {
  if (points_.empty()) return;
  double x1 = points_[0].real(), y1 = points_[0].imag();
  x0_ = x1;
  y0_ = y1;
  for (const auto& p : points_) {
    x0_ = std::min(x0_, p.real());
    y0_ = std::min(y0_, p.imag());
    x1 = std::max(x1, p.real());
    y1 = std::max(y1, p.imag());
  }
  const double w = x1 - x0_, h = y1 - y0_;
  const double side = std::ceil(std::sqrt(static_cast<double>(points_.size())));
  cell_ = std::max({w, h, 1e-300}) / side;
  nx_ = static_cast<long>(w / cell_) + 1;
  ny_ = static_cast<long>(h / cell_) + 1;

  const std::size_t buckets = static_cast<std::size_t>(nx_ * ny_);
  std::vector<std::size_t> bucket_of(points_.size());
  offset_.assign(buckets + 1, 0);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    long ix = std::min(nx_ - 1, static_cast<long>((points_[i].real() - x0_) / cell_));
    long iy = std::min(ny_ - 1, static_cast<long>((points_[i].imag() - y0_) / cell_));
    bucket_of[i] = static_cast<std::size_t>(iy * nx_ + ix);
    ++offset_[bucket_of[i] + 1];
  }
  for (std::size_t b = 0; b < buckets; ++b) offset_[b + 1] += offset_[b];
  order_.resize(points_.size());
  std::vector<std::size_t> fill(offset_.begin(), offset_.end() - 1);
  for (std::size_t i = 0; i < points_.size(); ++i) order_[fill[bucket_of[i]]++] = i;
}

double PointIndex::nearest_distance(Complex z) const {
  return std::abs(z - points_[nearest(z)]);
}

std::size_t PointIndex::nearest(Complex z) const {
  if (points_.empty()) throw UsageError("nearest-point query on an empty point set");
  const double fx = (z.real() - x0_) / cell_, fy = (z.imag() - y0_) / cell_;
  const long cx = std::clamp(static_cast<long>(std::floor(fx)), 0L, nx_ - 1);
  const long cy = std::clamp(static_cast<long>(std::floor(fy)), 0L, ny_ - 1);
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  const long max_ring = std::max(nx_, ny_);
  auto scan = [&](long ix, long iy) {
    if (ix < 0 || iy < 0 || ix >= nx_ || iy >= ny_) return;
    const std::size_t b = static_cast<std::size_t>(iy * nx_ + ix);
    for (std::size_t k = offset_[b]; k < offset_[b + 1]; ++k) {
      const double d = std::abs(z - points_[order_[k]]);
      if (d < best || (d == best && order_[k] < arg)) {
        best = d;
        arg = order_[k];
      }
    }
  };
  for (long r = 0; r <= max_ring; ++r) {
    if (r == 0) {
      scan(cx, cy);
    } else {
      for (long ix = cx - r; ix <= cx + r; ++ix) {
        scan(ix, cy - r);
        scan(ix, cy + r);
      }
      for (long iy = cy - r + 1; iy <= cy + r - 1; ++iy) {
        scan(cx - r, iy);
        scan(cx + r, iy);
      }
    }
    // Anything in ring r+1 or beyond is at least r cells away.
    if (best < static_cast<double>(r) * cell_) break;
  }
  return arg;
}

double directed_hausdorff(std::span<const Complex> from, const PointIndex& to) {
  if (from.empty() || to.empty()) throw UsageError("hausdorff distance of an empty set");
  double worst = 0;
  for (const auto& z : from) worst = std::max(worst, to.nearest_distance(z));
  return worst;
}

double directed_hausdorff(std::span<const Complex> from, std::span<const Complex> to) {
  if (from.empty() || to.empty()) throw UsageError("hausdorff distance of an empty set");
  PointIndex index(std::vector<Complex>(to.begin(), to.end()));
  return directed_hausdorff(from, index);
}

double hausdorff(std::span<const Complex> a, std::span<const Complex> b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

double segment_distance(Complex z, Complex a, Complex b) {
  const Complex d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0) return std::abs(z - a);
  double t = ((z - a) * std::conj(d)).real() / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(z - (a + t * d));
}

double distance_to_polyline(Complex z, const Polyline& line) {
  const auto& p = line.points;
  if (p.empty()) return std::numeric_limits<double>::infinity();
  if (p.size() == 1) return std::abs(z - p[0]);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    best = std::min(best, segment_distance(z, p[i], p[i + 1]));
  if (line.closed) best = std::min(best, segment_distance(z, p.back(), p.front()));
  return best;
}

double distance_to_polylines(Complex z, std::span<const Polyline> lines) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& l : lines) best = std::min(best, distance_to_polyline(z, l));
  return best;
}

bool inside_polygon(Complex z, std::span<const Complex> polygon) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Complex a = polygon[i], b = polygon[j];
    if ((a.imag() > z.imag()) != (b.imag() > z.imag())) {
      const double x = a.real() + (z.imag() - a.imag()) * (b.real() - a.real()) /
                                      (b.imag() - a.imag());
      if (z.real() < x) inside = !inside;
    }
  }
  return inside;
}

std::vector<Complex> densify(std::span<const Polyline> lines, double step) {
  std::vector<Complex> out;
  for (const auto& l : lines) {
    const auto& p = l.points;
    if (p.size() == 1) out.push_back(p[0]);
    const std::size_t segments = l.closed ? p.size() : (p.empty() ? 0 : p.size() - 1);
    for (std::size_t i = 0; i < segments; ++i) {
      const Complex a = p[i], b = p[(i + 1) % p.size()];
      const int k = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / step)));
      for (int j = 0; j < k; ++j) out.push_back(a + (b - a) * (static_cast<double>(j) / k));
    }
    if (!l.closed && !p.empty()) out.push_back(p.back());
  }
  return out;
}

}  // namespace atlas
