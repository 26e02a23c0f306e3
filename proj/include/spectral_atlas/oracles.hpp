#pragma once

#include "spectral_atlas/common.hpp"
#include "spectral_atlas/gd.hpp"
#include "spectral_atlas/geometry.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace atlas {

enum class Membership { Out, In, Boundary };

std::string to_string(Membership m);
inline bool member(Membership m) { return m != Membership::Out; }

// Points within this distance of a curve-type spectrum count as on it.
inline constexpr double kCurveTolerance = 1e-9;

// Spectrum of u(n-1) + lambda e^{2 pi i (omega + n alpha)} u(n) (and of its
// diagonal-hopping analogue in any dimension): unit circle below lambda = 1,
// closed unit disc at 1, circle of radius lambda above.
Membership oracle_monomial(double lambda, Complex z);

// G along the positive real axis for a radial G, sampled on [0, r_max] and
// inverted by bisection on the exact evaluator.
class RadialProfile {
 public:
  RadialProfile(std::function<double(double)> g, double r_max, int samples = 257);

  double r_max() const { return r_max_; }
  const std::vector<double>& radii() const { return radii_; }
  const std::vector<double>& values() const { return values_; }
  double at_origin() const { return values_.front(); }
  double operator()(double r) const { return g_(r); }
  // Monotone (piecewise linear) interpolation of the samples.
  double interpolate(double r) const;
  // Smallest r with G(r) = level, for level within the sampled range.
  double invert(double level) const;

 private:
  std::function<double(double)> g_;
  double r_max_;
  std::vector<double> radii_, values_;
};

// sum_{j=1}^d e^{2 pi i theta_j}: disc |z| <= d up to lambda_1 = e^{G(0)},
// annulus G^{-1}(log lambda) <= |z| <= d below d, circle |z| = lambda above.
Membership oracle_cosine_sum(int d, double lambda, Complex z, const RadialProfile& profile);

// e^{-g} e^{2 pi i t} + e^{g} e^{-2 pi i t} with Re g >= 0.
Membership oracle_hn_1d(Complex g, double lambda, Complex z);

// [-2, 2] plus the ellipse above (g > 0 real): E below lambda = e^g, its
// convex hull at e^g. Larger lambda has no closed form (UsageError).
Membership oracle_hn_2d(double g, double lambda, Complex z);

// e^{2 pi i t} + 2 e^{4 pi i t} at lambda = 2: the curve plus the region
// bounded by its inner loop.
Membership oracle_two5(Complex z);

// Tent potential: [0, 1/2] where G >= log lambda, plus the level curve.
Membership oracle_pwl(double lambda, Complex z);
// e^{min G} over [0, 1/2] and e^{G(0)}.
std::pair<double, double> pwl_thresholds();

struct OracleSpectrum {
  std::string tag;
  double lambda = 0;
  std::vector<std::pair<std::string, double>> parameters;
  std::function<Membership(Complex)> membership;
  std::vector<Polyline> boundaries;
  std::vector<bool> level_curve;  // boundaries[i] lies on G = log lambda
  Box frame;

  // Distance to the nearest boundary point and that point (densified
  // boundaries, error below 1e-5 of the frame size).
  double boundary_distance(Complex z) const;
  Complex nearest_boundary(Complex z) const;
  void index_boundaries();

 private:
  std::shared_ptr<const PointIndex> index_;
  std::shared_ptr<const std::vector<Complex>> dense_;
};

// One entry per reference case: the potential, how G is evaluated, a
// sensible frame, and the closed-form spectrum when there is one.
struct GalleryCase {
  std::string tag;
  std::string title;
  Potential potential{TrigPolynomial1D(1, {1.0})};
  std::function<GdEvaluator()> evaluator;
  double g = 0;  // Hatano-Nelson asymmetry, where relevant
  std::function<Box(double)> frame;
  std::function<bool(double)> has_oracle;
  std::function<OracleSpectrum(double, const GdEvaluator&)> oracle;
};

const std::vector<std::string>& gallery_tags();
GalleryCase gallery_case(const std::string& tag, double g = 1.0);

// Hatano-Nelson potentials.
TrigPolynomial1D hatano_nelson(Complex g);
SeparableSum hatano_nelson_2d(double g);

struct AgreementReport {
  std::string tag;
  double lambda = 0;
  int agree = 0, tube = 0, disagree = 0;
  double tube_width_max = 0;
  std::vector<Complex> disagreements;
};

// Random points in the oracle frame classified both ways. Mismatches within
// 2 max(range tolerance, level tolerance / |grad G|, h) of a boundary are
// excused; h is the frame width over (resolution - 1).
AgreementReport oracle_agreement(const GdEvaluator& ev, const OracleSpectrum& oracle, int samples,
                                 std::uint64_t seed, int resolution = 201);

}  // namespace atlas
