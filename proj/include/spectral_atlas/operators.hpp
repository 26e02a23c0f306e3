#pragma once

#include "spectral_atlas/common.hpp"
#include "spectral_atlas/frequency.hpp"
#include "spectral_atlas/potentials.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace atlas {

// primal: sum_k v_k u(n-k) + lambda e^{2 pi i (omega + <n, alpha>)} u(n)
// dual:   lambda u(n-1) + V(theta + n alpha) u(n)
enum class Model { Primal, Dual };

struct BandedOperatorSpec {
  Model model = Model::Dual;
  Potential potential;
  Complex lambda = 1.0;
  std::vector<double> alpha;  // one entry per torus coordinate
  double omega = 0;           // primal phase
  std::vector<double> theta;  // dual phase, one entry per torus coordinate
};

// Dirichlet truncation to lattice sites first..last (one-dimensional lattice).
ComplexMatrix build_matrix(const BandedOperatorSpec& spec, long first, long last);
// Primal model on a two-dimensional lattice rectangle, flattened row-major
// (second index fastest). Needs a separable potential of trig parts.
ComplexMatrix build_matrix_2d(const BandedOperatorSpec& spec, long first0, long last0,
                              long first1, long last1);

struct EigenResult {
  ComplexVector values;
  double residual = 0;  // max ||(A - z)v|| / ||v|| over (sampled) eigenpairs
  double norm = 0;      // Frobenius norm of A
  bool triangular = false;
  bool converged = true;
};

// Triangular input returns its diagonal; anything else goes through
// Hessenberg reduction and shifted complex QR.
EigenResult eig_dense(const ComplexMatrix& a);

struct RationalFrequency {
  std::int64_t p = 0, q = 1;
  std::optional<std::pair<std::int64_t, std::int64_t>> second;  // d = 2
  std::int64_t period() const { return second ? q * second->second : q; }
};

struct FloquetSpectrum {
  RationalFrequency frequency;
  int period = 0;
  std::vector<std::vector<double>> thetas;
  std::vector<double> phis;
  // Cell (a, k) = (theta a, phi k) owns roots [cell * period, (cell + 1) * period).
  std::vector<Complex> roots;
  std::vector<double> residuals;       // relative determinant residual per root
  std::vector<std::uint8_t> failed;    // per cell
  int n_theta = 0, n_phi = 0;

  std::size_t cells() const { return failed.size(); }
  double max_residual() const;
};

FloquetSpectrum floquet_spectrum(const Potential& v, double lambda, const RationalFrequency& f,
                                 int n_theta, int n_phi);

// Largest distance from a root of one cell to the nearest root of a grid
// neighbour; roots are continuous in (theta, phi) so this bounds how far the
// sampled cloud can be from the continuum it samples.
double neighbour_gap(const std::vector<Complex>& roots, int per_cell, int n_theta, int n_phi,
                     int theta_axes = 1);

struct ApproximantLevel {
  std::int64_t p = 0, q = 0;
  std::size_t cloud_size = 0;
  double to_reference = 0;    // sup over cloud of distance to reference
  double from_reference = 0;  // sup over reference of distance to cloud
  double hausdorff = 0;
  double max_residual = 0;
};

// Floquet clouds at successive convergents p_n/q_n (2 <= q_n <= 512, at most
// `levels` of them) with theta/phi grids of size max(8, 4 q_n), compared to a
// discretized reference set.
std::vector<ApproximantLevel> approximant_convergence(const Potential& v, double lambda,
                                                      const ContinuedFraction& cf, int levels,
                                                      const std::vector<Complex>& reference);

struct WeylReport {
  Complex z;
  double lambda = 0;
  std::vector<double> theta, alpha;
  std::vector<long> windows;          // ladder N = 1, 2, 4, ..., N_max
  std::vector<double> residuals;      // r_N on the ladder
  double min_residual = 0;            // over the ladder
  long argmin = 0;
  double min_residual_any = 0;        // over every N <= N_max
  double tail_exponent = 0;           // max over N_max/2 <= |n| <= N_max of |log|psi_n|| / |n|
  double check_residual = 0;          // direct matrix-vector residual at a check window
  long check_window = 0;
  bool orbit_hit = false;
};

WeylReport weyl_certify(const Potential& v, double lambda, Complex z,
                        const std::vector<double>& theta, const std::vector<double>& alpha,
                        long n_max);

// psi_n for n in [-n_max - 1, n_max + 1] as (log modulus, phase), index n + n_max + 1.
struct LogVector {
  long offset = 0;
  std::vector<double> log_abs, phase;
  Complex value(long n) const;  // may underflow/overflow
};
LogVector weyl_sequence(const Potential& v, double lambda, Complex z,
                        const std::vector<double>& theta, const std::vector<double>& alpha,
                        long n_max);

// Square band matrix stored by diagonals: entry (i, j) for |i - j| <= m.
class BandMatrix {
 public:
  BandMatrix(long size, int half_width);
  static BandMatrix from_dense(const ComplexMatrix& a, int half_width);

  long size() const { return size_; }
  int half_width() const { return m_; }
  Complex operator()(long i, long j) const;
  void set(long i, long j, Complex v);
  double max_abs() const;
  ComplexVector apply(const ComplexVector& x) const;

 private:
  long size_;
  int m_;
  ComplexMatrix bands_;  // row i, column (j - i + m)
};

// Dual operator minus z on sites first..last.
BandMatrix dual_band(const Potential& v, double lambda, Complex z, const std::vector<double>& theta,
                     const std::vector<double>& alpha, long first, long last);

struct WindowResult {
  long start = 0;
  long length = 0;
  ComplexVector window;  // psi restricted to [start, start + length), zero elsewhere
  double ratio = 0;      // ||T phi|| / ||phi||
  double constant = 0;   // C with C^2 = 4 m^3 M^2
  double epsilon = 0;    // ||T psi|| / ||psi||
  double bound = 0;      // C / sqrt(N) + epsilon
};

WindowResult window_extract(const BandMatrix& t, const ComplexVector& psi, long length);

struct DualityReport {
  std::vector<Complex> primal, dual;
  double hausdorff = 0;
  double primal_gap = 0, dual_gap = 0;
  double resolution_bound = 0;
};

DualityReport duality_check_periodic(const TrigPolynomial1D& v, double lambda, std::int64_t p,
                                     std::int64_t q, int n_theta, int n_phi);

}  // namespace atlas
