#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace atlas {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

// Bad input: maps to exit status 1 at the command line.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Accuracy contract missed: exit status 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fractional part in [0, 1).
inline double wrap_unit(double t) {
  double f = t - std::floor(t);
  return f >= 1.0 ? 0.0 : f;
}

// e^{2 pi i t}, reduced mod 1 first so large arguments keep their accuracy.
inline Complex unit_phase(double t) {
  const double a = kTwoPi * wrap_unit(t);
  return {std::cos(a), std::sin(a)};
}

struct Box {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  bool contains(Complex z) const {
    return z.real() >= x0 && z.real() <= x1 && z.imag() >= y0 && z.imag() <= y1;
  }
};

// Parses "x0,y0,x1,y1"; throws UsageError on anything else.
Box parse_box(const std::string& text);
// Parses "x,y" into a complex number.
Complex parse_complex(const std::string& text);

// Worker count: SPECTRAL_ATLAS_THREADS if set, otherwise the hardware count.
int thread_count();
// Overrides the worker count for this process (0 restores the default).
void set_thread_count(int n);

// Runs fn(i) for i in [0, n) on static contiguous chunks. Each index is
// handled by exactly one worker, so results written per index do not depend
// on the thread count. The first exception (lowest chunk) is rethrown.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = n * w / workers;
    const std::size_t end = n * (w + 1) / workers;
    pool.emplace_back([&, w, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace atlas
