#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace codazzi {

/// Standard bump exp(-1/(1-r²)) on |r| < 1, zero outside; not normalized.
double bump(double r);
double bump_derivative(double r);

/// Discrete periodic convolution with the bump of support radius `radius_cells` (in grid
/// cells), weights normalized to sum to one. Preserves constants and the discrete mean.
std::vector<double> periodic_mollify(const std::vector<double>& f, double radius_cells);
/// Derivative of the same convolution with respect to the grid coordinate, for spacing h.
std::vector<double> periodic_mollify_derivative(const std::vector<double>& f, double radius_cells,
                                                double h);

inline std::size_t wrap_index(long i, std::size_t n) {
  const long m = static_cast<long>(n);
  long r = i % m;
  if (r < 0) r += m;
  return static_cast<std::size_t>(r);
}

/// 4th-order centered first and second differences of a scalar function.
double fd_first(const std::function<double(double)>& f, double x, double h);
double fd_second(const std::function<double(double)>& f, double x, double h);

/// Uniform-grid trapezoid of samples (non-periodic).
double trapezoid(const std::vector<double>& f, double h);

}  // namespace codazzi
