#include "codazzi/numerics.hpp"

#include <cmath>

#include "codazzi/error.hpp"

namespace codazzi {

double bump(double r) {
  const double r2 = r * r;
  if (r2 >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - r2));
}

double bump_derivative(double r) {
  const double r2 = r * r;
  if (r2 >= 1.0) return 0.0;
  const double d = 1.0 - r2;
  return -2.0 * r / (d * d) * std::exp(-1.0 / d);
}

namespace {

struct Stencil {
  long half;
  std::vector<double> w;   // index k + half
  double norm;
};

Stencil make_stencil(double radius_cells) {
  if (!(radius_cells > 0.0)) fail(ErrorKind::config, "mollifier radius must be positive");
  Stencil s;
  s.half = static_cast<long>(std::ceil(radius_cells));
  s.w.resize(2 * s.half + 1);
  s.norm = 0.0;
  for (long k = -s.half; k <= s.half; ++k) {
    const double v = bump(k / radius_cells);
    s.w[k + s.half] = v;
    s.norm += v;
  }
  if (!(s.norm > 0.0)) {
    // radius below one cell: identity
    s.half = 0;
    s.w.assign(1, 1.0);
    s.norm = 1.0;
  }
  return s;
}

}  // namespace

std::vector<double> periodic_mollify(const std::vector<double>& f, double radius_cells) {
  const std::size_t n = f.size();
  if (radius_cells * 2.0 > static_cast<double>(n))
    fail(ErrorKind::config, "mollifier wider than the period");
  const Stencil s = make_stencil(radius_cells);
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (long k = -s.half; k <= s.half; ++k)
      acc += s.w[k + s.half] * f[wrap_index(static_cast<long>(i) + k, n)];
    out[i] = acc / s.norm;
  }
  return out;
}

std::vector<double> periodic_mollify_derivative(const std::vector<double>& f, double radius_cells,
                                                double h) {
  const std::size_t n = f.size();
  const Stencil s = make_stencil(radius_cells);
  std::vector<double> out(n, 0.0);
  if (s.half == 0) return out;
  // d/dx Σ_j ω(x_i - x_j) f_j with j = i + k, so the kernel argument is -k.
  std::vector<double> dw(2 * s.half + 1);
  for (long k = -s.half; k <= s.half; ++k)
    dw[k + s.half] = bump_derivative(-k / radius_cells) / (radius_cells * h);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (long k = -s.half; k <= s.half; ++k)
      acc += dw[k + s.half] * f[wrap_index(static_cast<long>(i) + k, n)];
    out[i] = acc / s.norm;
  }
  return out;
}

double fd_first(const std::function<double(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2 * h)) / (12.0 * h);
}

double fd_second(const std::function<double(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2 * h)) /
         (12.0 * h * h);
}

double trapezoid(const std::vector<double>& f, double h) {
  if (f.size() < 2) return 0.0;
  double acc = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) acc += f[i];
  return acc * h;
}

}  // namespace codazzi
