#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace codazzi {

/// Row-major field: rows along the time-like coordinate, columns along the space-like one.
struct Grid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Grid() = default;
  Grid(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  std::size_t size() const { return data.size(); }
};

enum class Orientation { x_time_like, y_time_like };

std::string_view to_string(Orientation o);

/// Uniform strip: t_i = t0 + i·dt for i < rows, s_j = s0 + j·ds for j < cols (periodic in s).
struct StripGrid {
  Orientation orientation = Orientation::x_time_like;
  double t0 = 0.0;
  double dt = 0.0;
  std::size_t rows = 0;
  double s0 = 0.0;
  double ds = 0.0;
  std::size_t cols = 0;

  double t(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
  double s(std::size_t j) const { return s0 + ds * static_cast<double>(j); }
  double period() const { return ds * static_cast<double>(cols); }
  double x(std::size_t i, std::size_t j) const {
    return orientation == Orientation::x_time_like ? t(i) : s(j);
  }
  double y(std::size_t i, std::size_t j) const {
    return orientation == Orientation::x_time_like ? s(j) : t(i);
  }
};

}  // namespace codazzi
