#include "codazzi/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "codazzi/error.hpp"
#include "codazzi/solver.hpp"
#include "codazzi/table_io.hpp"

namespace codazzi {

namespace {

Vec3 add(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 scale(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

using Mat3 = std::array<double, 9>;

/// Row-major 3×3 acting on the stacked frame (r_x, r_y, n) along coordinate direction `dir`
/// (0 = x, 1 = y).
Mat3 frame_matrix(const MetricValues& v, double h11, double h12, double h22, int dir) {
  const Symbols s = christoffel(v).plain;
  const double D = v.det();
  const double g11 = v.G / D, g12 = -v.F / D, g22 = v.E / D;
  double a1, a2, k1_1, k2_1, k1_2, k2_2;
  if (dir == 0) {
    a1 = h11;
    a2 = h12;
    k1_1 = s.s111;
    k2_1 = s.s211;
    k1_2 = s.s112;
    k2_2 = s.s212;
  } else {
    a1 = h12;
    a2 = h22;
    k1_1 = s.s112;
    k2_1 = s.s212;
    k1_2 = s.s122;
    k2_2 = s.s222;
  }
  return {k1_1, k2_1, a1,  //
          k1_2, k2_2, a2,  //
          -(a1 * g11 + a2 * g12), -(a1 * g12 + a2 * g22), 0.0};
}

Frame act(const Mat3& m, const Frame& f) {
  Frame o;
  for (int c = 0; c < 3; ++c) {
    o.rx[c] = m[0] * f.rx[c] + m[1] * f.ry[c] + m[2] * f.n[c];
    o.ry[c] = m[3] * f.rx[c] + m[4] * f.ry[c] + m[5] * f.n[c];
    o.n[c] = m[6] * f.rx[c] + m[7] * f.ry[c] + m[8] * f.n[c];
  }
  return o;
}

Frame axpy(const Frame& f, double h, const Frame& k) {
  return {add(f.rx, scale(k.rx, h)), add(f.ry, scale(k.ry, h)), add(f.n, scale(k.n, h))};
}

class Integrator {
 public:
  Integrator(const Metric& metric, const StripGrid& grid, const HFields& h)
      : metric_(metric), grid_(grid), h_(h) {}

  /// One RK4 step between neighbouring nodes (i0,j0) → (i1,j1).
  Frame step(const Frame& f, std::size_t i0, std::size_t j0, std::size_t i1, std::size_t j1,
             double& drift) const {
    const bool along_t = j0 == j1;
    const int dir = along_t == (grid_.orientation == Orientation::x_time_like) ? 0 : 1;
    const double x0 = grid_.x(i0, j0), y0 = grid_.y(i0, j0);
    const double x1 = grid_.x(i1, j1), y1 = grid_.y(i1, j1);
    const double hstep = dir == 0 ? x1 - x0 : y1 - y0;
    const Mat3 m0 = frame_matrix(metric_.values(x0, y0), h_.h11(i0, j0), h_.h12(i0, j0),
                                 h_.h22(i0, j0), dir);
    const Mat3 m1 = frame_matrix(metric_.values(x1, y1), h_.h11(i1, j1), h_.h12(i1, j1),
                                 h_.h22(i1, j1), dir);
    const Mat3 mm = frame_matrix(metric_.values(0.5 * (x0 + x1), 0.5 * (y0 + y1)),
                                 0.5 * (h_.h11(i0, j0) + h_.h11(i1, j1)),
                                 0.5 * (h_.h12(i0, j0) + h_.h12(i1, j1)),
                                 0.5 * (h_.h22(i0, j0) + h_.h22(i1, j1)), dir);
    const Frame k1 = act(m0, f);
    const Frame k2 = act(mm, axpy(f, 0.5 * hstep, k1));
    const Frame k3 = act(mm, axpy(f, 0.5 * hstep, k2));
    const Frame k4 = act(m1, axpy(f, hstep, k3));
    Frame out;
    for (int c = 0; c < 3; ++c) {
      out.rx[c] = f.rx[c] + hstep / 6.0 * (k1.rx[c] + 2 * k2.rx[c] + 2 * k3.rx[c] + k4.rx[c]);
      out.ry[c] = f.ry[c] + hstep / 6.0 * (k1.ry[c] + 2 * k2.ry[c] + 2 * k3.ry[c] + k4.ry[c]);
      out.n[c] = f.n[c] + hstep / 6.0 * (k1.n[c] + 2 * k2.n[c] + 2 * k3.n[c] + k4.n[c]);
    }
    const double len = norm(out.n);
    drift = std::max(drift, std::abs(len - 1.0));
    out.n = scale(out.n, 1.0 / len);
    if (norm(cross(out.rx, out.ry)) < 1e-10) fail(ErrorKind::degenerate, "frame degenerated");
    return out;
  }

 private:
  const Metric& metric_;
  const StripGrid& grid_;
  const HFields& h_;
};

}  // namespace

HFields unscale_second_form(const Grid& Lt, const Grid& Mt, const Grid& Nt, const StripGrid& grid,
                            const Metric& metric) {
  const StripMetricFields f = strip_metric_fields(metric, grid);
  HFields h{Grid(grid.rows, grid.cols), Grid(grid.rows, grid.cols), Grid(grid.rows, grid.cols)};
  for (std::size_t k = 0; k < Lt.size(); ++k) {
    const double c = f.sqrt_det.data[k] * f.gamma.data[k];
    h.h11.data[k] = c * Lt.data[k];
    h.h12.data[k] = c * Mt.data[k];
    h.h22.data[k] = c * Nt.data[k];
  }
  return h;
}

Frame base_frame(const MetricValues& v) {
  if (!(v.E > 0.0) || !(v.det() > 0.0)) fail(ErrorKind::degenerate, "base metric degenerate");
  const double se = std::sqrt(v.E);
  return {{se, 0.0, 0.0}, {v.F / se, std::sqrt(v.G - v.F * v.F / v.E), 0.0}, {0.0, 0.0, 1.0}};
}

SurfacePatch integrate_frame(const Metric& metric, const StripGrid& grid, const HFields& h,
                             std::size_t base_row, std::size_t base_col, std::optional<Frame> base,
                             std::size_t lattice) {
  if (base_row >= grid.rows || base_col >= grid.cols)
    fail(ErrorKind::config, "base point outside the grid");
  if (h.h11.rows != grid.rows || h.h11.cols != grid.cols)
    fail(ErrorKind::config, "h fields do not match the grid");
  const MetricValues v0 = metric.values(grid.x(base_row, base_col), grid.y(base_row, base_col));
  const Frame f0 = base ? *base : base_frame(v0);
  {
    const double e = std::abs(dot(f0.rx, f0.rx) - v0.E) + std::abs(dot(f0.rx, f0.ry) - v0.F) +
                     std::abs(dot(f0.ry, f0.ry) - v0.G);
    if (e > 1e-10 * std::max(v0.E, v0.G) || std::abs(norm(f0.n) - 1.0) > 1e-12 ||
        std::abs(dot(f0.n, f0.rx)) > 1e-10 || std::abs(dot(f0.n, f0.ry)) > 1e-10)
      fail(ErrorKind::config, "base frame does not match the first fundamental form");
  }

  SurfacePatch p;
  p.grid = grid;
  p.base_row = base_row;
  p.base_col = base_col;
  p.frames.assign(grid.rows * grid.cols, Frame{});
  auto at = [&](std::size_t i, std::size_t j) -> Frame& { return p.frames[i * grid.cols + j]; };
  const Integrator integ(metric, grid, h);
  double drift = 0.0;

  // time-like line through the base node, then each space-like line
  at(base_row, base_col) = f0;
  for (std::size_t i = base_row; i + 1 < grid.rows; ++i)
    at(i + 1, base_col) = integ.step(at(i, base_col), i, base_col, i + 1, base_col, drift);
  for (std::size_t i = base_row; i > 0; --i)
    at(i - 1, base_col) = integ.step(at(i, base_col), i, base_col, i - 1, base_col, drift);
  for (std::size_t i = 0; i < grid.rows; ++i) {
    for (std::size_t j = base_col; j + 1 < grid.cols; ++j)
      at(i, j + 1) = integ.step(at(i, j), i, j, i, j + 1, drift);
    for (std::size_t j = base_col; j > 0; --j)
      at(i, j - 1) = integ.step(at(i, j), i, j, i, j - 1, drift);
  }
  p.max_normal_drift = drift;
  for (const Frame& f : p.frames)
    p.max_normal_tangent =
        std::max({p.max_normal_tangent, std::abs(dot(f.n, f.rx)), std::abs(dot(f.n, f.ry))});

  // opposite order on the lattice columns
  p.lattice = lattice;
  p.defect = Grid(grid.rows, grid.cols, std::numeric_limits<double>::quiet_NaN());
  if (lattice > 0) {
    std::vector<std::size_t> li, lj;
    for (std::size_t k = 0; k <= lattice; ++k) {
      li.push_back(static_cast<std::size_t>(
          std::lround(static_cast<double>(k) * static_cast<double>(grid.rows - 1) / lattice)));
      lj.push_back(static_cast<std::size_t>(
          std::lround(static_cast<double>(k) * static_cast<double>(grid.cols - 1) / lattice)));
    }
    std::vector<Frame> row(grid.cols);
    double d2 = 0.0;
    row[base_col] = f0;
    for (std::size_t j = base_col; j + 1 < grid.cols; ++j)
      row[j + 1] = integ.step(row[j], base_row, j, base_row, j + 1, d2);
    for (std::size_t j = base_col; j > 0; --j)
      row[j - 1] = integ.step(row[j], base_row, j, base_row, j - 1, d2);
    for (std::size_t j : lj) {
      std::vector<Frame> col(grid.rows);
      col[base_row] = row[j];
      for (std::size_t i = base_row; i + 1 < grid.rows; ++i)
        col[i + 1] = integ.step(col[i], i, j, i + 1, j, d2);
      for (std::size_t i = base_row; i > 0; --i) col[i - 1] = integ.step(col[i], i, j, i - 1, j, d2);
      for (std::size_t i : li) {
        const Frame& a = at(i, j);
        const Frame& b = col[i];
        const double d =
            std::max({norm(sub(a.rx, b.rx)), norm(sub(a.ry, b.ry)), norm(sub(a.n, b.n))});
        p.defect(i, j) = d;
        p.max_defect = std::max(p.max_defect, d);
      }
    }
  }
  return p;
}

void integrate_position(SurfacePatch& p, const Vec3& base_position) {
  const StripGrid& g = p.grid;
  if (p.frames.size() != g.rows * g.cols) fail(ErrorKind::config, "frames not filled");
  const bool xt = g.orientation == Orientation::x_time_like;
  auto tangent_t = [&](std::size_t i, std::size_t j) {
    const Frame& f = p.frames[i * g.cols + j];
    return xt ? f.rx : f.ry;
  };
  auto tangent_s = [&](std::size_t i, std::size_t j) {
    const Frame& f = p.frames[i * g.cols + j];
    return xt ? f.ry : f.rx;
  };
  p.r.assign(g.rows * g.cols, Vec3{});
  auto at = [&](std::size_t i, std::size_t j) -> Vec3& { return p.r[i * g.cols + j]; };
  const std::size_t i0 = p.base_row, j0 = p.base_col;
  at(i0, j0) = base_position;
  for (std::size_t i = i0; i + 1 < g.rows; ++i)
    at(i + 1, j0) = add(at(i, j0), scale(add(tangent_t(i, j0), tangent_t(i + 1, j0)),
                                         0.5 * (g.t(i + 1) - g.t(i))));
  for (std::size_t i = i0; i > 0; --i)
    at(i - 1, j0) = add(at(i, j0), scale(add(tangent_t(i, j0), tangent_t(i - 1, j0)),
                                         0.5 * (g.t(i - 1) - g.t(i))));
  for (std::size_t i = 0; i < g.rows; ++i) {
    for (std::size_t j = j0; j + 1 < g.cols; ++j)
      at(i, j + 1) = add(at(i, j), scale(add(tangent_s(i, j), tangent_s(i, j + 1)), 0.5 * g.ds));
    for (std::size_t j = j0; j > 0; --j)
      at(i, j - 1) = add(at(i, j), scale(add(tangent_s(i, j), tangent_s(i, j - 1)), -0.5 * g.ds));
  }
}

namespace {

/// Derivative of positions along rows (dim 0) or columns (dim 1).
Vec3 position_derivative(const SurfacePatch& p, std::size_t i, std::size_t j, int dim) {
  const StripGrid& g = p.grid;
  const std::size_t n = dim == 0 ? g.rows : g.cols;
  const std::size_t k = dim == 0 ? i : j;
  const double h = dim == 0 ? g.dt : g.ds;
  auto r = [&](std::size_t m) { return dim == 0 ? p.position(m, j) : p.position(i, m); };
  if (n < 3) {
    if (n < 2) return {0, 0, 0};
    return scale(sub(r(1), r(0)), 1.0 / h);
  }
  if (k == 0) return scale(add(sub(scale(r(1), 4.0), scale(r(0), 3.0)), scale(r(2), -1.0)), 0.5 / h);
  if (k == n - 1)
    return scale(add(sub(scale(r(n - 1), 3.0), scale(r(n - 2), 4.0)), r(n - 3)), 0.5 / h);
  return scale(sub(r(k + 1), r(k - 1)), 0.5 / h);
}

}  // namespace

FirstFormError first_form_error(const SurfacePatch& p, const Metric& metric) {
  const StripGrid& g = p.grid;
  if (p.r.size() != g.rows * g.cols) fail(ErrorKind::config, "positions not filled");
  const bool xt = g.orientation == Orientation::x_time_like;
  FirstFormError e;
  e.pointwise = Grid(g.rows, g.cols);
  double sumsq = 0.0;
  for (std::size_t i = 0; i < g.rows; ++i) {
    for (std::size_t j = 0; j < g.cols; ++j) {
      const Vec3 dt = position_derivative(p, i, j, 0);
      const Vec3 ds = position_derivative(p, i, j, 1);
      const Vec3& rx = xt ? dt : ds;
      const Vec3& ry = xt ? ds : dt;
      const MetricValues v = metric.values(g.x(i, j), g.y(i, j));
      const double err = (std::abs(dot(rx, rx) - v.E) + 2.0 * std::abs(dot(rx, ry) - v.F) +
                          std::abs(dot(ry, ry) - v.G)) /
                         std::max(v.E, v.G);
      e.pointwise(i, j) = err;
      e.max = std::max(e.max, err);
      sumsq += err * err;
      const Frame& f = p.frame(i, j);
      e.frame_gram_max = std::max(e.frame_gram_max, std::abs(dot(f.rx, f.rx) - v.E) / v.E);
    }
  }
  e.l2 = std::sqrt(sumsq / static_cast<double>(g.rows * g.cols));
  return e;
}

Grid angle_defect_curvature(const SurfacePatch& p) {
  const StripGrid& g = p.grid;
  if (p.r.size() != g.rows * g.cols) fail(ErrorKind::config, "positions not filled");
  Grid K(g.rows, g.cols, std::numeric_limits<double>::quiet_NaN());
  auto angle = [](const Vec3& o, const Vec3& a, const Vec3& b) {
    const Vec3 u = sub(a, o), w = sub(b, o);
    return std::atan2(norm(cross(u, w)), dot(u, w));
  };
  auto area = [](const Vec3& a, const Vec3& b, const Vec3& c) {
    return 0.5 * norm(cross(sub(b, a), sub(c, a)));
  };
  for (std::size_t i = 1; i + 1 < g.rows; ++i) {
    for (std::size_t j = 1; j + 1 < g.cols; ++j) {
      const Vec3& v = p.position(i, j);
      // one-ring of the (i,j)-(i+1,j+1) split, counter-clockwise in (i, j)
      const Vec3 ring[6] = {p.position(i, j + 1),     p.position(i + 1, j + 1),
                            p.position(i + 1, j),     p.position(i, j - 1),
                            p.position(i - 1, j - 1), p.position(i - 1, j)};
      double sum = 0.0, a = 0.0;
      for (int k = 0; k < 6; ++k) {
        const Vec3& b = ring[k];
        const Vec3& c = ring[(k + 1) % 6];
        sum += angle(v, b, c);
        a += area(v, b, c);
      }
      K(i, j) = (2.0 * std::numbers::pi - sum) / (a / 3.0);
    }
  }
  return K;
}

std::string mesh_to_obj(const SurfacePatch& p) {
  const StripGrid& g = p.grid;
  if (p.r.size() != g.rows * g.cols) fail(ErrorKind::config, "positions not filled");
  for (const Vec3& r : p.r)
    for (double c : r)
      if (!std::isfinite(c)) fail(ErrorKind::numerical, "mesh has a non-finite position");
  for (const Frame& f : p.frames)
    for (double c : f.n)
      if (!std::isfinite(c)) fail(ErrorKind::numerical, "mesh has a non-finite normal");
  std::string out;
  out.reserve(g.rows * g.cols * 120);
  out += "# surface patch " + std::to_string(g.rows) + " x " + std::to_string(g.cols) + "\n";
  for (const Vec3& r : p.r)
    out += "v " + format_double(r[0]) + " " + format_double(r[1]) + " " + format_double(r[2]) + "\n";
  for (const Frame& f : p.frames)
    out += "vn " + format_double(f.n[0]) + " " + format_double(f.n[1]) + " " +
           format_double(f.n[2]) + "\n";
  auto idx = [&](std::size_t i, std::size_t j) { return std::to_string(i * g.cols + j + 1); };
  auto vert = [&](std::size_t i, std::size_t j) {
    const std::string k = idx(i, j);
    return k + "//" + k;
  };
  for (std::size_t i = 0; i + 1 < g.rows; ++i) {
    for (std::size_t j = 0; j + 1 < g.cols; ++j) {
      out += "f " + vert(i, j) + " " + vert(i, j + 1) + " " + vert(i + 1, j + 1) + "\n";
      out += "f " + vert(i, j) + " " + vert(i + 1, j + 1) + " " + vert(i + 1, j) + "\n";
    }
  }
  return out;
}

void export_mesh(const SurfacePatch& p, const std::string& path) {
  write_file_atomic(path, mesh_to_obj(p));
}

void export_vertex_table(const SurfacePatch& p, const FirstFormError& err, const std::string& path) {
  const StripGrid& g = p.grid;
  Table t;
  t.header = {"i", "j", "t", "s", "x", "y", "z", "first_form_error", "defect"};
  for (std::size_t i = 0; i < g.rows; ++i)
    for (std::size_t j = 0; j < g.cols; ++j) {
      const Vec3& r = p.position(i, j);
      t.rows.push_back({static_cast<double>(i), static_cast<double>(j), g.t(i), g.s(j), r[0], r[1],
                        r[2], err.pointwise(i, j), p.defect(i, j)});
    }
  write_file_atomic(path, table_to_csv(t));
}

}  // namespace codazzi
