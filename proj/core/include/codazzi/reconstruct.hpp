#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "codazzi/fluid.hpp"
#include "codazzi/grid.hpp"
#include "codazzi/metric.hpp"

namespace codazzi {

using Vec3 = std::array<double, 3>;

struct HFields {
  Grid h11, h12, h22;
};

/// h_ij = √|g| γ (L̃, M̃, Ñ) on the strip.
HFields unscale_second_form(const Grid& Lt, const Grid& Mt, const Grid& Nt, const StripGrid& grid,
                            const Metric& metric);

struct Frame {
  Vec3 rx{};
  Vec3 ry{};
  Vec3 n{};
};

/// r_x = (√E, 0, 0), r_y = (F/√E, √(G - F²/E), 0), n = (0, 0, 1).
Frame base_frame(const MetricValues& v);

struct SurfacePatch {
  StripGrid grid;
  std::vector<Frame> frames;  ///< row-major, time-like first order
  std::vector<Vec3> r;        ///< empty until integrate_position
  std::size_t base_row = 0;
  std::size_t base_col = 0;
  double max_normal_drift = 0.0;    ///< largest | |n| - 1 | before renormalization
  double max_normal_tangent = 0.0;  ///< largest |n·r_x|, |n·r_y|
  Grid defect;                      ///< frame difference between the two orders; NaN off-lattice
  double max_defect = 0.0;
  std::size_t lattice = 0;  ///< defect lattice has (lattice+1)² points

  const Frame& frame(std::size_t i, std::size_t j) const { return frames[i * grid.cols + j]; }
  const Vec3& position(std::size_t i, std::size_t j) const { return r[i * grid.cols + j]; }
};

/// Gauss-Weingarten integration by RK4: along the time-like line through the base node, then
/// along every space-like line; the defect compares with the opposite order on a
/// (lattice+1)×(lattice+1) set of nodes at fixed fractions of the strip.
SurfacePatch integrate_frame(const Metric& metric, const StripGrid& grid, const HFields& h,
                             std::size_t base_row, std::size_t base_col,
                             std::optional<Frame> base = std::nullopt, std::size_t lattice = 8);

/// Trapezoid quadrature of the tangents along the same path order.
void integrate_position(SurfacePatch& patch, const Vec3& base_position = {0.0, 0.0, 0.0});

struct FirstFormError {
  double max = 0.0;
  double l2 = 0.0;              ///< root mean square
  double frame_gram_max = 0.0;  ///< max |r_x·r_x - E|/E from the frames
  Grid pointwise;               ///< per vertex, normalized by max(E, G)
};

/// |r_x·r_x - E| + 2|r_x·r_y - F| + |r_y·r_y - G| with r_x, r_y from centred differences of
/// the positions (one-sided 2nd order at the edges), normalized by max(E, G).
FirstFormError first_form_error(const SurfacePatch& patch, const Metric& metric);

/// Angle-defect Gauss curvature at interior vertices of the exported triangulation; NaN on the
/// boundary.
Grid angle_defect_curvature(const SurfacePatch& patch);

/// Wavefront OBJ: vertices row-major, per-vertex normals, quads split along (i,j)-(i+1,j+1).
void export_mesh(const SurfacePatch& patch, const std::string& path);
std::string mesh_to_obj(const SurfacePatch& patch);

/// Companion table: i,j,t,s,x,y,z,first_form_error,defect.
void export_vertex_table(const SurfacePatch& patch, const FirstFormError& err,
                         const std::string& path);

}  // namespace codazzi
