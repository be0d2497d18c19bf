#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "lsbw/kde.hpp"

namespace lsbw {

enum class Direction { up, down };

//! A root of fn - c on the line; `up` means fn - c goes from negative to
//! nonnegative when moving right.
struct Crossing {
  double x = 0.0;
  Direction direction = Direction::up;
};

struct Polyline {
  std::vector<std::array<double, 2>> vertices;
  bool closed = false;
};

//! {f = c} in d = 1 (crossings) or d = 2 (polylines). May be empty.
struct LevelSetBoundary {
  std::size_t dim = 1;
  double level = 0.0;
  std::vector<Crossing> crossings;
  std::vector<Polyline> polylines;

  bool empty() const { return crossings.empty() && polylines.empty(); }
  std::size_t segment_count() const;
};

//! {field >= level} as a node predicate on the lattice.
struct RegionIndicator {
  const GridField* field = nullptr;
  double level = 0.0;
  bool contains(std::size_t flat) const { return field->values[flat] >= level; }
};

//! Scans [lo, hi] at `scan_resolution` intervals for sign changes of fn - c
//! and bisects every bracket until |fn - c| <= 1e-10 (or the bracket stops
//! shrinking).
LevelSetBoundary extract_d1(const std::function<double(double)>& fn, double c, double lo,
                            double hi, std::size_t scan_resolution = 8192);

//! Marching squares with linear edge interpolation. Ambiguous cells are
//! split according to the mean of their four corners. Chains that leave the
//! lattice are returned open.
LevelSetBoundary extract_d2(const GridField& field, double c);

//! Quadrature nodes of the boundary measure: the crossings with weight 1
//! (d = 1) or the segment midpoints weighted by segment length (d = 2).
struct BoundaryNode {
  std::array<double, 2> x{};
  double weight = 0.0;
};
std::vector<BoundaryNode> boundary_nodes(const LevelSetBoundary& boundary);

struct SurfaceIntegral {
  double value = 0.0;
  bool empty_boundary = false;
};

using PointWeight = std::function<double(std::span<const double>)>;

//! d = 1: sum of w over the crossings. d = 2: sum over segments of
//! w(midpoint) * length.
SurfaceIntegral surface_integral(const LevelSetBoundary& boundary, const PointWeight& w);

//! CSV with columns polyline_id,vertex_x,vertex_y.
void write_polylines_csv(const LevelSetBoundary& boundary, const std::filesystem::path& path);

}  // namespace lsbw
