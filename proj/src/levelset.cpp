#include "lsbw/levelset.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>

#include "lsbw/errors.hpp"

namespace lsbw {

std::size_t LevelSetBoundary::segment_count() const {
  std::size_t n = 0;
  for (const auto& p : polylines)
    if (p.vertices.size() > 1) n += p.vertices.size() - 1;
  return n;
}

// d = 1 ------------------------------------------------------------------

LevelSetBoundary extract_d1(const std::function<double(double)>& fn, double c, double lo,
                            double hi, std::size_t scan_resolution) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw ArgumentError("search interval must be finite with lo < hi");
  if (scan_resolution < 2) throw ArgumentError("scan resolution must be at least 2");

  LevelSetBoundary out;
  out.dim = 1;
  out.level = c;
  const double step = (hi - lo) / static_cast<double>(scan_resolution);
  double x_prev = lo;
  bool in_prev = fn(lo) - c >= 0.0;
  for (std::size_t k = 1; k <= scan_resolution; ++k) {
    const double x = k == scan_resolution ? hi : lo + static_cast<double>(k) * step;
    const bool in = fn(x) - c >= 0.0;
    if (in != in_prev) {
      // a stays on the outside, b on the inside.
      double a = in ? x_prev : x;
      double b = in ? x : x_prev;
      double best = 0.5 * (a + b);
      double best_gap = std::abs(fn(best) - c);
      for (int it = 0; it < 200 && best_gap > 1e-10; ++it) {
        const double m = 0.5 * (a + b);
        if (m == a || m == b) break;
        const double g = fn(m) - c;
        if (std::abs(g) < best_gap) {
          best = m;
          best_gap = std::abs(g);
        }
        (g >= 0.0 ? b : a) = m;
      }
      out.crossings.push_back({best, in ? Direction::up : Direction::down});
    }
    x_prev = x;
    in_prev = in;
  }
  return out;
}

// d = 2 ------------------------------------------------------------------

namespace {

constexpr std::int64_t kNone = -1;

struct Segment {
  std::int64_t a;
  std::int64_t b;
};

}  // namespace

LevelSetBoundary extract_d2(const GridField& field, double c) {
  const auto& g = field.grid;
  if (g.dim() != 2) throw ArgumentError("extract_d2 needs a 2-d field");
  g.validate();
  const std::size_t nx = g.resolution[0];
  const std::size_t ny = g.resolution[1];
  const auto& v = field.values;
  for (double x : v)
    if (!std::isfinite(x)) throw ArgumentError("field contains non-finite values");

  // Edge keys: 2*node for the edge towards +x, 2*node+1 for the edge towards +y.
  auto node = [ny](std::size_t i, std::size_t j) { return static_cast<std::int64_t>(i * ny + j); };
  auto inside = [&](std::size_t i, std::size_t j) { return v[i * ny + j] >= c; };
  auto edge_point = [&](std::int64_t key) -> std::array<double, 2> {
    const auto n0 = static_cast<std::size_t>(key / 2);
    const std::size_t i = n0 / ny;
    const std::size_t j = n0 % ny;
    const bool along_x = key % 2 == 0;
    const std::size_t i1 = along_x ? i + 1 : i;
    const std::size_t j1 = along_x ? j : j + 1;
    const double va = v[i * ny + j];
    const double vb = v[i1 * ny + j1];
    const double t = va == vb ? 0.5 : (c - va) / (vb - va);
    const double xa = g.node(0, i), ya = g.node(1, j);
    const double xb = g.node(0, i1), yb = g.node(1, j1);
    return {xa + t * (xb - xa), ya + t * (yb - ya)};
  };

  std::vector<Segment> segments;
  for (std::size_t i = 0; i + 1 < nx; ++i) {
    for (std::size_t j = 0; j + 1 < ny; ++j) {
      const int cas = (inside(i, j) ? 1 : 0) | (inside(i + 1, j) ? 2 : 0) |
                      (inside(i + 1, j + 1) ? 4 : 0) | (inside(i, j + 1) ? 8 : 0);
      if (cas == 0 || cas == 15) continue;
      const std::int64_t e0 = 2 * node(i, j);          // bottom
      const std::int64_t e1 = 2 * node(i + 1, j) + 1;  // right
      const std::int64_t e2 = 2 * node(i, j + 1);      // top
      const std::int64_t e3 = 2 * node(i, j) + 1;      // left
      if (cas == 5 || cas == 10) {
        const double center =
            0.25 * (v[i * ny + j] + v[(i + 1) * ny + j] + v[(i + 1) * ny + j + 1] + v[i * ny + j + 1]);
        const bool center_in = center >= c;
        // Cut off the two corners that are not connected through the center.
        const bool cut_odd = (cas == 5) == center_in;  // corners 1 and 3
        if (cut_odd) {
          segments.push_back({e0, e1});
          segments.push_back({e2, e3});
        } else {
          segments.push_back({e3, e0});
          segments.push_back({e1, e2});
        }
        continue;
      }
      std::int64_t ends[2];
      int k = 0;
      const bool b0 = cas & 1, b1 = cas & 2, b2 = cas & 4, b3 = cas & 8;
      if (b0 != b1) ends[k++] = e0;
      if (b1 != b2) ends[k++] = e1;
      if (b3 != b2) ends[k++] = e2;
      if (b0 != b3) ends[k++] = e3;
      segments.push_back({ends[0], ends[1]});
    }
  }

  LevelSetBoundary out;
  out.dim = 2;
  out.level = c;
  if (segments.empty()) return out;

  // Each crossing point belongs to at most two segments (one per cell).
  std::vector<std::array<std::int64_t, 2>> links(2 * nx * ny, {kNone, kNone});
  auto attach = [&](std::int64_t key, std::int64_t seg) {
    auto& slot = links[static_cast<std::size_t>(key)];
    (slot[0] == kNone ? slot[0] : slot[1]) = seg;
  };
  for (std::size_t s = 0; s < segments.size(); ++s) {
    attach(segments[s].a, static_cast<std::int64_t>(s));
    attach(segments[s].b, static_cast<std::int64_t>(s));
  }

  std::vector<char> used(segments.size(), 0);
  auto walk = [&](std::int64_t start_key, std::int64_t seg, Polyline& line) {
    std::int64_t key = start_key;
    line.vertices.push_back(edge_point(key));
    while (seg != kNone && !used[static_cast<std::size_t>(seg)]) {
      used[static_cast<std::size_t>(seg)] = 1;
      const auto& s = segments[static_cast<std::size_t>(seg)];
      key = s.a == key ? s.b : s.a;
      line.vertices.push_back(edge_point(key));
      const auto& slot = links[static_cast<std::size_t>(key)];
      seg = slot[0] == seg ? slot[1] : slot[0];
    }
    return key;
  };

  // Open chains start at crossing points that have a single segment.
  for (std::size_t s = 0; s < segments.size(); ++s) {
    if (used[s]) continue;
    for (std::int64_t key : {segments[s].a, segments[s].b}) {
      if (links[static_cast<std::size_t>(key)][1] != kNone) continue;
      Polyline line;
      walk(key, static_cast<std::int64_t>(s), line);
      out.polylines.push_back(std::move(line));
      break;
    }
  }
  for (std::size_t s = 0; s < segments.size(); ++s) {
    if (used[s]) continue;
    Polyline line;
    const std::int64_t end = walk(segments[s].a, static_cast<std::int64_t>(s), line);
    line.closed = end == segments[s].a;
    out.polylines.push_back(std::move(line));
  }
  return out;
}

// Integrals --------------------------------------------------------------

std::vector<BoundaryNode> boundary_nodes(const LevelSetBoundary& boundary) {
  std::vector<BoundaryNode> nodes;
  if (boundary.dim == 1) {
    for (const auto& cr : boundary.crossings) nodes.push_back({{cr.x, 0.0}, 1.0});
    return nodes;
  }
  for (const auto& line : boundary.polylines) {
    for (std::size_t k = 0; k + 1 < line.vertices.size(); ++k) {
      const auto& p = line.vertices[k];
      const auto& q = line.vertices[k + 1];
      const double len = std::hypot(q[0] - p[0], q[1] - p[1]);
      if (len == 0.0) continue;
      nodes.push_back({{0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])}, len});
    }
  }
  return nodes;
}

SurfaceIntegral surface_integral(const LevelSetBoundary& boundary, const PointWeight& w) {
  SurfaceIntegral r;
  if (boundary.empty()) {
    r.empty_boundary = true;
    return r;
  }
  for (const auto& node : boundary_nodes(boundary))
    r.value += w(std::span<const double>(node.x.data(), boundary.dim)) * node.weight;
  return r;
}

void write_polylines_csv(const LevelSetBoundary& boundary, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  out << "polyline_id,vertex_x,vertex_y\n";
  for (std::size_t id = 0; id < boundary.polylines.size(); ++id)
    for (const auto& p : boundary.polylines[id].vertices) out << id << ',' << p[0] << ',' << p[1] << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace lsbw
