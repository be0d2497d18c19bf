#include <algorithm>
#include <cmath>

#include "lsbw/bandwidth.hpp"
#include "lsbw/errors.hpp"

namespace lsbw {
namespace {

// int_M f_(k*nu) f_(l*nu) / |grad f| and int_M 1 / |grad f| from callbacks
// evaluated once per boundary node.
template <class GradFn, class DerivFn>
SurfaceFunctionals integrate_functionals(const LevelSetBoundary& boundary, std::size_t d,
                                         GradFn&& gradient, DerivFn&& pure_derivative) {
  SurfaceFunctionals sf;
  const auto dd = static_cast<Eigen::Index>(d);
  sf.A = Eigen::MatrixXd::Zero(dd, dd);
  Eigen::VectorXd deriv(dd);
  for (const auto& node : boundary_nodes(boundary)) {
    const std::span<const double> x(node.x.data(), d);
    const double g = gradient(x);
    if (!(g > 0.0)) continue;  // critical point on the boundary; measure zero
    for (Eigen::Index k = 0; k < dd; ++k) deriv[k] = pure_derivative(x, static_cast<std::size_t>(k));
    sf.A += (node.weight / g) * deriv * deriv.transpose();
    sf.b += node.weight / g;
  }
  sf.boundary = boundary;
  return sf;
}

}  // namespace

LevelSetBoundary exact_boundary(const MixtureModel& model, double c, const BoundaryOptions& opts) {
  if (!(c > 0.0)) throw ArgumentError("level must be positive");
  if (model.dim() == 1) {
    const auto box = model.box(10.0).front();
    return extract_d1([&](double x) { return model.density(std::span<const double>(&x, 1)); }, c,
                      box.first, box.second, opts.scan_resolution);
  }
  if (model.dim() == 2) {
    GridSpec grid;
    grid.bounds = model.box(6.0);
    const std::size_t res = opts.grid_resolution ? opts.grid_resolution : 1024;
    grid.resolution = {res, res};
    GridField field{grid, std::vector<double>(grid.total())};
    for (std::size_t i = 0; i < field.values.size(); ++i) field.values[i] = model.density(field.node_point(i));
    return extract_d2(field, c);
  }
  throw ArgumentError("level set boundaries are supported for d = 1 and d = 2");
}

SurfaceFunctionals exact_surface_functionals(const MixtureModel& model, double c, int nu,
                                             const BoundaryOptions& opts) {
  const auto boundary = exact_boundary(model, c, opts);
  if (boundary.empty()) throw EmptyLevelSetError("the level set boundary {f = c} is empty");
  auto sf = integrate_functionals(
      boundary, model.dim(), [&](std::span<const double> x) { return model.gradient(x).norm(); },
      [&](std::span<const double> x, std::size_t k) { return model.pure_partial(x, k, nu); });
  sf.source = FunctionalSource::exact;
  return sf;
}

SurfaceFunctionals estimate_surface_functionals(const PointSet& sample, double c,
                                                const KernelSpec& spec, const Pilots& pilots,
                                                const BoundaryOptions& opts) {
  const std::size_t d = sample.dim();
  if (d != 1 && d != 2) throw ArgumentError("surface functionals are estimated for d = 1 and d = 2");
  if (!(c > 0.0)) throw ArgumentError("level must be positive");

  const Kde level_kde(sample, pilots.h0, spec);
  LevelSetBoundary boundary;
  if (d == 1) {
    const auto col = sample.column(0);
    const auto [mn, mx] = std::minmax_element(col.begin(), col.end());
    const double pad = 10.0 * pilots.h0[0];
    boundary = extract_d1([&](double x) { return level_kde.value(std::span<const double>(&x, 1)); },
                          c, *mn - pad, *mx + pad, opts.scan_resolution);
  } else {
    const std::size_t res = opts.grid_resolution ? opts.grid_resolution : 512;
    boundary = extract_d2(level_kde.grid(default_grid(sample, pilots.h0, opts.grid_margin, res)), c);
  }
  if (boundary.empty())
    throw EmptyLevelSetError("the estimated level set boundary is empty; no plug-in bandwidth");

  const Kde grad_kde(sample, pilots.h1, spec);
  const Kde deriv_kde(sample, pilots.h2, spec);
  const int nu = spec.order();
  std::vector<int> index;
  auto sf = integrate_functionals(
      boundary, d,
      [&](std::span<const double> x) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          const int idx = static_cast<int>(j);
          const double g = grad_kde.partial(x, std::span<const int>(&idx, 1));
          s += g * g;
        }
        return std::sqrt(s);
      },
      [&](std::span<const double> x, std::size_t k) {
        index.assign(static_cast<std::size_t>(nu), static_cast<int>(k));
        return deriv_kde.partial(x, index);
      });
  sf.source = FunctionalSource::plugin;
  return sf;
}

}  // namespace lsbw
