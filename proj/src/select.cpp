#include <cmath>

#include "lsbw/bandwidth.hpp"
#include "lsbw/errors.hpp"

namespace lsbw {

QProblem risk_problem(const SurfaceFunctionals& sf, double c, const KernelSpec& spec, std::size_t n) {
  if (n == 0) throw ArgumentError("sample size must be positive");
  const double d = static_cast<double>(sf.A.rows());
  QProblem p;
  p.M = spec.kappa() * spec.kappa() * sf.A;
  p.a = c * sf.b * std::pow(spec.l2_norm_sq(), d) / static_cast<double>(n);
  p.nu = spec.order();
  return p;
}

BandwidthVector optimal_from_functionals(const SurfaceFunctionals& sf, double c,
                                         const KernelSpec& spec, std::size_t n) {
  const Eigen::VectorXd u = q_minimize(risk_problem(sf, c, spec, n));
  std::vector<double> h(static_cast<std::size_t>(u.size()));
  for (Eigen::Index j = 0; j < u.size(); ++j) h[static_cast<std::size_t>(j)] = std::pow(u[j], 1.0 / spec.order());
  return BandwidthVector(std::move(h));
}

OptimalSelection select_optimal(const PointSet& sample, double c, const KernelSpec& spec,
                                const BoundaryOptions& opts) {
  Pilots pilots = pilot_bandwidths(sample, spec);
  SurfaceFunctionals sf = estimate_surface_functionals(sample, c, spec, pilots, opts);
  QProblem problem = risk_problem(sf, c, spec, sample.size());
  BandwidthVector h = optimal_from_functionals(sf, c, spec, sample.size());
  return {std::move(h), std::move(sf), std::move(pilots), std::move(problem)};
}

BandwidthVector select_optimal_exact(const MixtureModel& model, double c, const KernelSpec& spec,
                                     std::size_t n, const BoundaryOptions& opts) {
  const auto sf = exact_surface_functionals(model, c, spec.order(), opts);
  return optimal_from_functionals(sf, c, spec, n);
}

}  // namespace lsbw
