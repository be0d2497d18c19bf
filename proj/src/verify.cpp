#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lsbw/errors.hpp"
#include "lsbw/risk.hpp"
#include "lsbw/rng.hpp"

namespace lsbw {
namespace {

KernelSpec effective_kernel(const KernelSpec& spec, const VerifyOptions& opts) {
  return std::isfinite(opts.truncation) ? spec.with_truncation(opts.truncation) : spec;
}

void check_sample_args(const MixtureModel& model, std::size_t n, const BandwidthVector& h) {
  if (n < 2) throw ArgumentError("sample size must be at least 2");
  if (h.dim() != model.dim()) throw ArgumentError("bandwidth and model dimensions differ");
}

}  // namespace

Theorem1Check theorem1_ratio(const MixtureModel& model, double c, const WeightFunction& g,
                             const Estimator& estimate, const LevelSetBoundary& true_boundary,
                             const SymDiffOptions& opts) {
  Theorem1Check r;
  r.lhs = sym_diff_error(model, c, estimate, g, opts).value;
  const double p = g.p();
  for (const auto& node : boundary_nodes(true_boundary)) {
    const std::span<const double> x(node.x.data(), model.dim());
    const double grad = model.gradient(x).norm();
    if (!(grad > 0.0)) continue;
    const double diff = std::abs(estimate.value(x) - model.density(x));
    r.rhs += node.weight * g.boundary_factor(x) / std::pow(grad, p + 1.0) * std::pow(diff, p + 1.0);
  }
  r.rhs /= 1.0 + p;
  if (r.lhs < 1e-300 && r.rhs < 1e-300) {
    r.degenerate = true;
    r.ratio = 1.0;
  } else {
    r.ratio = r.lhs / r.rhs;
  }
  return r;
}

Theorem1Check verify_theorem1_ratio(const MixtureModel& model, double c, const WeightFunction& g,
                                    std::size_t n, const BandwidthVector& h, std::uint64_t seed,
                                    const KernelSpec& spec, const VerifyOptions& opts) {
  check_sample_args(model, n, h);
  const auto boundary = exact_boundary(model, c, opts.boundary);
  if (boundary.empty()) throw EmptyLevelSetError("the level set boundary {f = c} is empty");
  const Kde kde(model.sample(n, seed), h, effective_kernel(spec, opts));
  auto r = theorem1_ratio(model, c, g, KdeEstimator(kde), boundary, opts.sym_diff);
  const double nn = static_cast<double>(n);
  r.scaling_warning = nn * h.product() / std::log(nn) < 10.0;
  return r;
}

Corollary1Check verify_corollary1(const MixtureModel& model, double c, const WeightFunction& g,
                                  std::size_t n, const BandwidthVector& h, std::size_t reps,
                                  std::uint64_t seed, const KernelSpec& spec,
                                  const VerifyOptions& opts) {
  check_sample_args(model, n, h);
  if (reps < 30) throw ArgumentError("corollary check needs at least 30 replications");
  if (g.p() != 0.0) throw ArgumentError("corollary check needs a weight with p = 0");
  Corollary1Check r;
  r.formula_value = theoretical_risk(model, c, h, spec, n, RiskForm::l1_exact, &g, opts.boundary).value;
  const KernelSpec k = effective_kernel(spec, opts);
  double sum = 0.0;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    const Kde kde(model.sample(n, derive_seed(seed, rep)), h, k);
    const double e = sym_diff_error(model, c, KdeEstimator(kde), g, opts.sym_diff).value;
    r.values.push_back(e);
    sum += e;
  }
  r.mc_mean = sum / static_cast<double>(reps);
  r.ratio = r.mc_mean / r.formula_value;
  return r;
}

double band_squared_error(const MixtureModel& model, double c, double delta, const Estimator& estimate,
                          const SymDiffOptions& opts) {
  if (!(delta > 0.0)) throw ArgumentError("delta must be positive");
  const double lo_level = c - 0.5 * delta;
  const double hi_level = c + 0.5 * delta;
  auto in_band = [&](double v) { return v >= lo_level && v <= hi_level; };

  if (model.dim() == 1) {
    auto f = [&](double x) { return model.density(std::span<const double>(&x, 1)); };
    const auto box = model.box(10.0).front();
    std::vector<double> cuts = {box.first, box.second};
    for (double level : {lo_level, hi_level})
      for (const auto& cr : extract_d1(f, level, box.first, box.second, opts.scan_resolution).crossings)
        cuts.push_back(cr.x);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    auto sq = [&](double x) {
      const double e = estimate.value(std::span<const double>(&x, 1)) - f(x);
      return e * e;
    };
    double total = 0.0;
    bool any = false;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double a = cuts[k], b = cuts[k + 1];
      if (!in_band(f(0.5 * (a + b)))) continue;
      any = true;
      total += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(sq, a, b, 15, 1e-10);
    }
    if (!any) throw ResolutionError("the band f^-1([c - delta/2, c + delta/2]) is empty");
    return total;
  }
  if (model.dim() != 2) throw ArgumentError("band errors are computed for d = 1 and d = 2");
  const GridSpec grid = cell_centered_grid(model.box(5.0), opts.grid_resolution);
  const GridField fh = estimate.grid(grid);
  double cell = grid.step(0) * grid.step(1);
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < fh.values.size(); ++i) {
    const double f = model.density(fh.node_point(i));
    if (!in_band(f)) continue;
    ++count;
    total += (fh.values[i] - f) * (fh.values[i] - f);
  }
  if (count == 0) throw ResolutionError("the band f^-1([c - delta/2, c + delta/2]) contains no grid cells");
  return total * cell;
}

std::vector<Proposition1Point> verify_proposition1(const MixtureModel& model, double c,
                                                   std::size_t n, const BandwidthVector& h,
                                                   const std::vector<double>& deltas,
                                                   std::size_t reps, std::uint64_t seed,
                                                   const KernelSpec& spec,
                                                   const VerifyOptions& opts) {
  check_sample_args(model, n, h);
  if (deltas.empty()) throw ArgumentError("need at least one delta");
  if (reps == 0) throw ArgumentError("need at least one replication");
  // Fail on empty bands before any sampling.
  const ModelEstimator exact(model);
  for (double delta : deltas) band_squared_error(model, c, delta, exact, opts.sym_diff);

  const WeightFunction g(WeightKind::excess, model, c);
  const KernelSpec k = effective_kernel(spec, opts);
  std::vector<Proposition1Point> out(deltas.size());
  for (std::size_t i = 0; i < deltas.size(); ++i) out[i].delta = deltas[i];
  for (std::size_t rep = 0; rep < reps; ++rep) {
    const Kde kde(model.sample(n, derive_seed(seed, rep)), h, k);
    const KdeEstimator est(kde);
    const double num = sym_diff_error(model, c, est, g, opts.sym_diff).value;
    for (auto& pt : out) {
      pt.numerator += num;
      pt.denominator += band_squared_error(model, c, pt.delta, est, opts.sym_diff);
    }
  }
  for (auto& pt : out) {
    pt.numerator /= static_cast<double>(reps);
    pt.denominator /= static_cast<double>(reps);
    pt.ratio = 2.0 * pt.delta * pt.numerator / pt.denominator;
  }
  return out;
}

BiasVarianceCheck verify_bias_variance(const MixtureModel& model, double c,
                                       const std::vector<std::vector<double>>& points,
                                       std::size_t n, const BandwidthVector& h, std::size_t reps,
                                       std::uint64_t seed, const KernelSpec& spec,
                                       const VerifyOptions& opts) {
  check_sample_args(model, n, h);
  if (points.empty() || reps < 2) throw ArgumentError("need points and at least two replications");
  for (const auto& x : points)
    if (x.size() != model.dim()) throw ArgumentError("point has the wrong dimension");

  BiasVarianceCheck r;
  const KernelSpec k = effective_kernel(spec, opts);
  std::vector<double> truth;
  for (const auto& x : points) {
    truth.push_back(model.density(x));
    r.predicted_bias += bias_term(model, spec, h, x);
  }
  r.predicted_bias /= static_cast<double>(points.size());
  const double s = variance_scale(c, spec, h, n);
  r.predicted_variance = s * s;

  for (std::size_t rep = 0; rep < reps; ++rep) {
    const Kde kde(model.sample(n, derive_seed(seed, rep)), h, k);
    for (std::size_t i = 0; i < points.size(); ++i) r.values.push_back(kde.value(points[i]) - truth[i]);
  }
  // Bias pooled over all points; variance averaged over per-point variances.
  const std::size_t m = points.size();
  double total = 0.0;
  for (double v : r.values) total += v;
  r.empirical_bias = total / static_cast<double>(r.values.size());
  for (std::size_t i = 0; i < m; ++i) {
    double mean = 0.0;
    for (std::size_t rep = 0; rep < reps; ++rep) mean += r.values[rep * m + i];
    mean /= static_cast<double>(reps);
    double ss = 0.0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const double e = r.values[rep * m + i] - mean;
      ss += e * e;
    }
    r.empirical_variance += ss / static_cast<double>(reps - 1);
  }
  r.empirical_variance /= static_cast<double>(m);
  return r;
}

}  // namespace lsbw
