#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "lsbw/bandwidth.hpp"
#include "lsbw/errors.hpp"
#include "lsbw/simd.hpp"

namespace lsbw {
namespace {

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value;
  int evaluations;
};

// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2,
// shrink 1/2) on R^d.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& start, double step, int max_evals) {
  const auto d = start.size();
  std::vector<Eigen::VectorXd> xs(static_cast<std::size_t>(d + 1), start);
  std::vector<double> fs(static_cast<std::size_t>(d + 1));
  for (Eigen::Index j = 0; j < d; ++j) xs[static_cast<std::size_t>(j + 1)][j] += step;
  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    return f(x);
  };
  for (std::size_t k = 0; k < xs.size(); ++k) fs[k] = eval(xs[k]);

  std::vector<std::size_t> order(xs.size());
  while (evals < max_evals) {
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];

    double diameter = 0.0;
    for (const auto& x : xs) diameter = std::max(diameter, (x - xs[best]).lpNorm<Eigen::Infinity>());
    const double spread = std::abs(fs[worst] - fs[best]);
    if (diameter < 1e-7 && spread <= 1e-12 * std::max(std::abs(fs[best]), 1e-300)) break;
    if (diameter < 1e-10) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
    for (std::size_t k = 0; k < xs.size(); ++k)
      if (k != worst) centroid += xs[k];
    centroid /= static_cast<double>(d);

    const Eigen::VectorXd xr = centroid + (centroid - xs[worst]);
    const double fr = eval(xr);
    if (fr < fs[best]) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - xs[worst]);
      const double fe = eval(xe);
      if (fe < fr) {
        xs[worst] = xe;
        fs[worst] = fe;
      } else {
        xs[worst] = xr;
        fs[worst] = fr;
      }
      continue;
    }
    if (fr < fs[second]) {
      xs[worst] = xr;
      fs[worst] = fr;
      continue;
    }
    const bool outside = fr < fs[worst];
    const Eigen::VectorXd xc =
        outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                : Eigen::VectorXd(centroid + 0.5 * (xs[worst] - centroid));
    const double fc = eval(xc);
    if (fc < (outside ? fr : fs[worst])) {
      xs[worst] = xc;
      fs[worst] = fc;
      continue;
    }
    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (k == best) continue;
      xs[k] = xs[best] + 0.5 * (xs[k] - xs[best]);
      fs[k] = eval(xs[k]);
    }
  }
  const auto it = std::min_element(fs.begin(), fs.end());
  return {xs[static_cast<std::size_t>(it - fs.begin())], *it, evals};
}

}  // namespace

double lscv_objective(const PointSet& sample, const BandwidthVector& h, const KernelSpec& spec) {
  const std::size_t n = sample.size();
  const std::size_t d = sample.dim();
  if (n < 2) throw ArgumentError("LSCV needs at least two points");
  if (h.dim() != d) throw ArgumentError("bandwidth and sample dimensions differ");

  std::vector<const double*> columns(d);
  std::vector<double> inv_h(d);
  for (std::size_t j = 0; j < d; ++j) {
    columns[j] = sample.column(j).data();
    inv_h[j] = 1.0 / h[j];
  }
  const auto& k = simd::active();
  const auto conv = spec.convolution_poly();
  const auto kern = spec.derivative_poly(0);
  double s_conv = 0.0, s_kern = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto row = k.pair_row(columns, n, i, inv_h, conv, kern);
    s_conv += row.conv;
    s_kern += row.kern;
  }
  const double nn = static_cast<double>(n);
  const double ph = h.product();
  const double c0 = std::pow(conv[0], static_cast<double>(d));
  return (nn * c0 + 2.0 * s_conv) / (nn * nn * ph) - 4.0 * s_kern / (nn * (nn - 1.0) * ph);
}

LscvSelection select_lscv(const PointSet& sample, const KernelSpec& spec, const LscvOptions& opts) {
  if (sample.size() < 20) throw ArgumentError("LSCV needs at least 20 points");
  if (!(opts.box_low > 0.0 && opts.box_low < 1.0 && opts.box_high > 1.0))
    throw ArgumentError("LSCV search box must contain the normal-scale start");
  const std::size_t d = sample.dim();
  const auto dd = static_cast<Eigen::Index>(d);
  const BandwidthVector start = pilot_bandwidths(sample, spec).h0;

  Eigen::VectorXd lo(dd), hi(dd), x0(dd);
  for (Eigen::Index j = 0; j < dd; ++j) {
    const double l = std::log(start[static_cast<std::size_t>(j)]);
    x0[j] = l;
    lo[j] = l + std::log(opts.box_low);
    hi[j] = l + std::log(opts.box_high);
  }
  auto to_h = [&](const Eigen::VectorXd& y) {
    std::vector<double> h(d);
    for (Eigen::Index j = 0; j < dd; ++j)
      h[static_cast<std::size_t>(j)] = std::exp(std::clamp(y[j], lo[j], hi[j]));
    return BandwidthVector(std::move(h));
  };
  auto objective = [&](const Eigen::VectorXd& y) { return lscv_objective(sample, to_h(y), spec); };

  LscvSelection best;
  best.value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_y = x0;
  const double offsets[] = {0.0, std::log(0.5), std::log(2.0)};
  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    const Eigen::VectorXd from = (x0.array() + offsets[r % 3]).matrix();
    const auto res = nelder_mead(objective, from, 0.25, opts.max_evaluations);
    best.evaluations += res.evaluations;
    if (res.value < best.value) {
      best.value = res.value;
      best_y = res.x;
    }
  }
  best.h = to_h(best_y);
  for (Eigen::Index j = 0; j < dd; ++j)
    if (best_y[j] <= lo[j] + 1e-6 || best_y[j] >= hi[j] - 1e-6) best.boundary_warning = true;
  return best;
}

}  // namespace lsbw
