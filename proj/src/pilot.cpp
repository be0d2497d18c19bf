#include <algorithm>
#include <cmath>
#include <numbers>

#include "lsbw/bandwidth.hpp"
#include "lsbw/errors.hpp"

namespace lsbw {
namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// int (phi^(s))^2 = (2s)! / (2^(2s+1) s! sqrt(pi))
double normal_derivative_roughness(int s) {
  return factorial(2 * s) / (std::pow(2.0, 2 * s + 1) * factorial(s) * std::sqrt(std::numbers::pi));
}

}  // namespace

double pilot_constant(const KernelSpec& spec, int r) {
  if (r < 0 || r > 2) throw ArgumentError("pilot order must be 0, 1 or 2");
  const int nu = spec.order();
  const double nf = factorial(nu);
  const double num = (2.0 * r + 1.0) * nf * nf * spec.derivative_l2_norm_sq(r);
  const double den = 2.0 * nu * spec.kappa() * spec.kappa() * normal_derivative_roughness(r + nu);
  return std::pow(num / den, 1.0 / (2.0 * r + 2.0 * nu + 1.0));
}

Pilots pilot_bandwidths(const PointSet& sample, const KernelSpec& spec) {
  const std::size_t n = sample.size();
  const std::size_t d = sample.dim();
  if (n < 10) throw ArgumentError("pilot bandwidths need at least 10 points");
  std::vector<double> sd(d);
  for (std::size_t j = 0; j < d; ++j) {
    sd[j] = coordinate_sd(sample, j);
    if (!(sd[j] > 0.0)) throw ArgumentError("coordinate " + std::to_string(j + 1) + " has zero variance");
  }
  const int nu = spec.order();
  auto rule = [&](int r) {
    const double c = pilot_constant(spec, r);
    const double rate = std::pow(static_cast<double>(n), -1.0 / (static_cast<double>(d) + 2.0 * nu + 2.0 * r));
    std::vector<double> h(d);
    for (std::size_t j = 0; j < d; ++j) h[j] = c * sd[j] * rate;
    return BandwidthVector(std::move(h));
  };
  return {rule(0), rule(1), rule(2)};
}

double estimate_level(const PointSet& sample, double tau, const KernelSpec& spec) {
  if (!(tau > 0.0 && tau < 1.0)) throw ArgumentError("tau must lie in (0, 1)");
  const Kde kde(sample, pilot_bandwidths(sample, spec).h0, spec);
  std::vector<double> values(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) values[i] = kde.value(sample.point(i));
  std::sort(values.begin(), values.end());
  const double pos = tau * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

}  // namespace lsbw
