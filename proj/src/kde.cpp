#include "lsbw/kde.hpp"

#include <algorithm>
#include <cmath>

#include "lsbw/errors.hpp"
#include "lsbw/simd.hpp"

namespace lsbw {

BandwidthVector::BandwidthVector(std::vector<double> h) : h_(std::move(h)) {
  if (h_.empty()) throw ArgumentError("bandwidth vector must not be empty");
  for (double v : h_)
    if (!(v > 0.0) || !std::isfinite(v)) throw ArgumentError("bandwidths must be positive and finite");
}

double BandwidthVector::product() const {
  double p = 1.0;
  for (double v : h_) p *= v;
  return p;
}

double BandwidthVector::max() const { return *std::max_element(h_.begin(), h_.end()); }

BandwidthVector BandwidthVector::scaled(double factor) const {
  std::vector<double> h = h_;
  for (double& v : h) v *= factor;
  return BandwidthVector(std::move(h));
}

// Grid -------------------------------------------------------------------

std::size_t GridSpec::total() const {
  std::size_t t = 1;
  for (std::size_t r : resolution) t *= r;
  return t;
}

double GridSpec::step(std::size_t axis) const {
  return (bounds[axis].second - bounds[axis].first) / static_cast<double>(resolution[axis] - 1);
}

double GridSpec::node(std::size_t axis, std::size_t i) const {
  if (i + 1 == resolution[axis]) return bounds[axis].second;
  return bounds[axis].first + static_cast<double>(i) * step(axis);
}

void GridSpec::validate() const {
  if (bounds.empty() || bounds.size() != resolution.size())
    throw ArgumentError("grid bounds and resolution disagree");
  double total_nodes = 1.0;
  for (std::size_t j = 0; j < bounds.size(); ++j) {
    if (!(bounds[j].first < bounds[j].second)) throw ArgumentError("grid needs lo < hi");
    if (resolution[j] < 2) throw ArgumentError("grid resolution must be at least 2");
    total_nodes *= static_cast<double>(resolution[j]);
  }
  if (total_nodes > static_cast<double>(std::size_t{1} << 26))
    throw ArgumentError("grid has more than 2^26 nodes");
}

std::vector<double> GridField::node_point(std::size_t flat) const {
  const std::size_t d = grid.dim();
  std::vector<double> x(d);
  for (std::size_t j = d; j-- > 0;) {
    x[j] = grid.node(j, flat % grid.resolution[j]);
    flat /= grid.resolution[j];
  }
  return x;
}

GridSpec default_grid(const PointSet& sample, const BandwidthVector& h, double margin,
                      std::size_t resolution) {
  if (sample.empty()) throw ArgumentError("sample must not be empty");
  if (h.dim() != sample.dim()) throw ArgumentError("bandwidth and sample dimensions differ");
  const std::size_t d = sample.dim();
  if (resolution == 0) resolution = d == 1 ? 4096 : d == 2 ? 512 : 32;
  GridSpec g;
  const double pad = margin * h.max();
  for (std::size_t j = 0; j < d; ++j) {
    const auto col = sample.column(j);
    const auto [mn, mx] = std::minmax_element(col.begin(), col.end());
    g.bounds.emplace_back(*mn - pad, *mx + pad);
    g.resolution.push_back(resolution);
  }
  return g;
}

// Estimator --------------------------------------------------------------

Kde::Kde(const PointSet& sample, BandwidthVector h, KernelSpec spec)
    : sample_(sample), h_(std::move(h)), spec_(std::move(spec)) {
  if (sample_.empty()) throw ArgumentError("sample must not be empty");
  if (h_.dim() != sample_.dim()) throw ArgumentError("bandwidth and sample dimensions differ");
  if (sample_.dim() == 1 && spec_.truncated()) {
    const auto col = sample_.column(0);
    sorted_.assign(col.begin(), col.end());
    std::sort(sorted_.begin(), sorted_.end());
  }
}

std::vector<int> Kde::derivative_counts(std::span<const int> index) const {
  std::vector<int> counts(dim(), 0);
  for (int i : index) {
    if (i < 0 || static_cast<std::size_t>(i) >= dim())
      throw ArgumentError("derivative index out of range");
    ++counts[static_cast<std::size_t>(i)];
  }
  for (int c : counts)
    if (c > KernelSpec::kMaxDerivative) throw ArgumentError("derivative order too high");
  return counts;
}

double Kde::scale(const std::vector<int>& counts) const {
  double s = 1.0 / static_cast<double>(size());
  for (std::size_t j = 0; j < dim(); ++j) s /= std::pow(h_[j], 1 + counts[j]);
  return s;
}

void Kde::factors(std::size_t axis, double x, int q, std::span<double> out) const {
  simd::active().kernel_factors(sample_.column(axis), x, 1.0 / h_[axis], spec_.derivative_poly(q),
                                out);
  if (spec_.truncated()) apply_truncation(axis, x, out);
}

void Kde::apply_truncation(std::size_t axis, double x, std::span<double> out) const {
  const auto col = sample_.column(axis);
  const double inv_h = 1.0 / h_[axis];
  const double r = spec_.support_radius();
  for (std::size_t i = 0; i < col.size(); ++i)
    if (std::abs((x - col[i]) * inv_h) > r) out[i] = 0.0;
}

double Kde::evaluate(std::span<const double> x, const std::vector<int>& counts) const {
  if (x.size() != dim()) throw ArgumentError("point dimension does not match the sample");
  const auto& k = simd::active();
  const std::size_t d = dim();

  if (d == 1 && !sorted_.empty()) {
    // Only points within the truncation radius contribute.
    const double reach = spec_.support_radius() * h_[0];
    const auto lo = std::lower_bound(sorted_.begin(), sorted_.end(), x[0] - reach);
    const auto hi = std::upper_bound(lo, sorted_.end(), x[0] + reach);
    const std::span<const double> window(&*lo, static_cast<std::size_t>(hi - lo));
    if (window.empty()) return 0.0;
    std::vector<double> f(window.size());
    k.kernel_factors(window, x[0], 1.0 / h_[0], spec_.derivative_poly(counts[0]), f);
    return k.sum(f) * scale(counts);
  }

  const std::size_t n = size();
  std::vector<double> f0(n);
  factors(0, x[0], counts[0], f0);
  if (d == 1) return k.sum(f0) * scale(counts);
  std::vector<double> f1(n);
  for (std::size_t j = 1; j + 1 < d; ++j) {
    factors(j, x[j], counts[j], f1);
    k.multiply(f0, f1);
  }
  factors(d - 1, x[d - 1], counts[d - 1], f1);
  return k.dot(f0, f1) * scale(counts);
}

double Kde::value(std::span<const double> x) const {
  return evaluate(x, std::vector<int>(dim(), 0));
}

double Kde::partial(std::span<const double> x, std::span<const int> index) const {
  return evaluate(x, derivative_counts(index));
}

GridField Kde::grid(const GridSpec& grid, std::span<const int> index) const {
  grid.validate();
  if (grid.dim() != dim()) throw ArgumentError("grid and sample dimensions differ");
  const auto counts = derivative_counts(index);
  GridField field{grid, std::vector<double>(grid.total())};

  if (dim() != 2) {
    for (std::size_t i = 0; i < field.values.size(); ++i)
      field.values[i] = evaluate(field.node_point(i), counts);
    return field;
  }

  // d = 2: both factor vectors depend on one coordinate only, so each node
  // is a dot product of a row factor and a column factor. Column factors are
  // built for a block of nodes at a time to stay cache resident; every dot
  // product is the same call kde_at makes for that node.
  const auto& k = simd::active();
  const std::size_t n = size();
  const std::size_t nx = grid.resolution[0];
  const std::size_t ny = grid.resolution[1];
  const double s = scale(counts);
  const std::size_t block =
      std::clamp<std::size_t>((std::size_t{1} << 17) / std::max<std::size_t>(n, 1), 1, 256);

  std::vector<double> fx(n);
  std::vector<double> fy(block * n);
  for (std::size_t j0 = 0; j0 < ny; j0 += block) {
    const std::size_t j1 = std::min(ny, j0 + block);
    for (std::size_t j = j0; j < j1; ++j)
      factors(1, grid.node(1, j), counts[1], std::span<double>(fy.data() + (j - j0) * n, n));
    for (std::size_t i = 0; i < nx; ++i) {
      factors(0, grid.node(0, i), counts[0], fx);
      for (std::size_t j = j0; j < j1; ++j)
        field.values[i * ny + j] =
            k.dot(fx, std::span<const double>(fy.data() + (j - j0) * n, n)) * s;
    }
  }
  return field;
}

double kde_at(const PointSet& sample, const BandwidthVector& h, const KernelSpec& spec,
              std::span<const double> x) {
  return Kde(sample, h, spec).value(x);
}

double kde_partial_at(const PointSet& sample, const BandwidthVector& h, const KernelSpec& spec,
                      std::span<const double> x, std::span<const int> index) {
  return Kde(sample, h, spec).partial(x, index);
}

GridField kde_grid(const PointSet& sample, const BandwidthVector& h, const KernelSpec& spec,
                   const GridSpec& grid, std::span<const int> index) {
  return Kde(sample, h, spec).grid(grid, index);
}

}  // namespace lsbw
