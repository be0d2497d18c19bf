#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "lsbw/kernels.hpp"
#include "lsbw/point_set.hpp"

namespace lsbw {

//! Per-coordinate bandwidths h = (h_1, ..., h_d), all positive and finite.
class BandwidthVector {
 public:
  BandwidthVector() = default;
  explicit BandwidthVector(std::vector<double> h);
  static BandwidthVector isotropic(std::size_t d, double h) {
    return BandwidthVector(std::vector<double>(d, h));
  }

  std::size_t dim() const { return h_.size(); }
  double operator[](std::size_t j) const { return h_[j]; }
  const std::vector<double>& values() const { return h_; }
  double product() const;
  double max() const;
  BandwidthVector scaled(double factor) const;

 private:
  std::vector<double> h_;
};

//! Rectangular lattice: `resolution[j]` nodes on [lo_j, hi_j] inclusive.
struct GridSpec {
  std::vector<std::pair<double, double>> bounds;
  std::vector<std::size_t> resolution;

  std::size_t dim() const { return bounds.size(); }
  std::size_t total() const;
  double step(std::size_t axis) const;
  double node(std::size_t axis, std::size_t i) const;
  //! Throws ArgumentError for inconsistent specs or > 2^26 nodes.
  void validate() const;
};

//! Values on a GridSpec lattice, row-major (first coordinate slowest).
struct GridField {
  GridSpec grid;
  std::vector<double> values;

  double at(std::size_t i) const { return values[i]; }
  double at(std::size_t i, std::size_t j) const { return values[i * grid.resolution[1] + j]; }
  std::vector<double> node_point(std::size_t flat) const;
};

//! Bounding box of the sample widened by margin * max(h) on every side.
GridSpec default_grid(const PointSet& sample, const BandwidthVector& h, double margin = 4.0,
                      std::size_t resolution = 0);

//! Product-kernel density estimator
//!   f_hat(x) = 1 / (n prod h_j) sum_i prod_j K~((x_j - X_ij) / h_j)
//! and its analytic partial derivatives. Owns a copy of the sample.
class Kde {
 public:
  Kde(const PointSet& sample, BandwidthVector h, KernelSpec spec);

  std::size_t dim() const { return sample_.dim(); }
  std::size_t size() const { return sample_.size(); }
  const BandwidthVector& bandwidth() const { return h_; }
  const KernelSpec& kernel() const { return spec_; }
  const PointSet& sample() const { return sample_; }

  double value(std::span<const double> x) const;
  //! Zero-based multi-index; each derivative in coordinate j adds a factor
  //! 1/h_j and moves K~ to its next derivative.
  double partial(std::span<const double> x, std::span<const int> index) const;

  //! Field of `partial(index)` (or the density for an empty index) on every
  //! lattice node; bit-identical to pointwise calls.
  GridField grid(const GridSpec& grid, std::span<const int> index = {}) const;

 private:
  std::vector<int> derivative_counts(std::span<const int> index) const;
  double evaluate(std::span<const double> x, const std::vector<int>& counts) const;
  double scale(const std::vector<int>& counts) const;
  void factors(std::size_t axis, double x, int q, std::span<double> out) const;
  void apply_truncation(std::size_t axis, double x, std::span<double> out) const;

  PointSet sample_;
  BandwidthVector h_;
  KernelSpec spec_;
  std::vector<double> sorted_;  // d = 1 with truncation only
};

double kde_at(const PointSet& sample, const BandwidthVector& h, const KernelSpec& spec,
              std::span<const double> x);
double kde_partial_at(const PointSet& sample, const BandwidthVector& h, const KernelSpec& spec,
                      std::span<const double> x, std::span<const int> index);
GridField kde_grid(const PointSet& sample, const BandwidthVector& h, const KernelSpec& spec,
                   const GridSpec& grid, std::span<const int> index = {});

}  // namespace lsbw
