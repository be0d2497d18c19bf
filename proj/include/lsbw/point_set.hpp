#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace lsbw {

//! A sample of n points in R^d, stored coordinate-major so each coordinate is
//! one contiguous column (the layout the SIMD kernels stream over).
class PointSet {
 public:
  PointSet() = default;
  PointSet(std::size_t n, std::size_t dim);
  //! From row-major data (n*dim values, point after point).
  static PointSet from_rows(std::span<const double> rows, std::size_t dim);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return dim_; }
  bool empty() const { return n_ == 0; }

  std::span<const double> column(std::size_t j) const {
    return {data_.data() + j * n_, n_};
  }
  std::span<double> column(std::size_t j) { return {data_.data() + j * n_, n_}; }

  double operator()(std::size_t i, std::size_t j) const { return data_[j * n_ + i]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[j * n_ + i]; }

  std::vector<double> point(std::size_t i) const;

  //! Copy with every point multiplied by `factor` and shifted by `shift`.
  PointSet affine(double factor, std::span<const double> shift = {}) const;

 private:
  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

//! Sample standard deviation (n-1 denominator) of one coordinate.
double coordinate_sd(const PointSet& pts, std::size_t j);

//! One point per row, `dim` numeric columns; a non-numeric first row is
//! treated as a header. Dimension is taken from the first data row.
PointSet read_points_csv(const std::filesystem::path& path);
void write_points_csv(const PointSet& pts, const std::filesystem::path& path);

}  // namespace lsbw
