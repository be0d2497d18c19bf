#include "lsbw/point_set.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "lsbw/errors.hpp"

namespace lsbw {

PointSet::PointSet(std::size_t n, std::size_t dim) : n_(n), dim_(dim), data_(n * dim, 0.0) {}

PointSet PointSet::from_rows(std::span<const double> rows, std::size_t dim) {
  if (dim == 0 || rows.size() % dim != 0)
    throw ArgumentError("row data length is not a multiple of the dimension");
  PointSet p(rows.size() / dim, dim);
  for (std::size_t i = 0; i < p.n_; ++i)
    for (std::size_t j = 0; j < dim; ++j) p(i, j) = rows[i * dim + j];
  return p;
}

std::vector<double> PointSet::point(std::size_t i) const {
  std::vector<double> x(dim_);
  for (std::size_t j = 0; j < dim_; ++j) x[j] = (*this)(i, j);
  return x;
}

PointSet PointSet::affine(double factor, std::span<const double> shift) const {
  PointSet out(n_, dim_);
  for (std::size_t j = 0; j < dim_; ++j) {
    const double s = shift.empty() ? 0.0 : shift[j];
    for (std::size_t i = 0; i < n_; ++i) out(i, j) = factor * (*this)(i, j) + s;
  }
  return out;
}

double coordinate_sd(const PointSet& pts, std::size_t j) {
  const auto col = pts.column(j);
  if (col.size() < 2) throw ArgumentError("standard deviation needs at least two points");
  double mean = 0.0;
  for (double v : col) mean += v;
  mean /= static_cast<double>(col.size());
  double ss = 0.0;
  for (double v : col) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(col.size() - 1));
}

namespace {

bool parse_row(const std::string& line, std::vector<double>& out) {
  out.clear();
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t end = line.find_first_of(",;\t", pos);
    if (end == std::string::npos) end = line.size();
    std::string field = line.substr(pos, end - pos);
    const auto first = field.find_first_not_of(" \r");
    const auto last = field.find_last_not_of(" \r");
    if (first == std::string::npos) return false;
    field = field.substr(first, last - first + 1);
    double v = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size()) return false;
    out.push_back(v);
    pos = end + 1;
  }
  return !out.empty();
}

}  // namespace

PointSet read_points_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open " + path.string());
  std::vector<double> rows;
  std::vector<double> row;
  std::size_t dim = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \r\t") == std::string::npos) continue;
    if (!parse_row(line, row)) {
      if (rows.empty() && dim == 0) continue;  // header
      throw ArgumentError(path.string() + ":" + std::to_string(line_no) + ": not numeric");
    }
    if (dim == 0) dim = row.size();
    if (row.size() != dim)
      throw ArgumentError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                          std::to_string(dim) + " columns");
    rows.insert(rows.end(), row.begin(), row.end());
  }
  if (rows.empty()) throw ArgumentError(path.string() + ": no data rows");
  return PointSet::from_rows(rows, dim);
}

void write_points_csv(const PointSet& pts, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(17);
  for (std::size_t j = 0; j < pts.dim(); ++j) out << (j ? ",x" : "x") << j + 1;
  out << '\n';
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.dim(); ++j) out << (j ? "," : "") << pts(i, j);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace lsbw
