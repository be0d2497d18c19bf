#include "lsbw/simd.hpp"

#include <cmath>

namespace lsbw::simd {
namespace {

inline double horner(std::span<const double> poly, double u) {
  double p = 0.0;
  for (std::size_t k = poly.size(); k-- > 0;) p = p * u + poly[k];
  return p;
}

void kernel_factors(std::span<const double> data, double x, double inv_h,
                    std::span<const double> poly, std::span<double> out) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double u = (x - data[i]) * inv_h;
    out[i] = horner(poly, u) * std::exp(-0.5 * u * u);
  }
}

double sum(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v;
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void multiply(std::span<double> acc, std::span<const double> f) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] *= f[i];
}

void exp_inplace(std::span<double> v) {
  for (double& x : v) x = std::exp(x);
}

PairSums pair_row(std::span<const double* const> columns, std::size_t n, std::size_t i,
                  std::span<const double> inv_h, std::span<const double> conv_poly,
                  std::span<const double> kern_poly) {
  const std::size_t d = columns.size();
  const bool const_conv = conv_poly.size() == 1;
  const bool const_kern = kern_poly.size() == 1;
  PairSums out;
  for (std::size_t j = i + 1; j < n; ++j) {
    double s = 0.0;
    double pc = 1.0;
    double pk = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double t = (columns[k][i] - columns[k][j]) * inv_h[k];
      s += t * t;
      if (!const_conv) pc *= horner(conv_poly, t);
      if (!const_kern) pk *= horner(kern_poly, t);
    }
    const double e = std::exp(-0.25 * s);
    out.conv += pc * e;
    out.kern += pk * e * e;
  }
  if (const_conv) out.conv *= std::pow(conv_poly[0], static_cast<double>(d));
  if (const_kern) out.kern *= std::pow(kern_poly[0], static_cast<double>(d));
  return out;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Backend::scalar, &kernel_factors, &sum, &dot,
                                 &multiply, &exp_inplace, &pair_row};
  return table;
}

}  // namespace lsbw::simd
