#include "lsbw/simd.hpp"

#include <cmath>
#include <stdexcept>

#if defined(LSBW_HAVE_AVX2_TU)
#include <immintrin.h>

namespace lsbw::simd {
namespace {

// exp on four doubles: x = n*ln2 + r, |r| <= ln2/2, e^r by a degree-13 Taylor
// polynomial (truncation < 1e-17 relative), then scale by 2^n through the
// exponent bits. Inputs below -708 flush to zero.
inline __m256d exp_pd(__m256d x) {
  const __m256d hi = _mm256_set1_pd(709.0);
  const __m256d lo = _mm256_set1_pd(-708.0);
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);

  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  const __m256d xc = _mm256_max_pd(_mm256_min_pd(x, hi), lo);
  const __m256d n =
      _mm256_round_pd(_mm256_mul_pd(xc, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, xc);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);

  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);                 // 1/13!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));   // 1/12!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  const __m128i n32 = _mm256_cvtpd_epi32(n);
  const __m256i n64 = _mm256_cvtepi32_epi64(n32);
  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
  const __m256d scaled = _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
  return _mm256_andnot_pd(underflow, scaled);
}

inline __m256d horner_pd(std::span<const double> poly, __m256d u) {
  __m256d p = _mm256_set1_pd(poly.back());
  for (std::size_t k = poly.size() - 1; k-- > 0;)
    p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(poly[k]));
  return p;
}

inline double horner(std::span<const double> poly, double u) {
  double p = 0.0;
  for (std::size_t k = poly.size(); k-- > 0;) p = p * u + poly[k];
  return p;
}

// Fixed-order horizontal reduction of two accumulators.
inline double hsum(__m256d a, __m256d b) {
  alignas(32) double la[4];
  alignas(32) double lb[4];
  _mm256_store_pd(la, a);
  _mm256_store_pd(lb, b);
  return ((la[0] + lb[0]) + (la[1] + lb[1])) + ((la[2] + lb[2]) + (la[3] + lb[3]));
}

// Scalar tail uses the same vector exp on a padded lane so that a value only
// depends on its own inputs, never on its position in the array.
inline double exp1(double x) {
  alignas(32) double buf[4] = {x, x, x, x};
  _mm256_store_pd(buf, exp_pd(_mm256_load_pd(buf)));
  return buf[0];
}

void kernel_factors(std::span<const double> data, double x, double inv_h,
                    std::span<const double> poly, std::span<double> out) {
  const std::size_t n = data.size();
  const __m256d vx = _mm256_set1_pd(x);
  const __m256d vh = _mm256_set1_pd(inv_h);
  const __m256d mhalf = _mm256_set1_pd(-0.5);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d u = _mm256_mul_pd(_mm256_sub_pd(vx, _mm256_loadu_pd(data.data() + i)), vh);
    const __m256d e = exp_pd(_mm256_mul_pd(mhalf, _mm256_mul_pd(u, u)));
    _mm256_storeu_pd(out.data() + i, _mm256_mul_pd(horner_pd(poly, u), e));
  }
  if (i < n) {
    alignas(32) double buf[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t k = i; k < n; ++k) buf[k - i] = data[k];
    const __m256d u = _mm256_mul_pd(_mm256_sub_pd(vx, _mm256_load_pd(buf)), vh);
    const __m256d e = exp_pd(_mm256_mul_pd(mhalf, _mm256_mul_pd(u, u)));
    _mm256_store_pd(buf, _mm256_mul_pd(horner_pd(poly, u), e));
    for (std::size_t k = i; k < n; ++k) out[k] = buf[k - i];
  }
}

double sum(std::span<const double> a) {
  const std::size_t n = a.size();
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_add_pd(s0, _mm256_loadu_pd(a.data() + i));
    s1 = _mm256_add_pd(s1, _mm256_loadu_pd(a.data() + i + 4));
  }
  double s = hsum(s0, s1);
  for (; i < n; ++i) s += a[i];
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i + 4), _mm256_loadu_pd(b.data() + i + 4),
                         s1);
  }
  double s = hsum(s0, s1);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void multiply(std::span<double> acc, std::span<const double> f) {
  const std::size_t n = acc.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(acc.data() + i,
                     _mm256_mul_pd(_mm256_loadu_pd(acc.data() + i), _mm256_loadu_pd(f.data() + i)));
  for (; i < n; ++i) acc[i] *= f[i];
}

void exp_inplace(std::span<double> v) {
  const std::size_t n = v.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(v.data() + i, exp_pd(_mm256_loadu_pd(v.data() + i)));
  for (; i < n; ++i) v[i] = exp1(v[i]);
}

PairSums pair_row(std::span<const double* const> columns, std::size_t n, std::size_t i,
                  std::span<const double> inv_h, std::span<const double> conv_poly,
                  std::span<const double> kern_poly) {
  const std::size_t d = columns.size();
  const bool const_conv = conv_poly.size() == 1;
  const bool const_kern = kern_poly.size() == 1;
  const __m256d mquarter = _mm256_set1_pd(-0.25);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d acc_c = _mm256_setzero_pd();
  __m256d acc_k = _mm256_setzero_pd();
  std::size_t j = i + 1;
  for (; j + 4 <= n; j += 4) {
    __m256d s = _mm256_setzero_pd();
    __m256d pc = one;
    __m256d pk = one;
    for (std::size_t k = 0; k < d; ++k) {
      const __m256d xi = _mm256_set1_pd(columns[k][i]);
      const __m256d t = _mm256_mul_pd(_mm256_sub_pd(xi, _mm256_loadu_pd(columns[k] + j)),
                                      _mm256_set1_pd(inv_h[k]));
      s = _mm256_fmadd_pd(t, t, s);
      if (!const_conv) pc = _mm256_mul_pd(pc, horner_pd(conv_poly, t));
      if (!const_kern) pk = _mm256_mul_pd(pk, horner_pd(kern_poly, t));
    }
    const __m256d e = exp_pd(_mm256_mul_pd(mquarter, s));
    acc_c = _mm256_fmadd_pd(pc, e, acc_c);
    acc_k = _mm256_fmadd_pd(pk, _mm256_mul_pd(e, e), acc_k);
  }
  PairSums out;
  out.conv = hsum(acc_c, _mm256_setzero_pd());
  out.kern = hsum(acc_k, _mm256_setzero_pd());
  for (; j < n; ++j) {
    double s = 0.0;
    double pc = 1.0;
    double pk = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double t = (columns[k][i] - columns[k][j]) * inv_h[k];
      s += t * t;
      if (!const_conv) pc *= horner(conv_poly, t);
      if (!const_kern) pk *= horner(kern_poly, t);
    }
    const double e = exp1(-0.25 * s);
    out.conv += pc * e;
    out.kern += pk * e * e;
  }
  if (const_conv) out.conv *= std::pow(conv_poly[0], static_cast<double>(d));
  if (const_kern) out.kern *= std::pow(kern_poly[0], static_cast<double>(d));
  return out;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{Backend::avx2, &kernel_factors, &sum, &dot,
                                 &multiply, &exp_inplace, &pair_row};
  return table;
}

}  // namespace lsbw::simd

#else

namespace lsbw::simd {
const KernelTable& avx2_table() { throw std::logic_error("AVX2 kernels not built for this target"); }
}  // namespace lsbw::simd

#endif
