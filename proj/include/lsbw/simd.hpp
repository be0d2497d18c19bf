#pragma once

#include <cstddef>
#include <span>

// Data-parallel inner loops. Every kernel exists as a scalar reference and an
// AVX2/FMA variant; the variant is picked once at runtime from cpuid (or the
// LSBW_SIMD environment variable) and stays fixed for the process, so results
// are reproducible run to run on a given machine.
namespace lsbw::simd {

enum class Backend { scalar, avx2 };

//! Polynomial-times-Gaussian factor, the shape of every kernel derivative:
//! out[i] = P(u_i) * exp(-u_i^2 / 2) with u_i = (x - data[i]) * inv_h and
//! P given by ascending coefficients.
using KernelFactorsFn = void (*)(std::span<const double> data, double x, double inv_h,
                                 std::span<const double> poly, std::span<double> out);
using SumFn = double (*)(std::span<const double>);
using DotFn = double (*)(std::span<const double>, std::span<const double>);
using MultiplyFn = void (*)(std::span<double> acc, std::span<const double> f);
using ExpFn = void (*)(std::span<double> values);

struct PairSums {
  double conv = 0.0;
  double kern = 0.0;
};

//! One row of the LSCV pair sums: for j > i accumulate
//!   conv += prod_k Pc(t_k) * exp(-S/4),  kern += prod_k Pk(t_k) * exp(-S/2)
//! with t_k = (x_ik - x_jk) * inv_h[k] and S = sum_k t_k^2.
using PairRowFn = PairSums (*)(std::span<const double* const> columns, std::size_t n,
                               std::size_t i, std::span<const double> inv_h,
                               std::span<const double> conv_poly,
                               std::span<const double> kern_poly);

struct KernelTable {
  Backend backend;
  KernelFactorsFn kernel_factors;
  SumFn sum;
  DotFn dot;
  MultiplyFn multiply;
  ExpFn exp_inplace;
  PairRowFn pair_row;
};

const KernelTable& scalar_table();
//! Only valid when avx2_supported() is true.
const KernelTable& avx2_table();
bool avx2_supported();

//! The table selected for this process.
const KernelTable& active();
const char* backend_name(Backend b);

inline constexpr std::size_t kMaxPolyCoefficients = 9;

}  // namespace lsbw::simd
