#pragma once

// Dense double-precision kernels used by the predictors and the sampler.
//
// Each kernel has a portable scalar reference and, on x86-64, an AVX2/FMA
// variant. The variant is chosen once per process: AVX2 when the CPU reports
// both avx2 and fma, unless HACL_KERNELS=scalar is set in the environment.
// Matrices are row-major and passed as flat spans with explicit shapes.

#include <cstddef>
#include <span>
#include <string_view>

namespace hacl::kernels {

struct KernelTable {
  std::string_view name;

  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  double (*sum_squares)(const double* x, std::size_t n);
  // y = A x  (A is rows x cols)
  void (*gemv)(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y);
  // y += A^T x  (A is rows x cols, x has rows entries, y has cols entries)
  void (*gemv_t_acc)(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y);
  // A += u v^T
  void (*rank1)(double* A, std::size_t rows, std::size_t cols, const double* u, const double* v);
  // out[i] = dot(M[i, :], v) for every row of M
  void (*dot_rows)(const double* M, std::size_t rows, std::size_t cols, const double* v, double* out);
};

const KernelTable& scalar_table();
// nullptr when the build or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();
// The table selected for this process.
const KernelTable& active();

// Thin span wrappers over active().
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double a, std::span<const double> x, std::span<double> y);
double sum(std::span<const double> x);
double sum_squares(std::span<const double> x);
void gemv(std::span<const double> A, std::size_t rows, std::size_t cols, std::span<const double> x,
          std::span<double> y);
void gemv_t_acc(std::span<const double> A, std::size_t rows, std::size_t cols,
                std::span<const double> x, std::span<double> y);
void rank1(std::span<double> A, std::size_t rows, std::size_t cols, std::span<const double> u,
           std::span<const double> v);
void dot_rows(std::span<const double> M, std::size_t rows, std::size_t cols,
              std::span<const double> v, std::span<double> out);

}  // namespace hacl::kernels
