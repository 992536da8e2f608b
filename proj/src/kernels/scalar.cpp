#include "hacl/kernels.hpp"

namespace hacl::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double sum_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double sum_squares_scalar(const double* x, std::size_t n) { return dot_scalar(x, x, n); }

void gemv_scalar(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_scalar(A + r * cols, x, cols);
}

void gemv_t_acc_scalar(const double* A, std::size_t rows, std::size_t cols, const double* x,
                       double* y) {
  for (std::size_t r = 0; r < rows; ++r) axpy_scalar(x[r], A + r * cols, y, cols);
}

void rank1_scalar(double* A, std::size_t rows, std::size_t cols, const double* u, const double* v) {
  for (std::size_t r = 0; r < rows; ++r) axpy_scalar(u[r], v, A + r * cols, cols);
}

void dot_rows_scalar(const double* M, std::size_t rows, std::size_t cols, const double* v,
                     double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot_scalar(M + r * cols, v, cols);
}

const KernelTable kScalar{
    "scalar",        dot_scalar,        axpy_scalar,  sum_scalar,      sum_squares_scalar,
    gemv_scalar,     gemv_t_acc_scalar, rank1_scalar, dot_rows_scalar,
};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace hacl::kernels
