#include <cstdlib>
#include <string_view>

#include "hacl/kernels.hpp"

namespace hacl::kernels {

#if defined(HACL_WITH_AVX2)
const KernelTable& avx2_table_unchecked();
#endif

const KernelTable* avx2_table() {
#if defined(HACL_WITH_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_table_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& table = [&]() -> const KernelTable& {
    const char* env = std::getenv("HACL_KERNELS");
    if (env != nullptr && std::string_view(env) == "scalar") return scalar_table();
    if (const KernelTable* t = avx2_table()) return *t;
    return scalar_table();
  }();
  return table;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), x.size());
}

double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

double sum_squares(std::span<const double> x) { return active().sum_squares(x.data(), x.size()); }

void gemv(std::span<const double> A, std::size_t rows, std::size_t cols, std::span<const double> x,
          std::span<double> y) {
  active().gemv(A.data(), rows, cols, x.data(), y.data());
}

void gemv_t_acc(std::span<const double> A, std::size_t rows, std::size_t cols,
                std::span<const double> x, std::span<double> y) {
  active().gemv_t_acc(A.data(), rows, cols, x.data(), y.data());
}

void rank1(std::span<double> A, std::size_t rows, std::size_t cols, std::span<const double> u,
           std::span<const double> v) {
  active().rank1(A.data(), rows, cols, u.data(), v.data());
}

void dot_rows(std::span<const double> M, std::size_t rows, std::size_t cols,
              std::span<const double> v, std::span<double> out) {
  active().dot_rows(M.data(), rows, cols, v.data(), out.data());
}

}  // namespace hacl::kernels
