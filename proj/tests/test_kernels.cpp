#include <cmath>
#include <vector>

#include "doctest.h"
#include "hacl/kernels.hpp"
#include "hacl/rng.hpp"

using namespace hacl;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = uniform(rng, -1.0, 1.0);
  return v;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("AVX2 kernels agree with the scalar reference") {
  const kernels::KernelTable* simd = kernels::avx2_table();
  if (simd == nullptr) {
    MESSAGE("AVX2 unavailable; only the scalar table is exercised");
    return;
  }
  const kernels::KernelTable& ref = kernels::scalar_table();
  Rng rng = make_stream(3, "kernels");
  // Odd sizes cover the remainder loops.
  for (std::size_t rows : {1u, 2u, 3u, 7u, 64u}) {
    for (std::size_t cols : {1u, 3u, 4u, 5u, 17u, 32u, 67u}) {
      const auto A = random_vec(rng, rows * cols);
      const auto x = random_vec(rng, cols);
      const auto u = random_vec(rng, rows);
      const double tol = 1e-12 * static_cast<double>(cols + rows);

      CHECK(std::abs(ref.dot(A.data(), A.data(), cols) - simd->dot(A.data(), A.data(), cols)) <= tol);
      CHECK(std::abs(ref.sum(A.data(), cols) - simd->sum(A.data(), cols)) <= tol);
      CHECK(std::abs(ref.sum_squares(A.data(), cols) - simd->sum_squares(A.data(), cols)) <= tol);

      std::vector<double> y1(cols, 0.5), y2(cols, 0.5);
      ref.axpy(-0.3, x.data(), y1.data(), cols);
      simd->axpy(-0.3, x.data(), y2.data(), cols);
      CHECK(max_diff(y1, y2) <= tol);

      std::vector<double> g1(rows), g2(rows);
      ref.gemv(A.data(), rows, cols, x.data(), g1.data());
      simd->gemv(A.data(), rows, cols, x.data(), g2.data());
      CHECK(max_diff(g1, g2) <= tol);

      std::vector<double> t1(cols, 1.0), t2(cols, 1.0);
      ref.gemv_t_acc(A.data(), rows, cols, u.data(), t1.data());
      simd->gemv_t_acc(A.data(), rows, cols, u.data(), t2.data());
      CHECK(max_diff(t1, t2) <= tol);

      auto R1 = A, R2 = A;
      ref.rank1(R1.data(), rows, cols, u.data(), x.data());
      simd->rank1(R2.data(), rows, cols, u.data(), x.data());
      CHECK(max_diff(R1, R2) <= tol);

      std::vector<double> d1(rows), d2(rows);
      ref.dot_rows(A.data(), rows, cols, x.data(), d1.data());
      simd->dot_rows(A.data(), rows, cols, x.data(), d2.data());
      CHECK(max_diff(d1, d2) <= tol);
    }
  }
}

TEST_CASE("scalar kernels on hand-sized inputs") {
  const auto& k = kernels::scalar_table();
  const double a[] = {1, 2, 3};
  const double b[] = {4, 5, 6};
  CHECK(k.dot(a, b, 3) == 32.0);
  CHECK(k.sum(a, 3) == 6.0);
  CHECK(k.sum_squares(a, 3) == 14.0);
  const double M[] = {1, 2, 3, 4, 5, 6};  // 2 x 3
  double y[2];
  k.gemv(M, 2, 3, a, y);
  CHECK(y[0] == 14.0);
  CHECK(y[1] == 32.0);
  double t[3] = {0, 0, 0};
  const double u[] = {1, -1};
  k.gemv_t_acc(M, 2, 3, u, t);
  CHECK(t[0] == -3.0);
  CHECK(t[1] == -3.0);
  CHECK(t[2] == -3.0);
}

TEST_CASE("active table is one of the known tables") {
  const auto& act = kernels::active();
  const bool known = &act == &kernels::scalar_table() || &act == kernels::avx2_table();
  CHECK(known);
}
