#include "nl2sql/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

namespace nl2sql::simd::avx2 {

__attribute__((target("avx2"))) double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t body = n / 4 * 4;
  for (std::size_t i = 0; i < body; i += 4) {
    const __m256d p = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, p);
  }
  // (l0 + l2, l1 + l3) then their sum, matching the scalar reference.
  const __m128d pair = _mm_add_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1));
  double sum = _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
  for (std::size_t i = body; i < n; ++i) {
    const double p = a[i] * b[i];
    sum = sum + p;
  }
  return sum;
}

__attribute__((target("avx2"))) void scale(double* x, std::size_t n, double factor) {
  const __m256d f = _mm256_set1_pd(factor);
  const std::size_t body = n / 4 * 4;
  for (std::size_t i = 0; i < body; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), f));
  for (std::size_t i = body; i < n; ++i) x[i] *= factor;
}

__attribute__((target("avx2"))) void dot_rows(const double* query, const double* rows, std::size_t n_rows,
                                              std::size_t dim, double* out) {
  for (std::size_t r = 0; r < n_rows; ++r) out[r] = dot(query, rows + r * dim, dim);
}

bool supported() noexcept { return __builtin_cpu_supports("avx2"); }

}  // namespace nl2sql::simd::avx2
#endif
