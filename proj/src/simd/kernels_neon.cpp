#include "nl2sql/simd/kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

namespace nl2sql::simd::neon {

// Two 2-lane registers stand in for the four reference lanes: lo = (l0, l1),
// hi = (l2, l3).
double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0);
  float64x2_t hi = vdupq_n_f64(0.0);
  const std::size_t body = n / 4 * 4;
  for (std::size_t i = 0; i < body; i += 4) {
    lo = vaddq_f64(lo, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    hi = vaddq_f64(hi, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  const float64x2_t pair = vaddq_f64(lo, hi);
  double sum = vgetq_lane_f64(pair, 0) + vgetq_lane_f64(pair, 1);
  for (std::size_t i = body; i < n; ++i) {
    const double p = a[i] * b[i];
    sum = sum + p;
  }
  return sum;
}

void scale(double* x, std::size_t n, double factor) {
  const std::size_t body = n / 2 * 2;
  for (std::size_t i = 0; i < body; i += 2) vst1q_f64(x + i, vmulq_n_f64(vld1q_f64(x + i), factor));
  for (std::size_t i = body; i < n; ++i) x[i] *= factor;
}

void dot_rows(const double* query, const double* rows, std::size_t n_rows, std::size_t dim, double* out) {
  for (std::size_t r = 0; r < n_rows; ++r) out[r] = dot(query, rows + r * dim, dim);
}

}  // namespace nl2sql::simd::neon
#endif
