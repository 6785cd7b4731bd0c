#include "nl2sql/simd/kernels.hpp"

namespace nl2sql::simd::ref {

// Lane l accumulates indices i with i % 4 == l over the 4-aligned prefix; the
// lanes reduce as (l0 + l2) + (l1 + l3), then the tail is added in order.
// SIMD variants reproduce exactly this order.
double dot(const double* a, const double* b, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t body = n / 4 * 4;
  for (std::size_t i = 0; i < body; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) {
      const double p = a[i + l] * b[i + l];
      lane[l] = lane[l] + p;
    }
  }
  double sum = (lane[0] + lane[2]) + (lane[1] + lane[3]);
  for (std::size_t i = body; i < n; ++i) {
    const double p = a[i] * b[i];
    sum = sum + p;
  }
  return sum;
}

void scale(double* x, std::size_t n, double factor) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= factor;
}

void dot_rows(const double* query, const double* rows, std::size_t n_rows, std::size_t dim, double* out) {
  for (std::size_t r = 0; r < n_rows; ++r) out[r] = dot(query, rows + r * dim, dim);
}

}  // namespace nl2sql::simd::ref
