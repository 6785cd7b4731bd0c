#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace nl2sql::simd {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa) noexcept;

/// Function table for one instruction set. Every variant accumulates in the
/// same four-lane order as the scalar reference, so results are bit-identical
/// across variants (the build disables floating-point contraction).
struct Kernels {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*scale)(double* x, std::size_t n, double factor);
  /// out[r] = dot(query, rows + r * dim) for r in [0, n_rows).
  void (*dot_rows)(const double* query, const double* rows, std::size_t n_rows, std::size_t dim, double* out);
};

/// Scalar reference implementations.
namespace ref {
double dot(const double* a, const double* b, std::size_t n);
void scale(double* x, std::size_t n, double factor);
void dot_rows(const double* query, const double* rows, std::size_t n_rows, std::size_t dim, double* out);
}  // namespace ref

/// Variants compiled in and supported by the running CPU, scalar first.
std::vector<Isa> available_isas();

/// Throws std::invalid_argument when `isa` is not available here.
const Kernels& kernels_for(Isa isa);

/// Best available variant, chosen once. NL2SQL_SIMD=scalar|avx2|neon in the
/// environment forces a specific (available) variant.
const Kernels& active();

// Convenience wrappers over active().
double dot(std::span<const double> a, std::span<const double> b);
void scale(std::span<double> x, double factor);
double l2_norm(std::span<const double> x);

}  // namespace nl2sql::simd
