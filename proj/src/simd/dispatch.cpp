#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "nl2sql/simd/kernels.hpp"

namespace nl2sql::simd {

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double dot(const double*, const double*, std::size_t);
void scale(double*, std::size_t, double);
void dot_rows(const double*, const double*, std::size_t, std::size_t, double*);
bool supported() noexcept;
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
double dot(const double*, const double*, std::size_t);
void scale(double*, std::size_t, double);
void dot_rows(const double*, const double*, std::size_t, std::size_t, double*);
}  // namespace neon
#endif

namespace {

constexpr Kernels kScalar{Isa::scalar, &ref::dot, &ref::scale, &ref::dot_rows};
#if defined(__x86_64__) || defined(_M_X64)
constexpr Kernels kAvx2{Isa::avx2, &avx2::dot, &avx2::scale, &avx2::dot_rows};
#endif
#if defined(__aarch64__)
constexpr Kernels kNeon{Isa::neon, &neon::dot, &neon::scale, &neon::dot_rows};
#endif

const Kernels& choose() {
  const std::vector<Isa> isas = available_isas();
  if (const char* forced = std::getenv("NL2SQL_SIMD")) {
    for (Isa isa : isas) {
      if (to_string(isa) == forced) return kernels_for(isa);
    }
  }
  return kernels_for(isas.back());
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "scalar";
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out{Isa::scalar};
#if defined(__x86_64__) || defined(_M_X64)
  if (avx2::supported()) out.push_back(Isa::avx2);
#endif
#if defined(__aarch64__)
  out.push_back(Isa::neon);
#endif
  return out;
}

const Kernels& kernels_for(Isa isa) {
  switch (isa) {
    case Isa::scalar: return kScalar;
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::avx2:
      if (avx2::supported()) return kAvx2;
      break;
#endif
#if defined(__aarch64__)
    case Isa::neon: return kNeon;
#endif
    default: break;
  }
  throw std::invalid_argument("SIMD variant not available: " + std::string(to_string(isa)));
}

const Kernels& active() {
  static const Kernels& chosen = choose();
  return chosen;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  return active().dot(a.data(), b.data(), a.size());
}

void scale(std::span<double> x, double factor) { active().scale(x.data(), x.size(), factor); }

double l2_norm(std::span<const double> x) { return std::sqrt(active().dot(x.data(), x.data(), x.size())); }

}  // namespace nl2sql::simd
