#include <atomic>
#include <cstdlib>
#include <string>

#include "stabletree/errors.hpp"
#include "stabletree/simd/inertia.hpp"

namespace stabletree::simd {
namespace {

// -1: no override, otherwise the Isa value.
std::atomic<int> g_override{-1};

Isa best_supported() {
  if (cpu_supports(Isa::Avx2)) return Isa::Avx2;
  return Isa::Scalar;
}

Isa from_environment() {
  static const Isa chosen = [] {
    const char* env = std::getenv("STABLETREE_SIMD");
    if (env == nullptr) return best_supported();
    const std::string value(env);
    if (value == "scalar") return Isa::Scalar;
    if (value == "avx2" && cpu_supports(Isa::Avx2)) return Isa::Avx2;
    return best_supported();
  }();
  return chosen;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(STABLETREE_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() {
  const int o = g_override.load(std::memory_order_relaxed);
  if (o >= 0) return static_cast<Isa>(o);
  return from_environment();
}

void set_isa_override(std::optional<Isa> isa) {
  if (isa && !cpu_supports(*isa)) {
    throw ParameterError("requested SIMD kernel is not supported on this CPU");
  }
  g_override.store(isa ? static_cast<int>(*isa) : -1, std::memory_order_relaxed);
}

std::size_t preferred_batch() { return active_isa() == Isa::Avx2 ? 8 : 1; }

void inertia(const InertiaView& op, std::span<const double> lambdas,
             std::span<std::int64_t> counts, double pivot_tol) {
  if (counts.size() < lambdas.size()) throw ParameterError("count buffer too small");
  if (lambdas.empty()) return;
#if defined(STABLETREE_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) {
    inertia_avx2(op, lambdas, counts, pivot_tol);
    return;
  }
#endif
  inertia_scalar(op, lambdas, counts, pivot_tol);
}

}  // namespace stabletree::simd
