#pragma once

// Sylvester-inertia kernels for tree-structured pencils L - lambda M.
//
// The operator is stored in leaf-first elimination order: position i holds
// the diagonal of L, the mass, the squared off-diagonal to its elimination
// parent and the parent position (-1 for a forest root). Gaussian elimination
// in this order creates no fill, and the pivots obey
//
//   d_i = diag_i - lambda mass_i - sum_{children c} w2_c / d_c,
//
// so the number of negative pivots equals the number of eigenvalues below
// lambda. Every kernel here computes exactly that count; they differ only in
// how many shifts they carry through one sweep of the tree.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace stabletree::simd {

struct InertiaView {
  std::size_t n = 0;
  const double* diag = nullptr;
  const double* mass = nullptr;
  const double* w2 = nullptr;
  const std::int32_t* parent = nullptr;
};

/// Marker written to a count slot when some pivot satisfied
/// |d| <= pivot_tol * (diag + lambda * mass).
inline constexpr std::int64_t kCollision = -1;

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

/// Reference kernel: one shift per sweep.
void inertia_scalar(const InertiaView& op, std::span<const double> lambdas,
                    std::span<std::int64_t> counts, double pivot_tol);

#if defined(STABLETREE_HAVE_AVX2)
/// Eight shifts per sweep in two interleaved 4-wide vectors.
void inertia_avx2(const InertiaView& op, std::span<const double> lambdas,
                  std::span<std::int64_t> counts, double pivot_tol);
#endif

bool cpu_supports(Isa isa);

/// ISA used by inertia(): the best supported one, unless overridden by
/// set_isa_override() or the STABLETREE_SIMD environment variable
/// ("scalar" or "avx2").
Isa active_isa();
void set_isa_override(std::optional<Isa> isa);

/// Preferred number of shifts per call for the active ISA.
std::size_t preferred_batch();

void inertia(const InertiaView& op, std::span<const double> lambdas,
             std::span<std::int64_t> counts, double pivot_tol);

}  // namespace stabletree::simd
