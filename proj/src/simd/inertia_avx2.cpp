// Built with -mavx2; only called after a runtime CPU check.

#include <immintrin.h>

#include <algorithm>
#include <bit>
#include <vector>

#include "stabletree/simd/inertia.hpp"

namespace stabletree::simd {
namespace {

struct alignas(32) Lanes8 {
  __m256d lo;
  __m256d hi;
};

}  // namespace

void inertia_avx2(const InertiaView& op, std::span<const double> lambdas,
                  std::span<std::int64_t> counts, double pivot_tol) {
  const std::size_t m = lambdas.size();
  std::vector<Lanes8> acc(op.n);
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d tol = _mm256_set1_pd(pivot_tol);

  for (std::size_t base = 0; base < m; base += 8) {
    alignas(32) double lam[8];
    for (std::size_t l = 0; l < 8; ++l) lam[l] = lambdas[std::min(base + l, m - 1)];
    const __m256d lam_lo = _mm256_load_pd(lam);
    const __m256d lam_hi = _mm256_load_pd(lam + 4);
    const __m256d abs_lo = _mm256_andnot_pd(sign_mask, lam_lo);
    const __m256d abs_hi = _mm256_andnot_pd(sign_mask, lam_hi);

    std::fill(acc.begin(), acc.end(), Lanes8{_mm256_setzero_pd(), _mm256_setzero_pd()});
    __m256i neg_lo = _mm256_setzero_si256();
    __m256i neg_hi = _mm256_setzero_si256();
    __m256d bad_lo = _mm256_setzero_pd();
    __m256d bad_hi = _mm256_setzero_pd();

    for (std::size_t i = 0; i < op.n; ++i) {
      const __m256d dg = _mm256_broadcast_sd(op.diag + i);
      const __m256d ms = _mm256_broadcast_sd(op.mass + i);
      // Same operation order as the scalar kernel (no FMA) so that both
      // produce bit-identical pivots.
      const __m256d d_lo = _mm256_sub_pd(_mm256_sub_pd(dg, _mm256_mul_pd(lam_lo, ms)), acc[i].lo);
      const __m256d d_hi = _mm256_sub_pd(_mm256_sub_pd(dg, _mm256_mul_pd(lam_hi, ms)), acc[i].hi);

      const __m256d lim_lo = _mm256_mul_pd(tol, _mm256_add_pd(dg, _mm256_mul_pd(abs_lo, ms)));
      const __m256d lim_hi = _mm256_mul_pd(tol, _mm256_add_pd(dg, _mm256_mul_pd(abs_hi, ms)));
      bad_lo = _mm256_or_pd(bad_lo, _mm256_cmp_pd(_mm256_andnot_pd(sign_mask, d_lo), lim_lo, _CMP_LE_OQ));
      bad_hi = _mm256_or_pd(bad_hi, _mm256_cmp_pd(_mm256_andnot_pd(sign_mask, d_hi), lim_hi, _CMP_LE_OQ));

      // A true compare is all ones, i.e. -1 as int64.
      neg_lo = _mm256_sub_epi64(neg_lo, _mm256_castpd_si256(_mm256_cmp_pd(d_lo, _mm256_setzero_pd(), _CMP_LT_OQ)));
      neg_hi = _mm256_sub_epi64(neg_hi, _mm256_castpd_si256(_mm256_cmp_pd(d_hi, _mm256_setzero_pd(), _CMP_LT_OQ)));

      const std::int32_t p = op.parent[i];
      if (p >= 0) {
        const __m256d w = _mm256_broadcast_sd(op.w2 + i);
        acc[p].lo = _mm256_add_pd(acc[p].lo, _mm256_div_pd(w, d_lo));
        acc[p].hi = _mm256_add_pd(acc[p].hi, _mm256_div_pd(w, d_hi));
      }
    }

    alignas(32) std::int64_t neg[8];
    alignas(32) double bad[8];
    _mm256_store_si256(reinterpret_cast<__m256i*>(neg), neg_lo);
    _mm256_store_si256(reinterpret_cast<__m256i*>(neg + 4), neg_hi);
    _mm256_store_pd(bad, bad_lo);
    _mm256_store_pd(bad + 4, bad_hi);
    for (std::size_t l = 0; l < 8 && base + l < m; ++l) {
      // NaN compare bits are nonzero; any set bit means a collision.
      const bool collided = std::bit_cast<std::uint64_t>(bad[l]) != 0;
      counts[base + l] = collided ? kCollision : neg[l];
    }
  }
}

}  // namespace stabletree::simd
