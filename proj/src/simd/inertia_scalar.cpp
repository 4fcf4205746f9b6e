#include <cmath>
#include <vector>

#include "stabletree/simd/inertia.hpp"

namespace stabletree::simd {

void inertia_scalar(const InertiaView& op, std::span<const double> lambdas,
                    std::span<std::int64_t> counts, double pivot_tol) {
  std::vector<double> acc(op.n);
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    const double lambda = lambdas[j];
    std::fill(acc.begin(), acc.end(), 0.0);
    std::int64_t negative = 0;
    bool collided = false;
    for (std::size_t i = 0; i < op.n; ++i) {
      const double shifted = op.diag[i] - lambda * op.mass[i];
      const double d = shifted - acc[i];
      if (std::fabs(d) <= pivot_tol * (op.diag[i] + std::fabs(lambda) * op.mass[i])) {
        collided = true;
        break;
      }
      negative += d < 0.0;
      const std::int32_t p = op.parent[i];
      if (p >= 0) acc[p] += op.w2[i] / d;
    }
    counts[j] = collided ? kCollision : negative;
  }
}

}  // namespace stabletree::simd
