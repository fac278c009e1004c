#pragma once

#include <cmath>
#include <span>

namespace odlab {

/// A Monte Carlo mean with its standard error.
struct Estimate {
  double mean = 0.0;
  double se = 0.0;
};

/// Pairwise (cascade) summation: rounding error O(log n) and a fixed
/// association order, so results do not depend on how work was scheduled.
double pairwise_sum(std::span<const double> x) noexcept;

/// Sample mean and standard error of the mean (unbiased variance, two-pass).
Estimate mean_and_se(std::span<const double> x);

/// Difference of two independent estimates; SE = sqrt(se_a^2 + se_b^2).
inline Estimate difference(const Estimate& a, const Estimate& b) noexcept {
  return {a.mean - b.mean, std::hypot(a.se, b.se)};
}

}  // namespace odlab
