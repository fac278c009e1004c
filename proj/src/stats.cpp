#include "odlab/stats.hpp"

#include <vector>

#include "odlab/errors.hpp"

namespace odlab {

double pairwise_sum(std::span<const double> x) noexcept {
  constexpr std::size_t kBlock = 64;
  if (x.size() <= kBlock) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

Estimate mean_and_se(std::span<const double> x) {
  if (x.empty()) throw ValidationError("cannot estimate a mean from zero samples");
  const double n = static_cast<double>(x.size());
  const double mean = pairwise_sum(x) / n;
  if (x.size() == 1) return {mean, 0.0};
  std::vector<double> dev(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) dev[i] = (x[i] - mean) * (x[i] - mean);
  const double var = pairwise_sum(dev) / (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

}  // namespace odlab
