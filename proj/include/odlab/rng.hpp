#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace odlab {

/// Philox4x32-10 counter-based block cipher (Salmon et al., Random123).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;
PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept;

/// Identifies one independent stream: the global seed and the trajectory index.
struct RngStreamSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream_index = 0;

  friend bool operator==(const RngStreamSpec&, const RngStreamSpec&) = default;
};

/// Standard normal quantile, accurate to double precision on (0, 1).
double inverse_normal_cdf(double u);

/// Sequential view of the pure map (seed, stream_index, draw#) -> value.
///
/// Draw n uses 64 bits of Philox block n/2. Uniform and normal draws consume one
/// draw number each, so the value at a given position never depends on how the
/// stream was consumed before.
class NormalStream {
 public:
  explicit NormalStream(RngStreamSpec spec) noexcept;

  /// Uniform on the open interval (0, 1).
  double next_uniform() noexcept {
    const std::uint64_t n = next_++;
    if ((n >> 1) != cached_block_) refill(n >> 1);
    return (static_cast<double>(cached_[n & 1] >> 11) + 0.5) * 0x1.0p-53;
  }
  double next_normal() noexcept { return inverse_normal_cdf(next_uniform()); }
  void fill_normal(std::span<double> out) noexcept;

  std::uint64_t position() const noexcept { return next_; }
  const RngStreamSpec& spec() const noexcept { return spec_; }

  static double uniform_at(RngStreamSpec spec, std::uint64_t n) noexcept;
  static double normal_at(RngStreamSpec spec, std::uint64_t n) noexcept;

 private:
  void refill(std::uint64_t block) noexcept;

  RngStreamSpec spec_;
  std::uint64_t next_ = 0;
  std::uint64_t cached_block_ = ~std::uint64_t{0};
  std::array<std::uint64_t, 2> cached_{};
};

NormalStream make_stream(const RngStreamSpec& spec) noexcept;

/// Derives an independent seed for a named sub-experiment (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept;

}  // namespace odlab
