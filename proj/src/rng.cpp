#include "odlab/rng.hpp"

#include <gsl/gsl_cdf.h>

namespace odlab {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline double to_open_unit(std::uint64_t w) {
  return (static_cast<double>(w >> 11) + 0.5) * 0x1.0p-53;
}

std::array<std::uint64_t, 2> block(const RngStreamSpec& spec, std::uint64_t b) {
  const PhiloxCounter ctr{static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                          static_cast<std::uint32_t>(spec.stream_index),
                          static_cast<std::uint32_t>(spec.stream_index >> 32)};
  const PhiloxKey key{static_cast<std::uint32_t>(spec.seed),
                      static_cast<std::uint32_t>(spec.seed >> 32)};
  const PhiloxCounter out = philox4x32_10(ctr, key);
  return {(static_cast<std::uint64_t>(out[1]) << 32) | out[0],
          (static_cast<std::uint64_t>(out[3]) << 32) | out[2]};
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept {
  std::uint32_t c0 = ctr[0], c1 = ctr[1], c2 = ctr[2], c3 = ctr[3];
  std::uint32_t k0 = key[0], k1 = key[1];
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c0, hi0, lo0);
    mulhilo(kMul1, c2, hi1, lo1);
    c0 = hi1 ^ c1 ^ k0;
    c1 = lo1;
    c2 = hi0 ^ c3 ^ k1;
    c3 = lo0;
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return {c0, c1, c2, c3};
}

double inverse_normal_cdf(double u) {
  // Wichura's AS241 rational approximation, relative error ~1e-16.
  return gsl_cdf_ugaussian_Pinv(u);
}

NormalStream::NormalStream(RngStreamSpec spec) noexcept : spec_(spec) {}

void NormalStream::refill(std::uint64_t b) noexcept {
  cached_ = block(spec_, b);
  cached_block_ = b;
}

void NormalStream::fill_normal(std::span<double> out) noexcept {
  for (double& x : out) x = next_normal();
}

double NormalStream::uniform_at(RngStreamSpec spec, std::uint64_t n) noexcept {
  return to_open_unit(block(spec, n >> 1)[n & 1]);
}

double NormalStream::normal_at(RngStreamSpec spec, std::uint64_t n) noexcept {
  return inverse_normal_cdf(uniform_at(spec, n));
}

NormalStream make_stream(const RngStreamSpec& spec) noexcept { return NormalStream(spec); }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (tag + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace odlab
