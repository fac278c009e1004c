#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>

namespace odlab {

/// Largest supported torus dimension. Third-derivative tensors are stored
/// dense, so derivative bundles cost O(kMaxDim^3) doubles.
inline constexpr std::size_t kMaxDim = 3;

[[noreturn]] void throw_bad_dimension(std::size_t dim);

/// Small fixed-capacity real vector (dimension 1..kMaxDim).
class Vec {
 public:
  Vec() = default;
  explicit Vec(std::size_t dim) : size_(dim) {
    if (dim == 0 || dim > kMaxDim) throw_bad_dimension(dim);
  }
  Vec(std::initializer_list<double> values);
  static Vec from(std::span<const double> values);

  std::size_t size() const noexcept { return size_; }
  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }
  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  double* begin() noexcept { return data_.data(); }
  double* end() noexcept { return data_.data() + size_; }
  const double* begin() const noexcept { return data_.data(); }
  const double* end() const noexcept { return data_.data() + size_; }
  std::span<const double> span() const noexcept { return {data_.data(), size_}; }

  bool all_finite() const noexcept;

  Vec& operator+=(const Vec& o) noexcept {
    for (std::size_t i = 0; i < size_; ++i) data_[i] += o.data_[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) noexcept {
    for (std::size_t i = 0; i < size_; ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Vec& operator*=(double s) noexcept {
    for (std::size_t i = 0; i < size_; ++i) data_[i] *= s;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) noexcept { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) noexcept { return a -= b; }
  friend Vec operator*(Vec a, double s) noexcept { return a *= s; }
  friend Vec operator*(double s, Vec a) noexcept { return a *= s; }
  friend bool operator==(const Vec& a, const Vec& b) noexcept;

 private:
  std::array<double, kMaxDim> data_{};
  std::size_t size_ = 0;
};

double dot(const Vec& a, const Vec& b) noexcept;
double norm_sq(const Vec& a) noexcept;

using Momentum = Vec;

struct WrapResult;

/// A point of R^d / Z^d. Every coordinate lies in [0, 1).
class TorusPosition {
 public:
  TorusPosition() = default;

  std::size_t size() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const noexcept { return coords_[i]; }
  const Vec& coords() const noexcept { return coords_; }

  friend bool operator==(const TorusPosition&, const TorusPosition&) = default;

 private:
  friend WrapResult wrap_unchecked(const Vec& x) noexcept;
  friend void wrap_accumulate(const Vec& x, TorusPosition& q, Vec& shift) noexcept;
  Vec coords_;
};

/// x = q + shift with q on the torus and shift integer-valued.
struct WrapResult {
  TorusPosition q;
  Vec shift;
};

/// Reduces x mod 1 componentwise; rejects non-finite input.
TorusPosition wrap(const Vec& x);
WrapResult wrap_with_shift(const Vec& x);

namespace detail {
// Splits x = n + frac with n integral and frac in [0, 1).
inline double split_unit(double x, double& frac) noexcept {
  double n = std::floor(x);
  frac = x - n;
  // x slightly below an integer can round up to exactly 1.
  if (frac >= 1.0) {
    frac = 0.0;
    n += 1.0;
  }
  return n;
}
}  // namespace detail

/// Wraps raw coordinates known to be finite; no validation. Used by integrators.
inline WrapResult wrap_unchecked(const Vec& x) noexcept {
  WrapResult r{TorusPosition{}, x};
  r.q.coords_ = x;
  for (std::size_t i = 0; i < x.size(); ++i) r.shift[i] = detail::split_unit(x[i], r.q.coords_[i]);
  return r;
}

/// q = x mod 1, shift += x - q. Same numbers as wrap_unchecked, without temporaries.
inline void wrap_accumulate(const Vec& x, TorusPosition& q, Vec& shift) noexcept {
  q.coords_ = x;
  for (std::size_t i = 0; i < x.size(); ++i) shift[i] += detail::split_unit(x[i], q.coords_[i]);
}

}  // namespace odlab
