#include "odlab/torus.hpp"

#include <cmath>
#include <string>

#include "odlab/errors.hpp"

namespace odlab {

void throw_bad_dimension(std::size_t dim) {
  throw ValidationError("dimension must be in 1.." + std::to_string(kMaxDim) + ", got " + std::to_string(dim));
}

Vec::Vec(std::initializer_list<double> values) : Vec(values.size()) {
  std::size_t i = 0;
  for (double v : values) data_[i++] = v;
}

Vec Vec::from(std::span<const double> values) {
  Vec out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out.data_[i] = values[i];
  return out;
}

bool Vec::all_finite() const noexcept {
  for (std::size_t i = 0; i < size_; ++i) {
    if (!std::isfinite(data_[i])) return false;
  }
  return true;
}

bool operator==(const Vec& a, const Vec& b) noexcept {
  if (a.size_ != b.size_) return false;
  for (std::size_t i = 0; i < a.size_; ++i) {
    if (a.data_[i] != b.data_[i]) return false;
  }
  return true;
}

double dot(const Vec& a, const Vec& b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm_sq(const Vec& a) noexcept { return dot(a, a); }

WrapResult wrap_with_shift(const Vec& x) {
  if (x.size() == 0) throw ValidationError("cannot wrap an empty vector");
  if (!x.all_finite()) throw ValidationError("cannot wrap a non-finite coordinate");
  return wrap_unchecked(x);
}

TorusPosition wrap(const Vec& x) { return wrap_with_shift(x).q; }

}  // namespace odlab
