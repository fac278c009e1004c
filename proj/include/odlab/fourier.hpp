#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "odlab/torus.hpp"

namespace odlab {

using WaveVector = std::array<int, kMaxDim>;
using Matrix = std::array<std::array<double, kMaxDim>, kMaxDim>;
using Tensor3 = std::array<Matrix, kMaxDim>;

/// a cos(2 pi k.q) + b sin(2 pi k.q)
struct FourierTerm {
  WaveVector k{};
  double cos_coef = 0.0;
  double sin_coef = 0.0;

  friend bool operator==(const FourierTerm&, const FourierTerm&) = default;
};

/// Value and derivatives through `order`. Entries beyond the requested order are zero.
struct DerivativeBundle {
  int order = 0;
  double value = 0.0;
  Vec gradient;
  Matrix hessian{};
  Tensor3 third{};

  std::size_t dim() const noexcept { return gradient.size(); }
  double laplacian() const noexcept;
  /// Hess(u, v) = sum_ij H_ij u_i v_j
  double hessian_form(const Vec& u, const Vec& v) const noexcept;
  /// Hess * u
  Vec hessian_apply(const Vec& u) const noexcept;
  /// third(u, u, u)
  double third_form(const Vec& u) const noexcept;
  /// The vector with components third(e_i, u, u).
  Vec third_contract(const Vec& u) const noexcept;
};

/// A real trigonometric polynomial on R^d / Z^d.
///
/// Terms are kept in canonical form: sorted by wave vector, one term per wave
/// vector, and k and -k merged into the representative whose first nonzero
/// component is positive. All derivatives are computed analytically.
class FourierFunction {
 public:
  FourierFunction() = default;
  explicit FourierFunction(std::size_t dim);
  FourierFunction(std::size_t dim, std::vector<FourierTerm> terms);

  static FourierFunction constant(std::size_t dim, double c);

  std::size_t dim() const noexcept { return dim_; }
  std::span<const FourierTerm> terms() const noexcept { return terms_; }
  double constant_term() const noexcept;
  int max_frequency() const noexcept;

  double value(const TorusPosition& q) const;
  Vec gradient(const TorusPosition& q) const;
  /// Writes value and gradient in a single pass. Hot path of the integrators.
  double value_and_gradient(const TorusPosition& q, Vec& grad) const noexcept;
  DerivativeBundle derivatives(const TorusPosition& q, int order) const;

  FourierFunction scaled(double s) const;
  FourierFunction plus_constant(double c) const;
  /// x -> F(m x) for a positive integer m.
  FourierFunction dilated(int m) const;

  friend FourierFunction operator+(const FourierFunction& a, const FourierFunction& b);
  friend bool operator==(const FourierFunction&, const FourierFunction&) = default;

  /// Plain text: one term per line, `k1 ... kd  a_k  b_k`. '#' starts a comment;
  /// ';' also separates terms so a function fits on one line.
  static FourierFunction parse(std::string_view text, std::size_t dim);
  std::string to_text(bool one_line = false) const;

 private:
  void canonicalize();
  void check_dim(const TorusPosition& q) const;

  std::size_t dim_ = 0;
  std::vector<FourierTerm> terms_;
};

DerivativeBundle eval_derivatives(const FourierFunction& f, const TorusPosition& q, int order);

}  // namespace odlab
