#pragma once

#include <functional>
#include <string>

#include "odlab/fourier.hpp"

namespace odlab {

/// Potential energy V on the torus.
class Potential {
 public:
  Potential() = default;
  explicit Potential(FourierFunction base, std::string label = "V");

  std::size_t dim() const noexcept { return base_.dim(); }
  const FourierFunction& function() const noexcept { return base_; }
  const std::string& label() const noexcept { return label_; }

  double value(const TorusPosition& q) const { return base_.value(q); }
  Vec gradient(const TorusPosition& q) const { return base_.gradient(q); }
  DerivativeBundle derivatives(const TorusPosition& q, int order) const {
    return base_.derivatives(q, order);
  }

  /// Same potential shifted by a constant so that min V = 0. Gradients are unchanged.
  Potential shifted_to_min_zero() const;

 private:
  FourierFunction base_;
  std::string label_;
};

/// V_eps(q) = V(q) + alpha * chi(k q): a fine periodic crystal superposed on V.
class CrystalPotential {
 public:
  CrystalPotential(Potential base, FourierFunction chi, double alpha, int k);

  std::size_t dim() const noexcept { return base_.dim(); }
  const Potential& base() const noexcept { return base_; }
  const FourierFunction& chi() const noexcept { return chi_; }
  double alpha() const noexcept { return alpha_; }
  int k() const noexcept { return k_; }

  /// Value (order 0) or value and gradient (order 1) through the composition
  /// chi(wrap(k q)).
  DerivativeBundle eval(const TorusPosition& q, int order) const;

  /// The same function as a single Fourier series (wave vectors of chi scaled by k).
  Potential expanded() const;

 private:
  Potential base_;
  FourierFunction chi_;
  double alpha_;
  int k_;
};

DerivativeBundle crystal_eval(const CrystalPotential& c, const TorusPosition& q, int order);

struct Extremum {
  TorusPosition at;
  double value = 0.0;
};

/// Maximizes a smooth periodic function by a dense grid scan followed by
/// golden-section polishing along coordinate lines. Grid resolution per
/// dimension: 2^14 (d=1), 2^9 (d=2), 2^6 (d=3).
Extremum maximize_on_torus(const std::function<double(const TorusPosition&)>& g, std::size_t dim);

/// max V - min V over the torus.
double oscillation(const FourierFunction& v);
double oscillation(const Potential& v);
double oscillation(const CrystalPotential& v);

/// sup_q |grad V_eps(q) - grad V(q)|
double sup_grad_distance(const CrystalPotential& v_eps, const Potential& v);
double sup_grad_distance(const Potential& a, const Potential& b);

/// sup_q of the Frobenius norm of Hess F(q).
double sup_hessian_norm(const FourierFunction& f);

}  // namespace odlab
