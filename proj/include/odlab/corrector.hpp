#pragma once

#include <string>

#include "odlab/fourier.hpp"
#include "odlab/potentials.hpp"

namespace odlab {

/// The data the Langevin generator consumes from a function g(q, p).
struct PhaseDerivatives {
  double value = 0.0;
  Vec grad_q;
  Vec grad_p;
  double lap_p = 0.0;
};

/// A smooth observable f(q) on the torus.
class TestFunction {
 public:
  TestFunction() = default;
  explicit TestFunction(FourierFunction f, std::string label = "f")
      : f_(std::move(f)), label_(std::move(label)) {}

  const FourierFunction& function() const noexcept { return f_; }
  const std::string& label() const noexcept { return label_; }
  std::size_t dim() const noexcept { return f_.dim(); }
  double value(const TorusPosition& q) const { return f_.value(q); }

  friend bool operator==(const TestFunction&, const TestFunction&) = default;

 private:
  FourierFunction f_;
  std::string label_;
};

/// (q, p) -> f(q), lifted to phase space.
class PositionFunction {
 public:
  explicit PositionFunction(FourierFunction f) : f_(std::move(f)) {}
  PhaseDerivatives derivatives(const TorusPosition& q, const Vec& p) const;

 private:
  FourierFunction f_;
};

/// H(q, p) = |p|^2 / 2 + V(q).
class HamiltonianFunction {
 public:
  explicit HamiltonianFunction(Potential v) : v_(std::move(v)) {}
  PhaseDerivatives derivatives(const TorusPosition& q, const Vec& p) const;

 private:
  Potential v_;
};

/// f_eps(q, p) = f(q) + eps g1(q, p) + eps^2 g2(q, p) with the first-order
/// corrector g1 = p . grad f and the second-order corrector g2 = Hess f(p, p) / 2.
/// The correctors are polynomials in p, so every p-derivative is closed form.
class PerturbedTestFunction {
 public:
  PerturbedTestFunction(TestFunction f, double eps);

  const TestFunction& base() const noexcept { return f_; }
  double eps() const noexcept { return eps_; }

  double value(const TorusPosition& q, const Vec& p) const;
  double g1(const TorusPosition& q, const Vec& p) const;
  double g2(const TorusPosition& q, const Vec& p) const;

  PhaseDerivatives derivatives(const TorusPosition& q, const Vec& p) const;
  PhaseDerivatives g1_derivatives(const TorusPosition& q, const Vec& p) const;
  PhaseDerivatives g2_derivatives(const TorusPosition& q, const Vec& p) const;

 private:
  TestFunction f_;
  double eps_;
};

PerturbedTestFunction perturb(const TestFunction& f, double eps);

/// L_eps g = (beta^-1 lap_p g - p . grad_p g) / eps^2 + (p . grad_q g - grad V_eps . grad_p g) / eps
double apply_langevin_generator(const PhaseDerivatives& g, const Vec& grad_v_eps, double eps,
                                double beta, const Vec& p);

template <class PhaseFunction>
double apply_langevin_generator(const PhaseFunction& g, const Potential& v_eps, double eps,
                                double beta, const TorusPosition& q, const Vec& p) {
  return apply_langevin_generator(g.derivatives(q, p), v_eps.gradient(q), eps, beta, p);
}

/// L f = -grad V . grad f + beta^-1 lap f
double apply_overdamped_generator(const TestFunction& f, const Potential& v, double beta,
                                  const TorusPosition& q);

/// |f(q) - f_eps(q, p)|
double residual_R1(const TestFunction& f, double eps, const TorusPosition& q, const Vec& p);

/// L_eps f_eps - L f computed two ways: through the generators applied to the
/// perturbed test function, and through the closed form
///   (grad V - grad V_eps) . grad f + eps (grad^3 f(p,p,p) / 2 - Hess f(p, grad V_eps)).
struct GeneratorDifference {
  double direct = 0.0;
  double closed_form = 0.0;
  /// Sum of magnitudes of the terms in the direct route; sets the rounding scale.
  double scale = 0.0;
};

/// Throws InternalError when the two routes disagree beyond 1e-9 (plus
/// rounding proportional to `scale` for extreme inputs).
GeneratorDifference generator_difference(const TestFunction& f, const Potential& v,
                                         const Potential& v_eps, double eps, double beta,
                                         const TorusPosition& q, const Vec& p);

double closed_form_difference(const TestFunction& f, const Potential& v, const Potential& v_eps,
                              double eps, const TorusPosition& q, const Vec& p);

/// |L f(q) - L_eps f_eps(q, p)| from the closed form, after cross-checking the direct route.
double residual_R2(const TestFunction& f, const Potential& v, const Potential& v_eps, double eps,
                   double beta, const TorusPosition& q, const Vec& p);

/// The eps^-1 coefficient of L_eps f_eps: p . grad f - p . grad_p g1 + beta^-1 lap_p g1.
/// Vanishes identically for the chosen g1.
double order_minus_one_terms(const TestFunction& f, double beta, const TorusPosition& q,
                             const Vec& p);

/// The eps^0 coefficient: p . grad_q g1 - grad V . grad_p g1 - p . grad_p g2 + beta^-1 lap_p g2.
/// Equals L f for the chosen g2.
double order_zero_terms(const TestFunction& f, const Potential& v, double beta,
                        const TorusPosition& q, const Vec& p);

}  // namespace odlab
