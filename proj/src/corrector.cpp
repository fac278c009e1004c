#include "odlab/corrector.hpp"

#include <cmath>
#include <limits>

#include "odlab/csv.hpp"
#include "odlab/errors.hpp"

namespace odlab {

namespace {

void check_phase_point(std::size_t dim, const TorusPosition& q, const Vec& p) {
  if (q.size() != dim || p.size() != dim) throw ValidationError("phase point dimension mismatch");
  if (!p.all_finite()) throw ValidationError("momentum must be finite");
}

PhaseDerivatives combine(const PhaseDerivatives& a, const PhaseDerivatives& b, double wb) {
  PhaseDerivatives out = a;
  out.value += wb * b.value;
  out.grad_q += b.grad_q * wb;
  out.grad_p += b.grad_p * wb;
  out.lap_p += wb * b.lap_p;
  return out;
}

}  // namespace

PhaseDerivatives PositionFunction::derivatives(const TorusPosition& q, const Vec& p) const {
  check_phase_point(f_.dim(), q, p);
  const DerivativeBundle b = f_.derivatives(q, 1);
  return {b.value, b.gradient, Vec(p.size()), 0.0};
}

PhaseDerivatives HamiltonianFunction::derivatives(const TorusPosition& q, const Vec& p) const {
  check_phase_point(v_.dim(), q, p);
  const DerivativeBundle b = v_.derivatives(q, 1);
  return {0.5 * norm_sq(p) + b.value, b.gradient, p, static_cast<double>(p.size())};
}

PerturbedTestFunction::PerturbedTestFunction(TestFunction f, double eps)
    : f_(std::move(f)), eps_(eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ValidationError("perturb: eps must be positive");
}

PhaseDerivatives PerturbedTestFunction::g1_derivatives(const TorusPosition& q, const Vec& p) const {
  check_phase_point(f_.dim(), q, p);
  const DerivativeBundle b = f_.function().derivatives(q, 2);
  return {dot(p, b.gradient), b.hessian_apply(p), b.gradient, 0.0};
}

PhaseDerivatives PerturbedTestFunction::g2_derivatives(const TorusPosition& q, const Vec& p) const {
  check_phase_point(f_.dim(), q, p);
  const DerivativeBundle b = f_.function().derivatives(q, 3);
  return {0.5 * b.hessian_form(p, p), b.third_contract(p) * 0.5, b.hessian_apply(p), b.laplacian()};
}

double PerturbedTestFunction::g1(const TorusPosition& q, const Vec& p) const {
  return g1_derivatives(q, p).value;
}

double PerturbedTestFunction::g2(const TorusPosition& q, const Vec& p) const {
  return g2_derivatives(q, p).value;
}

PhaseDerivatives PerturbedTestFunction::derivatives(const TorusPosition& q, const Vec& p) const {
  const PhaseDerivatives f0 = PositionFunction(f_.function()).derivatives(q, p);
  return combine(combine(f0, g1_derivatives(q, p), eps_), g2_derivatives(q, p), eps_ * eps_);
}

double PerturbedTestFunction::value(const TorusPosition& q, const Vec& p) const {
  return f_.value(q) + eps_ * g1(q, p) + eps_ * eps_ * g2(q, p);
}

PerturbedTestFunction perturb(const TestFunction& f, double eps) {
  return PerturbedTestFunction(f, eps);
}

double apply_langevin_generator(const PhaseDerivatives& g, const Vec& grad_v_eps, double eps,
                                double beta, const Vec& p) {
  const double fast = g.lap_p / beta - dot(p, g.grad_p);
  const double slow = dot(p, g.grad_q) - dot(grad_v_eps, g.grad_p);
  return fast / (eps * eps) + slow / eps;
}

double apply_overdamped_generator(const TestFunction& f, const Potential& v, double beta,
                                  const TorusPosition& q) {
  const DerivativeBundle b = f.function().derivatives(q, 2);
  return -dot(v.gradient(q), b.gradient) + b.laplacian() / beta;
}

double residual_R1(const TestFunction& f, double eps, const TorusPosition& q, const Vec& p) {
  check_phase_point(f.dim(), q, p);
  const DerivativeBundle b = f.function().derivatives(q, 2);
  return std::abs(eps * dot(p, b.gradient) + 0.5 * eps * eps * b.hessian_form(p, p));
}

double closed_form_difference(const TestFunction& f, const Potential& v, const Potential& v_eps,
                              double eps, const TorusPosition& q, const Vec& p) {
  check_phase_point(f.dim(), q, p);
  const DerivativeBundle b = f.function().derivatives(q, 3);
  const Vec grad_v_eps = v_eps.gradient(q);
  const Vec grad_v = v.gradient(q);
  return dot(grad_v - grad_v_eps, b.gradient) +
         eps * (0.5 * b.third_form(p) - b.hessian_form(p, grad_v_eps));
}

GeneratorDifference generator_difference(const TestFunction& f, const Potential& v,
                                         const Potential& v_eps, double eps, double beta,
                                         const TorusPosition& q, const Vec& p) {
  if (!(beta > 0.0)) throw ValidationError("beta must be positive");
  const PerturbedTestFunction fe(f, eps);
  const PhaseDerivatives g = fe.derivatives(q, p);
  const Vec grad_v_eps = v_eps.gradient(q);
  const double lf = apply_overdamped_generator(f, v, beta, q);

  GeneratorDifference out;
  out.direct = apply_langevin_generator(g, grad_v_eps, eps, beta, p) - lf;
  out.closed_form = closed_form_difference(f, v, v_eps, eps, q, p);
  out.scale = (std::abs(g.lap_p / beta) + std::abs(dot(p, g.grad_p))) / (eps * eps) +
              (std::abs(dot(p, g.grad_q)) + std::abs(dot(grad_v_eps, g.grad_p))) / eps +
              std::abs(lf);
  const double tol = 1e-9 + 32.0 * std::numeric_limits<double>::epsilon() * out.scale;
  if (!(std::abs(out.direct - out.closed_form) <= tol)) {
    throw InternalError("generator difference mismatch: direct " + format_real(out.direct) +
                        " vs closed form " + format_real(out.closed_form));
  }
  return out;
}

double residual_R2(const TestFunction& f, const Potential& v, const Potential& v_eps, double eps,
                   double beta, const TorusPosition& q, const Vec& p) {
  return std::abs(generator_difference(f, v, v_eps, eps, beta, q, p).closed_form);
}

double order_minus_one_terms(const TestFunction& f, double beta, const TorusPosition& q,
                             const Vec& p) {
  const PerturbedTestFunction fe(f, 1.0);
  const PhaseDerivatives g1 = fe.g1_derivatives(q, p);
  const Vec grad_f = f.function().gradient(q);
  return dot(p, grad_f) - dot(p, g1.grad_p) + g1.lap_p / beta;
}

double order_zero_terms(const TestFunction& f, const Potential& v, double beta,
                        const TorusPosition& q, const Vec& p) {
  const PerturbedTestFunction fe(f, 1.0);
  const PhaseDerivatives g1 = fe.g1_derivatives(q, p);
  const PhaseDerivatives g2 = fe.g2_derivatives(q, p);
  return dot(p, g1.grad_q) - dot(v.gradient(q), g1.grad_p) - dot(p, g2.grad_p) + g2.lap_p / beta;
}

}  // namespace odlab
