#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "odlab/corrector.hpp"
#include "odlab/integrators.hpp"
#include "odlab/stats.hpp"

namespace odlab {

/// H(q, p) = |p|^2 / 2 + V_eps(q); V_eps is expected to be shifted to min 0.
double hamiltonian(const TorusPosition& q, const Vec& p, const Potential& v_eps);

/// Momentum moments E|P_t|^{2 gamma} on the output grid and the mean grid
/// supremum E[max_j |P_{t_j}|^2]. Grid maxima are lower bounds for the
/// continuous-time supremum.
struct MomentReport {
  double gamma = 1.0;
  std::vector<double> times;
  std::vector<Estimate> per_time;
  double sup_over_grid = 0.0;
  Estimate mean_sup;
};

MomentReport moment_report(const Ensemble& e, double gamma);

struct WeakErrorRow {
  double eps = 0.0;
  std::string label;
  double t = 0.0;
  double estimate = 0.0;  // E f(Q^eps_t) - E f(Q_t)
  double se = 0.0;        // sqrt(se_eps^2 + se_ref^2)
};

struct WeakErrorTable {
  std::vector<WeakErrorRow> rows;
};

/// Ensemble mean of f at grid index j.
Estimate observable_mean(const Ensemble& e, const FourierFunction& f, std::size_t j);

WeakErrorTable weak_error(const Ensemble& e_eps, const Ensemble& e_ref,
                          std::span<const TestFunction> fs, std::span<const double> times);

/// Ladder t_1 <= ... <= t_{p+1} with bounded observables phi_1..phi_p.
struct LadderSpec {
  std::vector<double> times;
  std::vector<FourierFunction> observables;
  TestFunction f;

  void validate() const;
};

using PositionOperator = std::function<double(const TorusPosition&)>;

/// Per-trajectory values of
///   (f(Q_{t_{p+1}}) - f(Q_{t_p}) - int_{t_p}^{t_{p+1}} Lf(Q_s) ds) * prod_k phi_k(Q_{t_k}),
/// the integral taken by the trapezoid rule on the output grid.
std::vector<double> ladder_samples(const Ensemble& e, const LadderSpec& spec,
                                   const PositionOperator& generator_of_f);

Estimate ladder_statistic(const Ensemble& e, const LadderSpec& spec,
                          const PositionOperator& generator_of_f);

/// sup over grid pairs (t, t+h), 0 < h <= delta, of E[(f(Q_{t+h}) - f(Q_t))^2].
/// Unconditional proxy for the conditional increments in the Kurtz-Aldous bound.
struct ModulusPoint {
  double delta = 0.0;
  double estimate = 0.0;
  double se = 0.0;  // at the maximizing pair
  double t_start = 0.0;
  double lag = 0.0;
};

std::vector<ModulusPoint> ka_modulus(const Ensemble& e, const TestFunction& f,
                                     std::span<const double> deltas);

/// E[max_j R1(t_j)] and E[int_0^T R2 dt] (trapezoid) over a Langevin ensemble.
struct RestTermReport {
  Estimate sup_r1;
  Estimate integral_r2;
};

RestTermReport rest_term_report(const Ensemble& e, const TestFunction& f, const Potential& v,
                                const Potential& v_eps);

/// Trapezoid rule for samples y on the grid t.
double trapezoid(std::span<const double> t, std::span<const double> y);

}  // namespace odlab
