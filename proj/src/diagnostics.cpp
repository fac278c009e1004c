#include "odlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "odlab/csv.hpp"
#include "odlab/errors.hpp"

namespace odlab {

namespace {

Vec momentum_at(const Ensemble& e, std::size_t i, std::size_t j) {
  return Vec::from(e.momentum(i, j));
}

void require_momenta(const Ensemble& e, const char* who) {
  if (!e.has_momenta()) throw ValidationError(std::string(who) + ": ensemble has no recorded momenta");
}

// f evaluated on the whole ensemble, time-major: out[j * n_traj + i].
std::vector<double> evaluate_time_major(const Ensemble& e, const FourierFunction& f) {
  std::vector<double> out(e.n_traj() * e.n_times());
  for (std::size_t i = 0; i < e.n_traj(); ++i)
    for (std::size_t j = 0; j < e.n_times(); ++j) out[j * e.n_traj() + i] = f.value(e.position(i, j));
  return out;
}

}  // namespace

double hamiltonian(const TorusPosition& q, const Vec& p, const Potential& v_eps) {
  return 0.5 * norm_sq(p) + v_eps.value(q);
}

double trapezoid(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size()) throw ValidationError("trapezoid: size mismatch");
  double s = 0.0;
  for (std::size_t j = 1; j < t.size(); ++j) s += 0.5 * (t[j] - t[j - 1]) * (y[j] + y[j - 1]);
  return s;
}

MomentReport moment_report(const Ensemble& e, double gamma) {
  require_momenta(e, "moment_report");
  if (!(gamma >= 1.0)) throw ValidationError("moment_report: gamma must be >= 1");
  MomentReport r;
  r.gamma = gamma;
  r.times.assign(e.grid().begin(), e.grid().end());
  std::vector<double> samples(e.n_traj());
  std::vector<double> sup(e.n_traj(), 0.0);
  for (std::size_t j = 0; j < e.n_times(); ++j) {
    for (std::size_t i = 0; i < e.n_traj(); ++i) {
      const double p2 = norm_sq(momentum_at(e, i, j));
      samples[i] = gamma == 1.0 ? p2 : std::pow(p2, gamma);
      sup[i] = std::max(sup[i], p2);
    }
    r.per_time.push_back(mean_and_se(samples));
  }
  r.sup_over_grid = 0.0;
  for (const auto& est : r.per_time) r.sup_over_grid = std::max(r.sup_over_grid, est.mean);
  r.mean_sup = mean_and_se(sup);
  return r;
}

Estimate observable_mean(const Ensemble& e, const FourierFunction& f, std::size_t j) {
  if (f.dim() != e.dim()) throw ValidationError("observable dimension mismatch");
  std::vector<double> v(e.n_traj());
  for (std::size_t i = 0; i < e.n_traj(); ++i) v[i] = f.value(e.position(i, j));
  return mean_and_se(v);
}

WeakErrorTable weak_error(const Ensemble& e_eps, const Ensemble& e_ref,
                          std::span<const TestFunction> fs, std::span<const double> times) {
  if (e_eps.dim() != e_ref.dim()) throw ValidationError("weak_error: dimension mismatch");
  std::vector<std::pair<std::size_t, std::size_t>> idx;
  std::vector<std::string> errors;
  for (double t : times) {
    try {
      idx.emplace_back(e_eps.time_index(t), e_ref.time_index(t));
    } catch (const ValidationError& ex) {
      errors.push_back(std::string("weak_error: mismatched grids: ") + ex.what());
    }
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));

  WeakErrorTable table;
  for (const auto& f : fs) {
    for (std::size_t k = 0; k < times.size(); ++k) {
      const Estimate a = observable_mean(e_eps, f.function(), idx[k].first);
      const Estimate b = observable_mean(e_ref, f.function(), idx[k].second);
      const Estimate d = difference(a, b);
      table.rows.push_back({e_eps.params().eps, f.label(), times[k], d.mean, d.se});
    }
  }
  return table;
}

void LadderSpec::validate() const {
  std::vector<std::string> errors;
  if (times.size() < 2) errors.push_back("ladder needs at least two times (p >= 1)");
  if (!times.empty() && observables.size() + 1 != times.size()) {
    errors.push_back("ladder needs exactly one observable per time except the last");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (times[k] < times[k - 1]) errors.push_back("ladder times must be non-decreasing");
  }
  for (const auto& phi : observables) {
    if (phi.dim() != f.dim()) errors.push_back("ladder observable dimension mismatch");
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
}

std::vector<double> ladder_samples(const Ensemble& e, const LadderSpec& spec,
                                   const PositionOperator& generator_of_f) {
  spec.validate();
  if (spec.f.dim() != e.dim()) throw ValidationError("ladder: dimension mismatch");
  if (spec.times.back() > e.grid().back() + 1e-9) throw ValidationError("ladder time beyond horizon");
  std::vector<std::size_t> idx;
  for (double t : spec.times) idx.push_back(e.time_index(t));
  const std::size_t p = spec.observables.size();
  const std::size_t j0 = idx[p - 1];
  const std::size_t j1 = idx[p];
  const auto grid = e.grid().subspan(j0, j1 - j0 + 1);

  std::vector<double> out(e.n_traj());
  std::vector<double> lf(grid.size());
  for (std::size_t i = 0; i < e.n_traj(); ++i) {
    double weight = 1.0;
    for (std::size_t k = 0; k < p; ++k) weight *= spec.observables[k].value(e.position(i, idx[k]));
    for (std::size_t j = j0; j <= j1; ++j) lf[j - j0] = generator_of_f(e.position(i, j));
    const double increment = spec.f.value(e.position(i, j1)) - spec.f.value(e.position(i, j0));
    out[i] = (increment - trapezoid(grid, lf)) * weight;
  }
  return out;
}

Estimate ladder_statistic(const Ensemble& e, const LadderSpec& spec,
                          const PositionOperator& generator_of_f) {
  return mean_and_se(ladder_samples(e, spec, generator_of_f));
}

std::vector<ModulusPoint> ka_modulus(const Ensemble& e, const TestFunction& f,
                                     std::span<const double> deltas) {
  if (f.dim() != e.dim()) throw ValidationError("ka_modulus: dimension mismatch");
  const double horizon = e.grid().back();
  double max_delta = 0.0;
  for (double d : deltas) {
    if (!(d > 0.0) || !(d < horizon)) throw ValidationError("ka_modulus: need 0 < delta < T");
    max_delta = std::max(max_delta, d);
  }
  const std::size_t n = e.n_traj();
  const std::size_t m = e.n_times();
  const std::vector<double> fv = evaluate_time_major(e, f.function());
  const double tol = 1e-9 * std::max(1.0, horizon);

  // Best pair per lag, then a running maximum over lags.
  struct LagBest {
    double lag;
    double mean;
    double se;
    double t_start;
  };
  std::vector<LagBest> by_lag;
  std::vector<double> sq(n);
  for (std::size_t lag = 1; lag < m; ++lag) {
    if (e.grid()[lag] - e.grid()[0] > max_delta + tol) break;
    LagBest best{e.grid()[lag] - e.grid()[0], -1.0, 0.0, 0.0};
    for (std::size_t j = 0; j + lag < m; ++j) {
      const double* a = fv.data() + j * n;
      const double* b = fv.data() + (j + lag) * n;
      for (std::size_t i = 0; i < n; ++i) sq[i] = (b[i] - a[i]) * (b[i] - a[i]);
      const Estimate est = mean_and_se(sq);
      if (est.mean > best.mean) best = {e.grid()[j + lag] - e.grid()[j], est.mean, est.se, e.grid()[j]};
    }
    by_lag.push_back(best);
  }

  std::vector<ModulusPoint> out;
  for (double d : deltas) {
    ModulusPoint pt{d, 0.0, 0.0, 0.0, 0.0};
    for (const auto& lb : by_lag) {
      if (lb.lag <= d + tol && lb.mean > pt.estimate) {
        pt.estimate = lb.mean;
        pt.se = lb.se;
        pt.t_start = lb.t_start;
        pt.lag = lb.lag;
      }
    }
    out.push_back(pt);
  }
  return out;
}

RestTermReport rest_term_report(const Ensemble& e, const TestFunction& f, const Potential& v,
                                const Potential& v_eps) {
  require_momenta(e, "rest_term_report");
  if (!e.is_langevin()) throw ValidationError("rest_term_report needs a Langevin ensemble");
  const double eps = e.params().eps;
  const double beta = e.params().beta;
  std::vector<double> sup_r1(e.n_traj());
  std::vector<double> int_r2(e.n_traj());
  std::vector<double> r2(e.n_times());
  for (std::size_t i = 0; i < e.n_traj(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < e.n_times(); ++j) {
      const TorusPosition q = e.position(i, j);
      const Vec p = momentum_at(e, i, j);
      s = std::max(s, residual_R1(f, eps, q, p));
      r2[j] = residual_R2(f, v, v_eps, eps, beta, q, p);
    }
    sup_r1[i] = s;
    int_r2[i] = trapezoid(e.grid(), r2);
  }
  return {mean_and_se(sup_r1), mean_and_se(int_r2)};
}

}  // namespace odlab
