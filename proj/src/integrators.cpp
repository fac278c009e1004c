#include "odlab/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <thread>

#include "odlab/csv.hpp"
#include "odlab/errors.hpp"

namespace odlab {

void ScalingParams::validate() const {
  std::vector<std::string> errors;
  if (!(eps > 0.0) || !std::isfinite(eps)) errors.push_back("eps must be positive");
  if (!(beta > 0.0) || !std::isfinite(beta)) errors.push_back("beta must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) errors.push_back("dt must be positive");
  if (!(T > 0.0) || !std::isfinite(T)) errors.push_back("T must be positive");
  if (errors.empty() && dt > T) errors.push_back("dt must not exceed T");
  if (!errors.empty()) throw ValidationError(std::move(errors));
}

std::size_t ScalingParams::n_steps() const {
  validate();
  // Tolerate T/dt landing a hair above an integer through rounding.
  const double ratio = T / dt;
  const double nearest = std::round(ratio);
  const double n = std::abs(ratio - nearest) <= 1e-9 * nearest ? nearest : std::ceil(ratio);
  return static_cast<std::size_t>(std::max(1.0, n));
}

double ScalingParams::effective_dt() const { return T / static_cast<double>(n_steps()); }

double ScalingParams::default_dt(double eps) { return std::min(0.1 * eps * eps, 1e-3); }

LangevinIntegrator::LangevinIntegrator(const Potential& v_eps, const ScalingParams& sp)
    : force_(v_eps.function()) {
  sp.validate();
  dt_ = sp.dt;
  half_kick_ = 0.5 * sp.dt / sp.eps;
  half_drift_ = 0.5 * sp.dt / sp.eps;
  damping_ = std::exp(-sp.dt / (sp.eps * sp.eps));
  noise_ = std::sqrt(-std::expm1(-2.0 * sp.dt / (sp.eps * sp.eps)) / sp.beta);
}

void LangevinIntegrator::step(PhaseState& s, std::span<const double> xi) const noexcept { advance(s, xi, true); }

void LangevinIntegrator::hamiltonian_step(PhaseState& s) const noexcept { advance(s, {}, false); }

void LangevinIntegrator::advance(PhaseState& s, std::span<const double> xi, bool thermostat) const noexcept {
  const std::size_t d = s.p.size();
  Vec grad(d);
  Vec x(d);

  force_.value_and_gradient(s.q, grad);
  for (std::size_t i = 0; i < d; ++i) s.p[i] -= half_kick_ * grad[i];

  for (std::size_t i = 0; i < d; ++i) x[i] = s.q[i] + half_drift_ * s.p[i];
  wrap_accumulate(x, s.q, s.shift);

  if (thermostat) {
    for (std::size_t i = 0; i < d; ++i) s.p[i] = damping_ * s.p[i] + noise_ * xi[i];
  }

  for (std::size_t i = 0; i < d; ++i) x[i] = s.q[i] + half_drift_ * s.p[i];
  wrap_accumulate(x, s.q, s.shift);

  force_.value_and_gradient(s.q, grad);
  for (std::size_t i = 0; i < d; ++i) s.p[i] -= half_kick_ * grad[i];

  s.t += dt_;
}

OverdampedIntegrator::OverdampedIntegrator(const Potential& v, const ScalingParams& sp)
    : force_(v.function()) {
  sp.validate();
  dt_ = sp.dt;
  noise_ = std::sqrt(2.0 * sp.dt / sp.beta);
}

void OverdampedIntegrator::step(TorusPosition& q, Vec& shift,
                                std::span<const double> xi) const noexcept {
  const std::size_t d = q.size();
  Vec x = q.coords();
  if (force_.terms().empty()) {
    for (std::size_t i = 0; i < d; ++i) x[i] += noise_ * xi[i];
  } else {
    Vec grad(d);
    force_.value_and_gradient(q, grad);
    for (std::size_t i = 0; i < d; ++i) x[i] = x[i] - dt_ * grad[i] + noise_ * xi[i];
  }
  wrap_accumulate(x, q, shift);
}

PhaseState langevin_step(const PhaseState& s, const Potential& v_eps, const ScalingParams& sp,
                         std::span<const double> xi) {
  if (s.q.size() != v_eps.dim() || s.p.size() != v_eps.dim() || xi.size() != v_eps.dim()) {
    throw ValidationError("langevin_step: dimension mismatch");
  }
  if (!s.p.all_finite()) throw ValidationError("langevin_step: momentum must be finite");
  PhaseState out = s;
  if (out.shift.size() != s.q.size()) out.shift = Vec(s.q.size());
  LangevinIntegrator(v_eps, sp).step(out, xi);
  return out;
}

TorusPosition overdamped_step(const TorusPosition& q, const Potential& v, const ScalingParams& sp,
                              std::span<const double> xi) {
  if (q.size() != v.dim() || xi.size() != v.dim()) {
    throw ValidationError("overdamped_step: dimension mismatch");
  }
  TorusPosition out = q;
  Vec shift(q.size());
  OverdampedIntegrator(v, sp).step(out, shift, xi);
  return out;
}

Ensemble::Ensemble(std::size_t dim, std::vector<double> grid, ScalingParams params,
                   std::uint64_t seed, bool langevin, std::vector<double> positions,
                   std::vector<double> momenta, std::vector<double> displacements)
    : dim_(dim),
      grid_(std::move(grid)),
      params_(params),
      seed_(seed),
      langevin_(langevin),
      positions_(std::move(positions)),
      momenta_(std::move(momenta)),
      displacements_(std::move(displacements)) {
  if (dim_ == 0 || dim_ > kMaxDim) throw ValidationError("ensemble dimension out of range");
  if (grid_.empty()) throw ValidationError("ensemble grid is empty");
  for (std::size_t j = 1; j < grid_.size(); ++j) {
    if (!(grid_[j] > grid_[j - 1])) throw ValidationError("ensemble grid must be strictly increasing");
  }
  const std::size_t per_traj = grid_.size() * dim_;
  if (positions_.size() % per_traj != 0) throw ValidationError("positions array has the wrong size");
  n_traj_ = positions_.size() / per_traj;
  if (!momenta_.empty() && momenta_.size() != positions_.size()) {
    throw ValidationError("momenta array must match positions");
  }
  if (!displacements_.empty() && displacements_.size() != n_traj_ * dim_) {
    throw ValidationError("displacements array has the wrong size");
  }
  for (double x : positions_) {
    if (!(x >= 0.0 && x < 1.0)) throw ValidationError("positions must lie in [0,1)");
  }
}

TorusPosition Ensemble::position(std::size_t traj, std::size_t time) const {
  return wrap_unchecked(Vec::from(position_coords(traj, time))).q;
}

std::span<const double> Ensemble::momentum(std::size_t traj, std::size_t time) const {
  if (momenta_.empty()) throw ValidationError("ensemble has no recorded momenta");
  return {momenta_.data() + (traj * grid_.size() + time) * dim_, dim_};
}

std::span<const double> Ensemble::displacement(std::size_t traj) const {
  if (displacements_.empty()) throw ValidationError("ensemble has no recorded displacements");
  return {displacements_.data() + traj * dim_, dim_};
}

std::size_t Ensemble::time_index(double t) const {
  const double tol = 1e-9 * std::max(1.0, grid_.back());
  auto it = std::lower_bound(grid_.begin(), grid_.end(), t - tol);
  if (it == grid_.end() || std::abs(*it - t) > tol) {
    throw ValidationError("time " + format_real(t) + " is not on the output grid");
  }
  return static_cast<std::size_t>(it - grid_.begin());
}

std::vector<std::string> Ensemble::csv_columns() const {
  std::vector<std::string> cols{"traj", "t"};
  for (std::size_t i = 0; i < dim_; ++i) cols.push_back("q" + std::to_string(i + 1));
  if (has_momenta()) {
    for (std::size_t i = 0; i < dim_; ++i) cols.push_back("p" + std::to_string(i + 1));
  }
  return cols;
}

void Ensemble::write_csv(std::ostream& out) const {
  CsvWriter w(out, csv_columns());
  for (std::size_t i = 0; i < n_traj_; ++i) {
    for (std::size_t j = 0; j < grid_.size(); ++j) {
      w.cell(static_cast<std::int64_t>(i)).cell(grid_[j]);
      for (double x : position_coords(i, j)) w.cell(x);
      if (has_momenta()) {
        for (double x : momentum(i, j)) w.cell(x);
      }
      w.end_row();
    }
  }
}

namespace {

struct ProcessView {
  const Potential* potential;
  const InitialLaw* initial;
  bool langevin;
};

ProcessView view(const Process& p) {
  return std::visit(
      [](const auto& proc) {
        using T = std::decay_t<decltype(proc)>;
        return ProcessView{&proc.potential, &proc.initial, std::is_same_v<T, LangevinProcess>};
      },
      p);
}

}  // namespace

Ensemble simulate_ensemble(const Process& process, const ScalingParams& sp,
                           const SimulationOptions& opts) {
  const ProcessView pv = view(process);
  const std::size_t d = pv.potential->dim();
  sp.validate();
  std::vector<std::string> errors;
  if (opts.n_traj == 0) errors.push_back("n_traj must be positive");
  if (opts.output_stride == 0) errors.push_back("output_stride must be positive");
  if (opts.workers == 0) errors.push_back("workers must be positive");
  const auto& init = *pv.initial;
  if (init.position.kind == PositionLaw::Kind::Point && init.position.point.size() != d) {
    errors.push_back("initial position has the wrong dimension");
  }
  if (pv.langevin && init.momentum.kind == MomentumLaw::Kind::Gaussian &&
      !(init.momentum.variance >= 0.0 && std::isfinite(init.momentum.variance))) {
    errors.push_back("initial momentum variance must be finite and non-negative");
  }
  const std::size_t n_steps = sp.n_steps();
  if (opts.output_stride > 0 && n_steps % opts.output_stride != 0) {
    errors.push_back("output_stride " + std::to_string(opts.output_stride) +
                     " does not divide the step count " + std::to_string(n_steps));
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));

  const std::size_t n_times = n_steps / opts.output_stride + 1;
  const bool record_p = pv.langevin && opts.record_momenta;
  const double cells = static_cast<double>(opts.n_traj) * static_cast<double>(n_times) *
                       static_cast<double>(d);
  const double bytes = cells * sizeof(double) * (record_p ? 2.0 : 1.0) +
                       static_cast<double>(opts.n_traj * d) * sizeof(double);
  if (bytes > static_cast<double>(opts.memory_limit_bytes)) {
    throw ResourceError("ensemble would need " + format_real(bytes / (1 << 20)) +
                        " MiB, above the limit of " +
                        std::to_string(opts.memory_limit_bytes >> 20) + " MiB");
  }

  ScalingParams eff = sp;
  eff.dt = sp.effective_dt();

  Ensemble e;
  e.dim_ = d;
  e.n_traj_ = opts.n_traj;
  e.params_ = eff;
  e.seed_ = opts.seed;
  e.langevin_ = pv.langevin;
  e.grid_.resize(n_times);
  for (std::size_t j = 0; j < n_times; ++j) {
    e.grid_[j] = static_cast<double>(j * opts.output_stride) * sp.T / static_cast<double>(n_steps);
  }
  e.positions_.assign(opts.n_traj * n_times * d, 0.0);
  if (record_p) e.momenta_.assign(opts.n_traj * n_times * d, 0.0);
  e.displacements_.assign(opts.n_traj * d, 0.0);

  const std::optional<LangevinIntegrator> langevin =
      pv.langevin ? std::optional<LangevinIntegrator>(std::in_place, *pv.potential, eff) : std::nullopt;
  const std::optional<OverdampedIntegrator> overdamped =
      pv.langevin ? std::nullopt : std::optional<OverdampedIntegrator>(std::in_place, *pv.potential, eff);

  auto run_trajectory = [&](std::size_t i) {
    NormalStream rng(RngStreamSpec{opts.seed, i});
    PhaseState s;
    Vec start(d);
    if (init.position.kind == PositionLaw::Kind::Uniform) {
      for (std::size_t k = 0; k < d; ++k) start[k] = rng.next_uniform();
    } else {
      start = init.position.point.coords();
    }
    s.q = wrap_unchecked(start).q;
    s.shift = Vec(d);
    s.p = Vec(d);
    if (pv.langevin && init.momentum.kind == MomentumLaw::Kind::Gaussian) {
      const double sd = std::sqrt(init.momentum.variance);
      for (std::size_t k = 0; k < d; ++k) s.p[k] = sd * rng.next_normal();
    }
    const Vec q0 = s.q.coords();

    auto record = [&](std::size_t j) {
      double* qdst = e.positions_.data() + (i * n_times + j) * d;
      for (std::size_t k = 0; k < d; ++k) qdst[k] = s.q[k];
      if (record_p) {
        double* pdst = e.momenta_.data() + (i * n_times + j) * d;
        for (std::size_t k = 0; k < d; ++k) pdst[k] = s.p[k];
      }
    };
    record(0);

    std::array<double, kMaxDim> xi{};
    std::span<const double> xs(xi.data(), d);
    std::size_t until_record = opts.output_stride;
    std::size_t j = 0;
    for (std::size_t n = 1; n <= n_steps; ++n) {
      for (std::size_t k = 0; k < d; ++k) xi[k] = rng.next_normal();
      if (opts.zero_noise) xi.fill(0.0);
      if (langevin) {
        langevin->step(s, xs);
      } else {
        overdamped->step(s.q, s.shift, xs);
      }
      if (--until_record == 0) {
        record(++j);
        until_record = opts.output_stride;
      }
    }
    const Vec disp = s.unwrapped() - q0;
    for (std::size_t k = 0; k < d; ++k) e.displacements_[i * d + k] = disp[k];
  };

  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(opts.workers, opts.n_traj));
  if (workers <= 1) {
    for (std::size_t i = 0; i < opts.n_traj; ++i) run_trajectory(i);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < opts.n_traj; i += workers) run_trajectory(i);
      });
    }
  }
  return e;
}

}  // namespace odlab
