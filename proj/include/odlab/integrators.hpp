#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <variant>
#include <vector>

#include "odlab/potentials.hpp"
#include "odlab/rng.hpp"
#include "odlab/torus.hpp"

namespace odlab {

/// Scale separation eps, inverse temperature beta, step dt and horizon T.
///
/// The horizon is split into n_steps() equal steps; when T/dt is not an integer
/// the step is shortened to effective_dt() = T / ceil(T/dt).
struct ScalingParams {
  double eps = 1.0;
  double beta = 1.0;
  double dt = 1e-3;
  double T = 1.0;

  void validate() const;
  std::size_t n_steps() const;
  double effective_dt() const;

  /// min(0.1 eps^2, 1e-3): resolves the 1/eps Hamiltonian drift.
  static double default_dt(double eps);

  friend bool operator==(const ScalingParams&, const ScalingParams&) = default;
};

/// (q, p) at time t. `shift` is the integer lattice offset so that q + shift
/// is the unwrapped position.
struct PhaseState {
  TorusPosition q;
  Momentum p;
  double t = 0.0;
  Vec shift;

  Vec unwrapped() const { return q.coords() + shift; }
};

/// B(dt/2) A(dt/2) O(dt) A(dt/2) B(dt/2) splitting of the scaled Langevin SDE
///   dQ = P/eps dt,  dP = -grad V_eps(Q)/eps dt - P/eps^2 dt + sqrt(2/beta)/eps dW.
/// The O substep is the exact Ornstein-Uhlenbeck flow, so the 1/eps^2 stiffness
/// never constrains dt.
class LangevinIntegrator {
 public:
  LangevinIntegrator(const Potential& v_eps, const ScalingParams& sp);

  /// Advances one step of length dt (the given step, not effective_dt()).
  void step(PhaseState& s, std::span<const double> xi) const noexcept;
  /// The same step with the O substep removed (B A A B): velocity Verlet for
  /// the Hamiltonian part alone.
  void hamiltonian_step(PhaseState& s) const noexcept;

  double damping() const noexcept { return damping_; }
  double noise_scale() const noexcept { return noise_; }

 private:
  void advance(PhaseState& s, std::span<const double> xi, bool thermostat) const noexcept;

  FourierFunction force_;
  double dt_;
  double half_kick_;   // dt / (2 eps)
  double half_drift_;  // dt / (2 eps)
  double damping_;     // exp(-dt / eps^2)
  double noise_;       // sqrt((1 - damping^2) / beta)
};

/// Euler-Maruyama for dQ = -grad V(Q) dt + sqrt(2/beta) dB.
class OverdampedIntegrator {
 public:
  OverdampedIntegrator(const Potential& v, const ScalingParams& sp);

  void step(TorusPosition& q, Vec& shift, std::span<const double> xi) const noexcept;

 private:
  FourierFunction force_;
  double dt_;
  double noise_;  // sqrt(2 dt / beta)
};

PhaseState langevin_step(const PhaseState& s, const Potential& v_eps, const ScalingParams& sp,
                         std::span<const double> xi);
TorusPosition overdamped_step(const TorusPosition& q, const Potential& v, const ScalingParams& sp,
                              std::span<const double> xi);

struct PositionLaw {
  enum class Kind { Point, Uniform };
  Kind kind = Kind::Point;
  TorusPosition point;

  static PositionLaw at(TorusPosition q) { return {Kind::Point, std::move(q)}; }
  static PositionLaw uniform() { return {Kind::Uniform, {}}; }
  friend bool operator==(const PositionLaw&, const PositionLaw&) = default;
};

/// Law of P_0: zero, or centered Gaussian with covariance variance * I.
struct MomentumLaw {
  enum class Kind { Zero, Gaussian };
  Kind kind = Kind::Zero;
  double variance = 0.0;

  static MomentumLaw zero() { return {Kind::Zero, 0.0}; }
  static MomentumLaw gaussian(double variance) { return {Kind::Gaussian, variance}; }
  friend bool operator==(const MomentumLaw&, const MomentumLaw&) = default;
};

struct InitialLaw {
  PositionLaw position;
  MomentumLaw momentum;
};

struct LangevinProcess {
  Potential potential;  // V_eps
  InitialLaw initial;
};

struct OverdampedProcess {
  Potential potential;  // V
  InitialLaw initial;   // momentum law ignored
};

using Process = std::variant<LangevinProcess, OverdampedProcess>;

struct SimulationOptions {
  std::size_t n_traj = 1;
  std::uint64_t seed = 0;
  std::size_t output_stride = 1;
  bool record_momenta = true;
  unsigned workers = 1;
  /// Test hook: every noise increment is replaced by zero.
  bool zero_noise = false;
  std::size_t memory_limit_bytes = std::size_t{3} << 30;
};

/// Trajectories sampled on a common grid.
///
/// Storage is trajectory-major: position(i, j) is trajectory i at grid index j.
class Ensemble {
 public:
  Ensemble() = default;
  /// Assembles an ensemble from raw arrays (n_traj x n_times x dim, row-major).
  /// `momenta` may be empty; `displacements` (n_traj x dim) may be empty.
  Ensemble(std::size_t dim, std::vector<double> grid, ScalingParams params, std::uint64_t seed,
           bool langevin, std::vector<double> positions, std::vector<double> momenta,
           std::vector<double> displacements = {});

  std::size_t dim() const noexcept { return dim_; }
  std::size_t n_traj() const noexcept { return n_traj_; }
  std::size_t n_times() const noexcept { return grid_.size(); }
  std::span<const double> grid() const noexcept { return grid_; }
  const ScalingParams& params() const noexcept { return params_; }
  std::uint64_t seed() const noexcept { return seed_; }
  bool is_langevin() const noexcept { return langevin_; }
  bool has_momenta() const noexcept { return !momenta_.empty(); }
  bool has_displacements() const noexcept { return !displacements_.empty(); }

  TorusPosition position(std::size_t traj, std::size_t time) const;
  std::span<const double> position_coords(std::size_t traj, std::size_t time) const noexcept {
    return {positions_.data() + (traj * grid_.size() + time) * dim_, dim_};
  }
  std::span<const double> momentum(std::size_t traj, std::size_t time) const;
  /// Unwrapped Q_T - Q_0 of trajectory `traj`.
  std::span<const double> displacement(std::size_t traj) const;

  /// Grid index of time t; throws ValidationError if t is not a grid point.
  std::size_t time_index(double t) const;

  /// Header `traj,t,q1..qd[,p1..pd]`, rows by trajectory then time.
  void write_csv(std::ostream& out) const;
  std::vector<std::string> csv_columns() const;

  friend bool operator==(const Ensemble&, const Ensemble&) = default;

 private:
  friend Ensemble simulate_ensemble(const Process&, const ScalingParams&, const SimulationOptions&);

  std::size_t dim_ = 0;
  std::size_t n_traj_ = 0;
  std::vector<double> grid_;
  ScalingParams params_;
  std::uint64_t seed_ = 0;
  bool langevin_ = false;
  std::vector<double> positions_;
  std::vector<double> momenta_;
  std::vector<double> displacements_;
};

/// Simulates n_traj independent trajectories. Trajectory i draws from the stream
/// (seed, i): first the initial position (d uniforms, if uniform), then the
/// initial momentum (d normals, Langevin with Gaussian P_0), then d normals per
/// step. Output is identical for any worker count.
Ensemble simulate_ensemble(const Process& process, const ScalingParams& sp,
                           const SimulationOptions& opts);

}  // namespace odlab
