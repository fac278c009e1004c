#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "odlab/corrector.hpp"
#include "odlab/fourier.hpp"
#include "odlab/integrators.hpp"

namespace odlab {

/// How the Langevin step depends on eps.
struct DtRule {
  enum class Kind { Auto, Scaled, Fixed };
  Kind kind = Kind::Auto;
  double value = 0.0;  // Scaled: dt = value * eps^2; Fixed: dt = value

  double dt_for(double eps) const;
  friend bool operator==(const DtRule&, const DtRule&) = default;
};

/// The law of P_0 as a function of eps: zero, Gibbs (variance 1/beta), or
/// Gaussian with variance `variance * eps^power`.
struct MomentumSpec {
  enum class Kind { Zero, Gibbs, Gaussian };
  Kind kind = Kind::Gibbs;
  double variance = 0.0;
  double power = 0.0;

  MomentumLaw law(double eps, double beta) const;
  /// eps E|P_0|^3 -> 0 as eps -> 0; false for power <= -2/3.
  bool satisfies_moment_hypothesis() const;
  friend bool operator==(const MomentumSpec&, const MomentumSpec&) = default;
};

/// Crystal family alpha(eps), k(eps): either alpha = eps^a, k = ceil(eps^-b)
/// or an explicit table.
struct CrystalRule {
  struct Entry {
    double eps = 0.0;
    double alpha = 0.0;
    int k = 1;
    friend bool operator==(const Entry&, const Entry&) = default;
  };
  FourierFunction chi;
  bool use_table = false;
  double alpha_power = 0.75;
  double k_power = 0.5;
  std::vector<Entry> table;
  bool contrast = true;

  Entry at(double eps) const;
  friend bool operator==(const CrystalRule&, const CrystalRule&) = default;
};

struct ExperimentConfig {
  std::string name = "experiment";
  // [model]
  std::size_t dimension = 1;
  FourierFunction potential;
  double beta = 1.0;
  std::optional<CrystalRule> crystal;
  // [schedule]
  std::vector<double> eps;
  DtRule dt_rule;
  double dt_ref = 1e-4;
  double T = 1.0;
  std::size_t n_traj = 1000;
  std::uint64_t seed = 0;
  double record_interval = 0.0;  // 0: record only t = 0 and t = T
  // [initial]
  PositionLaw q0 = PositionLaw::uniform();
  MomentumSpec p0;
  // [observables]
  std::vector<TestFunction> test_functions;
  std::vector<double> times;  // empty: {T}
  // [ladder]
  std::vector<std::vector<double>> ladders;
  FourierFunction ladder_phi;
  std::string ladder_f;  // label of a test function; empty: the first
  // [modulus]
  std::vector<double> deltas;
  // [moments]
  std::vector<double> gammas{1.0, 1.5};
  // [residuals]
  std::size_t residual_points = 1000;
  double residual_p_scale = 1.0;
  std::string residual_f;

  /// Every violation, not just the first. Throws ValidationError if any.
  void validate(bool allow_heavy_tails = false) const;

  Potential base_potential() const;
  /// V_eps: the crystal family when configured, otherwise V.
  Potential potential_for(double eps) const;
  ScalingParams langevin_params(double eps) const;
  ScalingParams reference_params() const;
  std::vector<double> eval_times() const;
  const TestFunction& test_function(std::string_view label) const;

  /// Canonical text form; parse_config_text(to_text()) reproduces the config.
  std::string to_text() const;
  std::uint64_t hash() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses the sectioned key-value format. `base_dir` resolves *_file keys.
/// Unknown sections or keys are errors. Throws ValidationError listing every problem.
ExperimentConfig parse_config_text(std::string_view text, const std::filesystem::path& base_dir = {},
                                   bool allow_heavy_tails = false);
ExperimentConfig parse_config(const std::filesystem::path& path, bool allow_heavy_tails = false);

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace odlab
