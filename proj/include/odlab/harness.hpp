#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "odlab/config.hpp"
#include "odlab/diagnostics.hpp"

namespace odlab {

enum class Subcommand { Simulate, Residuals, Converge, Moments, Ladder, Modulus, RestTerms, Crystal };

std::optional<Subcommand> parse_subcommand(std::string_view name);
std::string_view subcommand_name(Subcommand s);
const std::vector<std::string>& subcommand_names();

struct RunOptions {
  std::filesystem::path out_dir = "out";
  unsigned workers = 1;
};

struct RunResult {
  std::filesystem::path dir;
  std::vector<std::string> files;
};

/// Runs one recipe and writes `out_dir/<subcommand>/<config name>/` containing
/// the CSV artifacts and a `manifest`. Files are staged in a sibling directory
/// and moved into place only on success, so a failed run leaves nothing behind.
RunResult run(Subcommand sub, const ExperimentConfig& config, const RunOptions& opts);

/// Stream seeds: each ensemble of a run gets its own derived seed.
namespace seed_tag {
inline constexpr std::uint64_t kReference = 0;
inline constexpr std::uint64_t kLangevin = 1;        // + eps index
inline constexpr std::uint64_t kCrystalContrast = 1001;  // + eps index
inline constexpr std::uint64_t kResiduals = 2001;    // + eps index
}  // namespace seed_tag

/// Output stride for a requested recording interval (0: endpoints only).
std::size_t stride_for(const ScalingParams& sp, double record_interval);

/// The overdamped reference ensemble of a config.
Ensemble simulate_reference(const ExperimentConfig& c, std::size_t stride, unsigned workers);

/// The Langevin ensemble for the eps_index-th eps of a config, driven by V_eps.
Ensemble simulate_langevin(const ExperimentConfig& c, std::size_t eps_index, const Potential& v_eps,
                           std::size_t stride, bool record_momenta, unsigned workers,
                           std::uint64_t tag = seed_tag::kLangevin);

}  // namespace odlab
