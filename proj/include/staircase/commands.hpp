#pragma once

#include "staircase/io.hpp"
#include "staircase/model.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace staircase {

inline constexpr const char* kVersion = "0.1.0";

/// Spectrum plus the eigenvectors needed for sampling, built from the
/// `lattice.*` or `synthetic.levels` keys.
struct ModelBundle {
  EigenSystem eig;
  SpectrumModel spectrum;  // state or trace mode as configured
  std::string description;
  double norm_bound = 0.0;
  Index dimension = 0;
};

[[nodiscard]] ModelBundle load_model(const Config& cfg);

/// Lattice from `lattice.*` keys with hopping scaled by `hop_scale`.
[[nodiscard]] LatticeSpec lattice_from_config(const Config& cfg);

[[nodiscard]] const std::vector<std::string>& command_names();

/// Runs `command` writing into `out_dir` (created if needed). Returns the
/// files written, manifest last. Throws ConfigError / ModelError for bad
/// input and NumericalError for failures at run time.
std::vector<std::filesystem::path> run_command(const std::string& command, const Config& cfg,
                                               const std::filesystem::path& out_dir);

/// runs/<command>-<UTC timestamp>-<8 hex digits of the config hash>
[[nodiscard]] std::filesystem::path default_run_dir(const std::string& command, const Config& cfg);

/// FNV-1a of the serialized config.
[[nodiscard]] std::uint64_t config_hash(const Config& cfg);

}  // namespace staircase
