#pragma once

// Named experiment families. Each preset expands into a list of parameter
// points and knows which extra outputs (RSM tables, model columns, capacity
// tables, queue traces) to produce.

#include "vardislab/experiment/config.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vardislab::experiment {

struct PresetInfo {
    std::string name;
    std::string description;
};

[[nodiscard]] const std::vector<PresetInfo>& preset_catalog();

struct PresetOptions {
    std::uint64_t seed = 1;
    std::size_t jobs = 1;
    /// Multiplies each point's measurement window (duration minus warm-up).
    double scale = 1.0;
    std::optional<double> duration_s;
    std::optional<double> warmup_s;
    std::optional<std::size_t> replications;
};

/// Parameter points of a preset, in output order. Throws
/// std::invalid_argument for an unknown name.
[[nodiscard]] std::vector<ExperimentConfig> expand_preset(std::string_view name,
                                                          const PresetOptions& options);

/// Runs a preset and writes its files into `out_dir` (created if needed).
/// Returns the written paths. Progress lines go to `log` when given.
std::vector<std::filesystem::path> run_preset(std::string_view name, const PresetOptions& options,
                                              const std::filesystem::path& out_dir,
                                              std::ostream* log = nullptr);

/// Runs a single configuration and writes metrics.csv into `out_dir`.
std::vector<std::filesystem::path> run_config(const ExperimentConfig& config, std::size_t jobs,
                                              const std::filesystem::path& out_dir);

}  // namespace vardislab::experiment
