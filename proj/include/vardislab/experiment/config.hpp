#pragma once

// Experiment description: one parameter point plus replication settings,
// read from and written to JSON.

#include "vardislab/bp/beaconing.hpp"
#include "vardislab/sim/deployment.hpp"
#include "vardislab/sim/simulation.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace vardislab::experiment {

struct DeploymentSpec {
    sim::DeploymentKind kind = sim::DeploymentKind::LineFixed;
    std::size_t k = 5;
    double per = 0.2;                          ///< fixed-density kinds
    double extent_m = sim::default_extent_m;   ///< variable-density kinds
};

/// "reference" picks the deployment's reference producer / consumer,
/// "all" every node, otherwise an explicit list of node indices.
struct NodeSet {
    enum class Mode { Reference, All, List };
    Mode mode = Mode::Reference;
    std::vector<std::size_t> nodes;

    [[nodiscard]] std::vector<std::size_t> resolve(std::size_t node_count,
                                                   std::size_t reference) const;
};

struct ExperimentConfig {
    std::string name = "experiment";
    DeploymentSpec deployment;
    sim::Protocol protocol = sim::Protocol::Vardis;
    double beta_hz = 10.0;
    bp::BeaconTiming::Distribution timing = bp::BeaconTiming::Distribution::PeriodicJitter;
    double jitter = 0.1;
    std::size_t max_beacon_size = 200;
    unsigned rep_cnt = 2;
    std::size_t max_sum_cnt = 10;
    bool summaries = true;
    double lambda_s = 5.0;
    sim::UpdateDistribution update_distribution = sim::UpdateDistribution::Periodic;
    NodeSet producers;
    NodeSet consumers;
    double duration_s = 100.0;
    double warmup_s = 30.0;
    std::size_t replications = 4;
    std::uint64_t seed = 1;
    double flood_mean_backoff_s = 0.010;
    double queue_sample_interval_s = 0.0;
};

enum class ConfigErrc { ParseError, ValidationError };

class ConfigError : public std::runtime_error {
public:
    ConfigError(ConfigErrc code, std::vector<std::string> problems);
    [[nodiscard]] ConfigErrc code() const noexcept { return code_; }
    /// One entry per violation, each prefixed with its field path.
    [[nodiscard]] const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    ConfigErrc code_;
    std::vector<std::string> problems_;
};

[[nodiscard]] std::string_view to_string(bp::BeaconTiming::Distribution d);
[[nodiscard]] bp::BeaconTiming::Distribution timing_from_string(std::string_view s);

/// Missing keys take their defaults; unknown keys and out-of-range values
/// are collected and reported together.
[[nodiscard]] ExperimentConfig parse_config(const nlohmann::json& doc);
[[nodiscard]] ExperimentConfig parse_config_text(const std::string& text);
[[nodiscard]] ExperimentConfig parse_config_file(const std::filesystem::path& path);

[[nodiscard]] nlohmann::json to_json(const ExperimentConfig& config);

/// Checks cross-field constraints; returns the list of violations.
[[nodiscard]] std::vector<std::string> validation_problems(const ExperimentConfig& config);

/// Builds the deployment and the simulator configuration for one replication.
[[nodiscard]] sim::SimConfig to_sim_config(const ExperimentConfig& config);

}  // namespace vardislab::experiment
