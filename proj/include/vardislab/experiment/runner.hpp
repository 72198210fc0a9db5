#pragma once

// Replication orchestration: every (parameter point, replication) pair is an
// independent simulation; results are gathered by index, so the output does
// not depend on the worker count or completion order.

#include "vardislab/analysis/metrics.hpp"
#include "vardislab/experiment/config.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vardislab::experiment {

struct ReplicationOutcome {
    std::uint64_t seed = 0;
    std::uint64_t issued = 0;  ///< updates generated by the measured producer after warm-up
    std::size_t received = 0;  ///< receptions of the measured pair after warm-up
    double pct_received = 0.0;
    std::optional<analysis::PairMetrics> metrics;  ///< empty with fewer than two receptions
    std::vector<sim::QueueSample> queue_trace;
};

struct PointResult {
    ExperimentConfig config;
    std::size_t producer = 0;  ///< measured pair
    std::size_t consumer = 0;
    std::vector<ReplicationOutcome> replications;
    std::optional<analysis::Estimate> delay_s;
    std::optional<analysis::Estimate> gap;
    analysis::Estimate pct_received;
    std::size_t receptions = 0;
    /// Extra named columns appended to metrics.csv (e.g. model predictions).
    std::vector<std::pair<std::string, std::string>> extra;
};

/// The pair whose metrics are reported: the deployment's reference producer
/// and consumer when they are among the configured ones, otherwise the first
/// configured producer and consumer.
[[nodiscard]] std::pair<std::size_t, std::size_t> measured_pair(const sim::SimConfig& config);

/// Runs one replication and reduces it to the measured pair's metrics.
[[nodiscard]] ReplicationOutcome run_replication(const ExperimentConfig& config,
                                                 std::size_t replication);

/// Runs all replications of all points on up to `jobs` threads.
[[nodiscard]] std::vector<PointResult> run_points(const std::vector<ExperimentConfig>& points,
                                                  std::size_t jobs);

[[nodiscard]] PointResult run_point(const ExperimentConfig& config, std::size_t jobs);

/// Aggregates already computed replications.
[[nodiscard]] PointResult summarize_point(const ExperimentConfig& config,
                                          std::vector<ReplicationOutcome> replications);

}  // namespace vardislab::experiment
