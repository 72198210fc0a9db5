#pragma once

// CSV writers for experiment outputs. Column layouts are documented in
// docs/outputs.md.

#include "vardislab/analysis/capacity.hpp"
#include "vardislab/analysis/rsm.hpp"
#include "vardislab/experiment/runner.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace vardislab::experiment {

/// Shortest decimal text that round-trips (up to 9 significant digits).
[[nodiscard]] std::string format_number(double v);

/// One row per point; extra columns are the union of all points' extras in
/// first-seen order, left empty where a point lacks them.
void write_metrics_csv(std::ostream& out, std::span<const PointResult> points);

/// Mean (over replications) broadcast-queue length per sample time, one
/// block of rows per point that recorded a trace.
void write_queue_csv(std::ostream& out, std::span<const PointResult> points);

struct RsmRow {
    std::vector<std::pair<std::string, std::string>> setting;  ///< e.g. k, per, lambda_s
    std::string response;                                     ///< "delay_s" or "gap"
    std::vector<std::string> factor_names;
    analysis::RegressionModel model;
};

void write_rsm_csv(std::ostream& out, std::span<const RsmRow> rows);

struct CapacityRow {
    std::string setting;  ///< free-form label, e.g. "k=7"
    std::size_t k = 0;
    analysis::CapacityKind kind = analysis::CapacityKind::Reliability;
    analysis::CapacityResult result;
};

void write_capacity_csv(std::ostream& out, std::span<const CapacityRow> rows);

}  // namespace vardislab::experiment
