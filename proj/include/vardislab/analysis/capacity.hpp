#pragma once

// Update capacity: the shortest per-node update period at which the
// reference pair still meets a reliability or delay target.

#include "vardislab/analysis/metrics.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace vardislab::analysis {

enum class CapacityKind { Reliability, Delay };

[[nodiscard]] std::string_view to_string(CapacityKind kind);

inline constexpr double reliability_gap_threshold = 1.5;
inline constexpr double delay_threshold_s = 0.25;

/// Update periods tried by default, in seconds, ascending.
[[nodiscard]] std::vector<double> default_lambda_grid();

struct CapacityPoint {
    double lambda_s = 0.0;
    Estimate metric;
    bool feasible = false;
};

struct CapacityResult {
    std::optional<double> lambda_s;     ///< empty when no grid point is feasible
    std::vector<CapacityPoint> points;  ///< every evaluated point, in order
};

/// Evaluates `metric(lambda)` in ascending grid order and stops at the first
/// point whose confidence upper bound is strictly below the threshold.
/// `metric` returns the mean gap (Reliability) or mean delay in seconds (Delay).
[[nodiscard]] CapacityResult capacity_search(const std::function<Estimate(double)>& metric,
                                             CapacityKind kind, std::span<const double> grid);

/// As capacity_search() but throws Infeasible when no point qualifies.
[[nodiscard]] double capacity_or_throw(const std::function<Estimate(double)>& metric,
                                       CapacityKind kind, std::span<const double> grid);

}  // namespace vardislab::analysis
