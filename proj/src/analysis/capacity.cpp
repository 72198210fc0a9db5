#include "vardislab/analysis/capacity.hpp"

#include <cmath>

namespace vardislab::analysis {

std::string_view to_string(CapacityKind kind) {
    return kind == CapacityKind::Reliability ? "reliability" : "delay";
}

std::vector<double> default_lambda_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 14; ++i) grid.push_back(0.15 + 0.025 * i);
    for (double v : {0.75, 1.0, 1.5, 2.0}) grid.push_back(v);
    return grid;
}

CapacityResult capacity_search(const std::function<Estimate(double)>& metric, CapacityKind kind,
                               std::span<const double> grid) {
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw AnalysisError(AnalysisErrc::InvalidArgument, "lambda grid must be ascending");
        }
    }
    const double threshold =
        kind == CapacityKind::Reliability ? reliability_gap_threshold : delay_threshold_s;
    CapacityResult out;
    for (double lambda : grid) {
        CapacityPoint p{lambda, metric(lambda), false};
        p.feasible = std::isfinite(p.metric.upper()) && p.metric.upper() < threshold;
        out.points.push_back(p);
        if (p.feasible) {
            out.lambda_s = lambda;
            break;
        }
    }
    return out;
}

double capacity_or_throw(const std::function<Estimate(double)>& metric, CapacityKind kind,
                         std::span<const double> grid) {
    auto r = capacity_search(metric, kind, grid);
    if (!r.lambda_s) {
        throw AnalysisError(AnalysisErrc::Infeasible,
                            std::string(to_string(kind)) + " target not met on the lambda grid");
    }
    return *r.lambda_s;
}

}  // namespace vardislab::analysis
