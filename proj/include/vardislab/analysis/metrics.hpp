#pragma once

// Per-pair delay / gap / reception metrics and their aggregation across
// replications.

#include "vardislab/sim/simulation.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace vardislab::analysis {

enum class AnalysisErrc { NoSamples, IncompleteDesign, Infeasible, InvalidArgument };

class AnalysisError : public std::runtime_error {
public:
    AnalysisError(AnalysisErrc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    [[nodiscard]] AnalysisErrc code() const noexcept { return code_; }

private:
    AnalysisErrc code_;
};

/// Metrics of one producer -> consumer pair in one replication.
struct PairMetrics {
    std::size_t received = 0;   ///< receptions of updates
    double mean_delay_s = 0.0;
    double mean_gap = 0.0;      ///< needs at least two receptions
    double pct_received = 0.0;  ///< distinct updates received / issued, in %
};

/// Uses the samples of `producer` observed at `consumer`, in the order given
/// (which must be ascending reception time). Receptions of the initial value
/// (application seqno 0) are ignored. `issued` is the number of updates the
/// producer generated during the measured window; only receptions of updates
/// generated at or after `window_start_s` count towards pct_received.
/// Throws NoSamples with fewer than two receptions.
[[nodiscard]] PairMetrics compute_metrics(std::span<const sim::Sample> samples,
                                          std::size_t producer, std::size_t consumer,
                                          std::uint64_t issued, double window_start_s);

/// pct_received alone; defined (possibly 0) even without receptions.
[[nodiscard]] double percent_received(std::span<const sim::Sample> samples, std::size_t producer,
                                      std::size_t consumer, std::uint64_t issued,
                                      double window_start_s);

/// Mean with a two-sided 95% Student-t confidence half-width.
struct Estimate {
    double mean = 0.0;
    double half_width = 0.0;  ///< 0 when fewer than two values
    std::size_t n = 0;

    [[nodiscard]] double upper() const noexcept { return mean + half_width; }
    [[nodiscard]] double lower() const noexcept { return mean - half_width; }
};

/// Throws NoSamples for an empty input.
[[nodiscard]] Estimate summarize(std::span<const double> values);

struct MetricSummary {
    Estimate delay_s;
    Estimate gap;
    Estimate pct_received;
    std::size_t receptions = 0;  ///< summed over replications
    std::size_t replications = 0;
};

/// Aggregates replication-level pair metrics.
[[nodiscard]] MetricSummary summarize(std::span<const PairMetrics> replications);

/// Expected sequence number gap at the end of a K-node line with per-hop
/// loss P and repCnt repetitions per hop: 1 / (1 - P^repCnt)^(K-1).
[[nodiscard]] double expected_gap_model(double per, unsigned rep_cnt, std::size_t k);

}  // namespace vardislab::analysis
