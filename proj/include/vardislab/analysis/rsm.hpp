#pragma once

// Two-level full factorial designs fitted with a second-order model:
// intercept, one linear term per factor and one term per factor pair.

#include <cstddef>
#include <map>
#include <span>
#include <vector>

namespace vardislab::analysis {

struct RsmTerm {
    std::vector<std::size_t> factors;  ///< one index (linear) or two (interaction)
    double coefficient = 0.0;
    double contribution_pct = 0.0;     ///< 2^k coefficient^2 / SST, in %
};

struct RegressionModel {
    std::size_t k = 0;
    double intercept = 0.0;
    std::vector<RsmTerm> terms;  ///< linear terms by factor, then pairs (i<j) lexicographic
    double sst = 0.0;
    double sse = 0.0;
    double r2_pct = 0.0;
    double min_response = 0.0;
    double max_response = 0.0;

    [[nodiscard]] double linear(std::size_t i) const;
    [[nodiscard]] double interaction(std::size_t i, std::size_t j) const;
    [[nodiscard]] double predict(std::span<const int> x) const;
    /// Sum of the interaction contributions, in %.
    [[nodiscard]] double interaction_contribution_pct() const;
};

/// `responses[m]` is the response at the design point where factor i is +1
/// iff bit i of m is set; exactly 2^k finite values are required.
[[nodiscard]] RegressionModel rsm_fit(std::size_t k, std::span<const double> responses);

/// Design points given as vectors of -1/+1 levels.
[[nodiscard]] RegressionModel rsm_fit(std::size_t k,
                                      const std::map<std::vector<int>, double>& responses);

}  // namespace vardislab::analysis
