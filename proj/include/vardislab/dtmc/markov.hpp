#pragma once

// Dissemination chain: a state is the set of nodes holding the update; in
// every step one node chosen uniformly at random broadcasts, and if it holds
// the update each other node independently receives it with 1 - q.

#include "vardislab/sim/deployment.hpp"

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vardislab::dtmc {

/// Bit i set iff node i holds the update.
using ChainState = std::uint32_t;

inline constexpr std::size_t max_nodes = 24;

enum class DtmcErrc { InvalidArgument, Unreachable, NumericalFailure };

class DtmcError : public std::runtime_error {
public:
    DtmcError(DtmcErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    [[nodiscard]] DtmcErrc code() const noexcept { return code_; }

private:
    DtmcErrc code_;
};

[[nodiscard]] constexpr ChainState full_state(std::size_t k) noexcept {
    return k >= 32 ? ~ChainState{0} : (ChainState{1} << k) - 1;
}

/// One-step probability of moving from s to t.
[[nodiscard]] double transition_probability(ChainState s, ChainState t, const sim::LossMatrix& q);

/// Non-zero transitions out of s, targets ascending; probabilities sum to 1.
[[nodiscard]] std::vector<std::pair<ChainState, double>> transitions_from(
    ChainState s, const sim::LossMatrix& q);

struct HittingResult {
    double steps = 0.0;
    std::size_t states = 0;    ///< reachable states in the solved system
    double residual = 0.0;     ///< max-norm residual of the solved system
};

/// Expected number of steps until the chain first enters a state that
/// contains every node of `target` (default: all nodes), starting from
/// `start` (default: node 0 only).
[[nodiscard]] HittingResult expected_hitting_steps(const sim::LossMatrix& q, ChainState start,
                                                   ChainState target);
[[nodiscard]] HittingResult expected_hitting_steps(const sim::LossMatrix& q);

/// K nodes beaconing as independent Poisson processes at rate beta form one
/// Poisson process at rate K * beta, so each chain step lasts 1/(K beta) s.
[[nodiscard]] double expected_delay_seconds(double steps, std::size_t k, double beta_hz);

}  // namespace vardislab::dtmc
