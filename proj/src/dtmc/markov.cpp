#include "vardislab/dtmc/markov.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <map>
#include <unordered_map>

namespace vardislab::dtmc {

namespace {

void check_loss(const sim::LossMatrix& q) {
    if (q.size() < 1 || q.size() > max_nodes) {
        throw DtmcError(DtmcErrc::InvalidArgument,
                        "chain supports 1.." + std::to_string(max_nodes) + " nodes");
    }
}

void check_state(ChainState s, std::size_t k, const char* what) {
    if (s == 0 || (s & ~full_state(k)) != 0) {
        throw DtmcError(DtmcErrc::InvalidArgument, std::string("invalid chain state for ") + what);
    }
}

bool holds(ChainState s, std::size_t i) { return (s >> i) & 1U; }

}  // namespace

double transition_probability(ChainState s, ChainState t, const sim::LossMatrix& q) {
    check_loss(q);
    const std::size_t k = q.size();
    check_state(s, k, "source");
    check_state(t, k, "target");
    if ((s & ~t) != 0) return 0.0;

    const double kd = static_cast<double>(k);
    double p = s == t ? static_cast<double>(k - static_cast<std::size_t>(std::popcount(s))) / kd
                      : 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        if (!holds(s, i)) continue;
        double term = 1.0 / kd;
        for (std::size_t j = 0; j < k; ++j) {
            if (holds(s, j)) continue;
            term *= holds(t, j) ? 1.0 - q(i, j) : q(i, j);
        }
        p += term;
    }
    return p;
}

std::vector<std::pair<ChainState, double>> transitions_from(ChainState s,
                                                            const sim::LossMatrix& q) {
    check_loss(q);
    const std::size_t k = q.size();
    check_state(s, k, "source");
    const double kd = static_cast<double>(k);

    std::map<ChainState, double> out;
    out[s] = static_cast<double>(k - static_cast<std::size_t>(std::popcount(s))) / kd;

    std::vector<std::size_t> candidates;
    std::vector<double> success;
    for (std::size_t i = 0; i < k; ++i) {
        if (!holds(s, i)) continue;
        candidates.clear();
        success.clear();
        for (std::size_t j = 0; j < k; ++j) {
            if (!holds(s, j) && q(i, j) < 1.0) {
                candidates.push_back(j);
                success.push_back(1.0 - q(i, j));
            }
        }
        const std::size_t m = candidates.size();
        for (std::uint64_t subset = 0; subset < (std::uint64_t{1} << m); ++subset) {
            double p = 1.0 / kd;
            ChainState t = s;
            for (std::size_t b = 0; b < m; ++b) {
                if ((subset >> b) & 1U) {
                    p *= success[b];
                    t |= ChainState{1} << candidates[b];
                } else {
                    p *= 1.0 - success[b];
                }
            }
            if (p > 0.0) out[t] += p;
        }
    }
    return {out.begin(), out.end()};
}

HittingResult expected_hitting_steps(const sim::LossMatrix& q, ChainState start,
                                     ChainState target) {
    check_loss(q);
    const std::size_t k = q.size();
    check_state(start, k, "start");
    check_state(target, k, "target");
    const auto absorbing = [target](ChainState s) { return (s & target) == target; };
    if (absorbing(start)) return {0.0, 1, 0.0};

    // Explore the transient states reachable from the start.
    std::unordered_map<ChainState, std::vector<std::pair<ChainState, double>>> rows;
    std::deque<ChainState> frontier{start};
    bool target_reachable = false;
    rows.emplace(start, std::vector<std::pair<ChainState, double>>{});
    while (!frontier.empty()) {
        const ChainState s = frontier.front();
        frontier.pop_front();
        auto row = transitions_from(s, q);
        for (const auto& [t, p] : row) {
            if (absorbing(t)) {
                target_reachable = true;
            } else if (!rows.contains(t)) {
                rows.emplace(t, std::vector<std::pair<ChainState, double>>{});
                frontier.push_back(t);
            }
        }
        rows[s] = std::move(row);
    }
    if (!target_reachable) {
        throw DtmcError(DtmcErrc::Unreachable, "target set unreachable from the start state");
    }

    // Moves only ever add holders, so every successor of s is numerically
    // larger than s and the system is triangular in descending state order.
    std::vector<ChainState> order;
    order.reserve(rows.size());
    for (const auto& entry : rows) order.push_back(entry.first);
    std::sort(order.begin(), order.end(), std::greater<>());

    std::unordered_map<ChainState, double> steps;
    steps.reserve(order.size());
    for (ChainState s : order) {
        double stay = 0.0;
        double rhs = 1.0;
        for (const auto& [t, p] : rows.at(s)) {
            if (t == s) {
                stay = p;
            } else if (!absorbing(t)) {
                rhs += p * steps.at(t);
            }
        }
        const double leave = 1.0 - stay;
        if (!(leave > 1e-300)) {
            throw DtmcError(DtmcErrc::Unreachable, "chain is stuck in a transient state");
        }
        const double value = rhs / leave;
        if (!std::isfinite(value)) {
            throw DtmcError(DtmcErrc::NumericalFailure, "non-finite hitting time");
        }
        steps.emplace(s, value);
    }

    double residual = 0.0;
    for (ChainState s : order) {
        double r = steps.at(s) - 1.0;
        for (const auto& [t, p] : rows.at(s)) {
            if (!absorbing(t)) r -= p * steps.at(t);
        }
        residual = std::max(residual, std::abs(r));
    }
    if (!(residual < 1e-8)) {
        throw DtmcError(DtmcErrc::NumericalFailure,
                        "hitting-time residual " + std::to_string(residual) + " too large");
    }
    return {steps.at(start), order.size(), residual};
}

HittingResult expected_hitting_steps(const sim::LossMatrix& q) {
    check_loss(q);
    return expected_hitting_steps(q, ChainState{1}, full_state(q.size()));
}

double expected_delay_seconds(double steps, std::size_t k, double beta_hz) {
    if (k == 0 || !(beta_hz > 0.0) || !(steps >= 0.0)) {
        throw DtmcError(DtmcErrc::InvalidArgument, "need steps >= 0, K >= 1 and beta > 0");
    }
    return steps / (static_cast<double>(k) * beta_hz);
}

}  // namespace vardislab::dtmc
