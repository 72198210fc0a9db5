#pragma once

// Node placements and the distance-derived per-link loss probabilities.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vardislab::sim {

/// Loss probability for a frame sent over `distance_m` metres: piecewise
/// linear through the measured anchors, certain loss beyond 294 m.
[[nodiscard]] double per_from_distance(double distance_m);

/// Smallest distance whose loss probability equals `per` (0 < per < 1).
[[nodiscard]] double distance_for_per(double per);

/// Square matrix of per-ordered-pair loss probabilities with a zero diagonal.
class LossMatrix {
public:
    LossMatrix() = default;
    explicit LossMatrix(std::size_t n) : n_(n), q_(n * n, 1.0) {
        for (std::size_t i = 0; i < n; ++i) q_[i * n + i] = 0.0;
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] double operator()(std::size_t from, std::size_t to) const noexcept {
        return q_[from * n_ + to];
    }
    /// Throws std::invalid_argument for values outside [0,1] or a non-zero diagonal.
    void set(std::size_t from, std::size_t to, double q);

    /// Nodes `to` with q(from, to) < 1, excluding `from`.
    [[nodiscard]] std::vector<std::size_t> reachable_from(std::size_t from) const;
    /// True when the graph of links with q < 1 connects every node to `start`.
    [[nodiscard]] bool connected_from(std::size_t start) const;

private:
    std::size_t n_ = 0;
    std::vector<double> q_;
};

enum class DeploymentKind { LineFixed, LineVariable, GridFixed, GridVariable };

[[nodiscard]] std::string_view to_string(DeploymentKind kind);
[[nodiscard]] DeploymentKind deployment_kind_from_string(std::string_view s);

struct Position {
    double x = 0.0;
    double y = 0.0;
};

struct Deployment {
    DeploymentKind kind = DeploymentKind::LineFixed;
    std::size_t k = 0;            ///< line length or grid side
    double spacing_m = 0.0;       ///< neighbour distance
    std::vector<Position> positions;
    std::size_t reference_producer = 0;
    std::size_t reference_consumer = 0;
    LossMatrix loss;

    [[nodiscard]] std::size_t node_count() const noexcept { return positions.size(); }
};

inline constexpr double default_extent_m = 1120.0;

/// `param` is the per-link packet error rate for the fixed-density kinds and
/// the end-to-end (or side) length in metres for the variable-density kinds.
/// Lines run along x from the producer at node 0 to the consumer at K-1.
/// Grids are row-major (index = row * K + col, y grows with row); the
/// producer is the lower-right corner and the consumer the upper-left one.
[[nodiscard]] Deployment build_deployment(DeploymentKind kind, std::size_t k, double param);

/// Loss matrix from pairwise distances via per_from_distance().
[[nodiscard]] LossMatrix loss_from_positions(std::span<const Position> positions);

}  // namespace vardislab::sim
