#include "vardislab/sim/deployment.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace vardislab::sim {

namespace {

struct Anchor {
    double distance;
    double per;
};

constexpr std::array<Anchor, 6> anchors{{
    {0.0, 0.0},
    {255.0, 0.10},
    {263.0, 0.20},
    {273.0, 0.50},
    {280.0, 0.80},
    {294.0, 1.00},
}};

}  // namespace

double per_from_distance(double distance_m) {
    if (!(distance_m >= 0.0)) throw std::invalid_argument("distance must be non-negative");
    if (distance_m >= anchors.back().distance) return 1.0;
    for (std::size_t i = 1; i < anchors.size(); ++i) {
        if (distance_m <= anchors[i].distance) {
            const Anchor& a = anchors[i - 1];
            const Anchor& b = anchors[i];
            const double t = (distance_m - a.distance) / (b.distance - a.distance);
            return a.per + t * (b.per - a.per);
        }
    }
    return 1.0;
}

double distance_for_per(double per) {
    if (!(per > 0.0 && per < 1.0)) throw std::invalid_argument("packet error rate must be in (0,1)");
    for (std::size_t i = 1; i < anchors.size(); ++i) {
        if (per <= anchors[i].per) {
            const Anchor& a = anchors[i - 1];
            const Anchor& b = anchors[i];
            const double t = (per - a.per) / (b.per - a.per);
            return a.distance + t * (b.distance - a.distance);
        }
    }
    return anchors.back().distance;
}

void LossMatrix::set(std::size_t from, std::size_t to, double q) {
    if (from >= n_ || to >= n_) throw std::out_of_range("loss matrix index");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("loss probability outside [0,1]");
    if (from == to && q != 0.0) throw std::invalid_argument("self-loss must be zero");
    q_[from * n_ + to] = q;
}

std::vector<std::size_t> LossMatrix::reachable_from(std::size_t from) const {
    std::vector<std::size_t> out;
    for (std::size_t to = 0; to < n_; ++to) {
        if (to != from && (*this)(from, to) < 1.0) out.push_back(to);
    }
    return out;
}

bool LossMatrix::connected_from(std::size_t start) const {
    std::vector<bool> seen(n_, false);
    std::vector<std::size_t> stack{start};
    seen[start] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        for (std::size_t j : reachable_from(i)) {
            if (!seen[j]) {
                seen[j] = true;
                ++count;
                stack.push_back(j);
            }
        }
    }
    return count == n_;
}

std::string_view to_string(DeploymentKind kind) {
    switch (kind) {
        case DeploymentKind::LineFixed: return "line-fixed";
        case DeploymentKind::LineVariable: return "line-variable";
        case DeploymentKind::GridFixed: return "grid-fixed";
        case DeploymentKind::GridVariable: return "grid-variable";
    }
    return "?";
}

DeploymentKind deployment_kind_from_string(std::string_view s) {
    for (auto k : {DeploymentKind::LineFixed, DeploymentKind::LineVariable,
                   DeploymentKind::GridFixed, DeploymentKind::GridVariable}) {
        if (to_string(k) == s) return k;
    }
    throw std::invalid_argument("unknown deployment kind '" + std::string(s) + "'");
}

LossMatrix loss_from_positions(std::span<const Position> positions) {
    LossMatrix q(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        for (std::size_t j = 0; j < positions.size(); ++j) {
            if (i == j) continue;
            const double d = std::hypot(positions[i].x - positions[j].x,
                                        positions[i].y - positions[j].y);
            q.set(i, j, per_from_distance(d));
        }
    }
    return q;
}

Deployment build_deployment(DeploymentKind kind, std::size_t k, double param) {
    if (k < 2) throw std::invalid_argument("deployments need K >= 2");
    Deployment d;
    d.kind = kind;
    d.k = k;
    const bool fixed = kind == DeploymentKind::LineFixed || kind == DeploymentKind::GridFixed;
    if (fixed) {
        d.spacing_m = distance_for_per(param);
    } else {
        if (!(param > 0.0)) throw std::invalid_argument("extent must be positive");
        d.spacing_m = param / static_cast<double>(k - 1);
    }

    if (kind == DeploymentKind::LineFixed || kind == DeploymentKind::LineVariable) {
        for (std::size_t i = 0; i < k; ++i) {
            d.positions.push_back({d.spacing_m * static_cast<double>(i), 0.0});
        }
        if (!fixed) d.positions.back().x = param;  // pin the far end exactly
        d.reference_producer = 0;
        d.reference_consumer = k - 1;
    } else {
        for (std::size_t row = 0; row < k; ++row) {
            for (std::size_t col = 0; col < k; ++col) {
                d.positions.push_back({d.spacing_m * static_cast<double>(col),
                                       d.spacing_m * static_cast<double>(row)});
            }
        }
        d.reference_producer = k - 1;        // row 0, last column
        d.reference_consumer = (k - 1) * k;  // last row, column 0
    }
    d.loss = loss_from_positions(d.positions);
    return d;
}

}  // namespace vardislab::sim
