#pragma once

// Abstract lossy broadcast medium: no carrier sensing, no collisions, no
// propagation delay. Every receiver decides independently whether a frame
// arrives.

#include "vardislab/rng.hpp"
#include "vardislab/sim/deployment.hpp"

#include <cstddef>
#include <vector>

namespace vardislab::sim {

inline constexpr double phy_rate_bps = 36e6;
inline constexpr std::size_t phy_overhead_bytes = 27;

/// Time on air for a frame of `frame_bytes` MAC payload bytes.
[[nodiscard]] constexpr double airtime(std::size_t frame_bytes) noexcept {
    return static_cast<double>(frame_bytes + phy_overhead_bytes) * 8.0 / phy_rate_bps;
}

struct Delivery {
    std::size_t receiver;
    double time;
};

class Channel {
public:
    explicit Channel(LossMatrix loss);

    [[nodiscard]] const LossMatrix& loss() const noexcept { return loss_; }

    /// Receivers of one broadcast, in ascending node order, all arriving at
    /// now + airtime(frame_bytes).
    [[nodiscard]] std::vector<Delivery> broadcast(std::size_t sender, std::size_t frame_bytes,
                                                  double now, RandomStream& rng) const;

private:
    LossMatrix loss_;
    std::vector<std::vector<std::size_t>> reachable_;
};

}  // namespace vardislab::sim
