#pragma once

// Comparator protocol: every variable update is flooded network-wide in its
// own packet, with per-source newest-seqno duplicate suppression, a random
// backoff before each transmission and repCnt repetitions per node.

#include "vardislab/proto/types.hpp"
#include "vardislab/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <vector>

namespace vardislab::flooding {

using proto::FloodPacket;
using proto::NodeId;

struct FloodingConfig {
    std::uint8_t rep_cnt = 1;
    double mean_backoff_s = 0.010;
};

struct QueuedPacket {
    FloodPacket packet;
    std::uint8_t remaining_reps;
};

class FloodingNode {
public:
    FloodingNode(NodeId self, FloodingConfig config);

    [[nodiscard]] NodeId self() const noexcept { return self_; }
    [[nodiscard]] std::size_t queue_length() const noexcept { return queue_.size(); }
    [[nodiscard]] const std::deque<QueuedPacket>& queue() const noexcept { return queue_; }
    [[nodiscard]] bool worker_busy() const noexcept { return worker_busy_; }

    /// Wraps a locally generated update into a fresh packet and enqueues it.
    const FloodPacket& flood_submit(std::vector<std::uint8_t> update);

    /// Starts a backoff if the worker is idle and the queue holds a packet.
    /// Returns the time at which transmit_head() must be called.
    [[nodiscard]] std::optional<double> flood_worker_step(RandomStream& rng, double now);

    /// Sends the head packet: it stays at the front while repetitions remain,
    /// otherwise it leaves the queue. Marks the worker idle.
    FloodPacket transmit_head();

    struct ReceiveResult {
        bool delivered = false;  ///< fresh packet, handed to the application
    };

    /// Drops own packets and anything not newer than the highest seqno seen
    /// from the same source; fresh packets are delivered and re-queued.
    ReceiveResult flood_receive(const FloodPacket& packet);

private:
    NodeId self_;
    FloodingConfig config_;
    std::uint32_t next_seqno_ = 0;
    std::deque<QueuedPacket> queue_;
    std::map<std::uint64_t, std::uint32_t> highest_seen_;
    bool worker_busy_ = false;
};

}  // namespace vardislab::flooding
