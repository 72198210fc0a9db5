#include "vardislab/flooding/flooding.hpp"

#include <stdexcept>

namespace vardislab::flooding {

FloodingNode::FloodingNode(NodeId self, FloodingConfig config) : self_(self), config_(config) {
    if (config_.rep_cnt < 1) throw std::invalid_argument("flooding repCnt must be at least 1");
    if (config_.mean_backoff_s <= 0.0) throw std::invalid_argument("mean backoff must be positive");
}

const FloodPacket& FloodingNode::flood_submit(std::vector<std::uint8_t> update) {
    FloodPacket p;
    p.source = self_;
    p.flood_seqno = ++next_seqno_;
    p.payload = std::move(update);
    highest_seen_[self_.value] = p.flood_seqno;
    queue_.push_back({std::move(p), config_.rep_cnt});
    return queue_.back().packet;
}

std::optional<double> FloodingNode::flood_worker_step(RandomStream& rng, double now) {
    if (worker_busy_ || queue_.empty()) return std::nullopt;
    worker_busy_ = true;
    return now + rng.exponential(1.0 / config_.mean_backoff_s);
}

FloodPacket FloodingNode::transmit_head() {
    if (queue_.empty()) throw std::logic_error("transmit_head on an empty broadcast queue");
    worker_busy_ = false;
    QueuedPacket& head = queue_.front();
    if (head.remaining_reps > 1) {
        --head.remaining_reps;
        return head.packet;
    }
    FloodPacket sent = std::move(head.packet);
    queue_.pop_front();
    return sent;
}

FloodingNode::ReceiveResult FloodingNode::flood_receive(const FloodPacket& packet) {
    if (packet.source == self_) return {};
    auto [it, fresh] = highest_seen_.try_emplace(packet.source.value, packet.flood_seqno);
    if (!fresh) {
        if (packet.flood_seqno <= it->second) return {};
        it->second = packet.flood_seqno;
    }
    queue_.push_back({packet, config_.rep_cnt});
    return {true};
}

}  // namespace vardislab::flooding
