#include "vardislab/bp/beaconing.hpp"

#include <string>

namespace vardislab::bp {

double next_beacon_time(const BeaconTiming& timing, RandomStream& rng, double now) {
    const double mean = 1.0 / timing.rate_hz;
    switch (timing.distribution) {
        case BeaconTiming::Distribution::Exponential:
            return now + rng.exponential(timing.rate_hz);
        case BeaconTiming::Distribution::PeriodicJitter:
            if (timing.jitter == 0.0) return now + mean;
            return now + rng.uniform((1.0 - timing.jitter) * mean, (1.0 + timing.jitter) * mean);
    }
    return now + mean;
}

BeaconingProtocol::BeaconingProtocol(proto::NodeId self, std::size_t max_beacon_size)
    : self_(self), max_beacon_size_(max_beacon_size) {
    if (max_beacon_size <= proto::beacon_header_size + proto::beacon_payload_header_size) {
        throw std::invalid_argument("maximum beacon size leaves no room for payloads");
    }
}

ClientHandle BeaconingProtocol::register_client(ClientProtocolId id, BufferMode mode) {
    auto [it, inserted] = clients_.try_emplace(id, Client{mode, {}, {}});
    if (!inserted) {
        throw BpError(BpErrc::AlreadyRegistered,
                      "client protocol " + std::to_string(id) + " already registered");
    }
    return ClientHandle(id);
}

void BeaconingProtocol::deregister_client(ClientProtocolId id) {
    if (clients_.erase(id) == 0) {
        throw BpError(BpErrc::NotRegistered,
                      "client protocol " + std::to_string(id) + " not registered");
    }
}

std::optional<BufferMode> BeaconingProtocol::query_client(ClientProtocolId id) const {
    auto it = clients_.find(id);
    if (it == clients_.end()) return std::nullopt;
    return it->second.mode;
}

std::size_t BeaconingProtocol::max_payload_size() const noexcept {
    return max_beacon_size_ - proto::beacon_header_size - proto::beacon_payload_header_size;
}

void BeaconingProtocol::submit_payload(const ClientHandle& handle, std::vector<std::uint8_t> bytes) {
    auto it = clients_.find(handle.id());
    if (it == clients_.end()) {
        throw BpError(BpErrc::NotRegistered,
                      "client protocol " + std::to_string(handle.id()) + " not registered");
    }
    if (bytes.empty()) throw BpError(BpErrc::EmptyPayload, "empty payload");
    if (bytes.size() > max_payload_size()) {
        throw BpError(BpErrc::PayloadTooLarge, "payload of " + std::to_string(bytes.size()) +
                                                   " bytes exceeds " +
                                                   std::to_string(max_payload_size()));
    }
    Client& c = it->second;
    if (c.mode == BufferMode::Queueing) {
        c.queue.push_back(std::move(bytes));
    } else {
        c.slot = std::move(bytes);
    }
}

std::optional<proto::Beacon> BeaconingProtocol::assemble_beacon(std::size_t max_beacon_size) {
    proto::Beacon beacon;
    beacon.sender = self_;
    std::size_t used = proto::beacon_header_size;

    for (auto& [id, c] : clients_) {
        const std::vector<std::uint8_t>* head = nullptr;
        if (c.mode == BufferMode::Queueing) {
            if (!c.queue.empty()) head = &c.queue.front();
        } else if (c.slot) {
            head = &*c.slot;
        }
        if (head == nullptr) continue;
        const std::size_t need = proto::beacon_payload_header_size + head->size();
        if (used + need > max_beacon_size) continue;
        used += need;

        switch (c.mode) {
            case BufferMode::Queueing:
                beacon.payloads.push_back({id, std::move(c.queue.front())});
                c.queue.pop_front();
                break;
            case BufferMode::BufferedOnce:
                beacon.payloads.push_back({id, std::move(*c.slot)});
                c.slot.reset();
                break;
            case BufferMode::BufferedRepeated:
                beacon.payloads.push_back({id, *c.slot});
                break;
        }
    }

    if (beacon.payloads.empty()) return std::nullopt;
    beacon.bp_seqno = next_seqno_++;
    return beacon;
}

std::vector<Dispatch> BeaconingProtocol::on_receive_beacon(const proto::Beacon& beacon) const {
    std::vector<Dispatch> out;
    for (const auto& pl : beacon.payloads) {
        if (clients_.contains(pl.client)) {
            out.push_back({pl.client, beacon.sender, pl.bytes});
        }
    }
    return out;
}

std::size_t BeaconingProtocol::pending(ClientProtocolId id) const {
    auto it = clients_.find(id);
    if (it == clients_.end()) return 0;
    const Client& c = it->second;
    return c.mode == BufferMode::Queueing ? c.queue.size() : (c.slot ? 1 : 0);
}

}  // namespace vardislab::bp
