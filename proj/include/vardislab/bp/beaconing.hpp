#pragma once

// Beaconing Protocol: multiplexes client payloads into periodically
// broadcast beacons and hands received payloads back to their clients.

#include "vardislab/proto/types.hpp"
#include "vardislab/proto/wire.hpp"
#include "vardislab/rng.hpp"

#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace vardislab::bp {

using proto::ClientProtocolId;

enum class BufferMode {
    Queueing,          ///< FIFO, each payload sent exactly once
    BufferedOnce,      ///< single slot, cleared after insertion
    BufferedRepeated,  ///< single slot, re-sent until overwritten
};

enum class BpErrc { AlreadyRegistered, NotRegistered, PayloadTooLarge, EmptyPayload };

class BpError : public std::runtime_error {
public:
    BpError(BpErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    [[nodiscard]] BpErrc code() const noexcept { return code_; }

private:
    BpErrc code_;
};

class ClientHandle {
public:
    [[nodiscard]] ClientProtocolId id() const noexcept { return id_; }

private:
    friend class BeaconingProtocol;
    explicit ClientHandle(ClientProtocolId id) : id_(id) {}
    ClientProtocolId id_;
};

struct BeaconTiming {
    enum class Distribution { PeriodicJitter, Exponential };

    Distribution distribution = Distribution::PeriodicJitter;
    double jitter = 0.1;  ///< fraction of the mean period, PeriodicJitter only
    double rate_hz = 10.0;
};

/// `now` plus one iid inter-beacon time drawn from `timing`.
[[nodiscard]] double next_beacon_time(const BeaconTiming& timing, RandomStream& rng, double now);

/// A received payload routed to a registered client. `bytes` views into the
/// beacon passed to on_receive_beacon().
struct Dispatch {
    ClientProtocolId client;
    proto::NodeId sender;
    std::span<const std::uint8_t> bytes;
};

class BeaconingProtocol {
public:
    static constexpr std::size_t default_max_beacon_size = 200;

    explicit BeaconingProtocol(proto::NodeId self,
                               std::size_t max_beacon_size = default_max_beacon_size);

    ClientHandle register_client(ClientProtocolId id, BufferMode mode);
    void deregister_client(ClientProtocolId id);
    [[nodiscard]] std::optional<BufferMode> query_client(ClientProtocolId id) const;

    /// Largest client payload that fits a beacon carrying nothing else.
    [[nodiscard]] std::size_t max_payload_size() const noexcept;
    [[nodiscard]] std::size_t max_beacon_size() const noexcept { return max_beacon_size_; }

    void submit_payload(const ClientHandle& handle, std::vector<std::uint8_t> bytes);

    /// Visits clients in ascending id order, taking at most one payload each
    /// while the beacon stays within `max_beacon_size`. Returns nothing when
    /// no payload was taken.
    [[nodiscard]] std::optional<proto::Beacon> assemble_beacon(std::size_t max_beacon_size);
    [[nodiscard]] std::optional<proto::Beacon> assemble_beacon() {
        return assemble_beacon(max_beacon_size_);
    }

    /// Payloads for unregistered client ids are dropped.
    [[nodiscard]] std::vector<Dispatch> on_receive_beacon(const proto::Beacon& beacon) const;

    /// Payloads currently waiting for `id` (queue length or 0/1 for slots).
    [[nodiscard]] std::size_t pending(ClientProtocolId id) const;

private:
    struct Client {
        BufferMode mode;
        std::deque<std::vector<std::uint8_t>> queue;
        std::optional<std::vector<std::uint8_t>> slot;
    };

    proto::NodeId self_;
    std::size_t max_beacon_size_;
    std::uint32_t next_seqno_ = 0;
    std::map<ClientProtocolId, Client> clients_;
};

}  // namespace vardislab::bp
