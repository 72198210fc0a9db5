#pragma once

// Value types shared by the beaconing and variable-dissemination layers.

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vardislab::proto {

/// 48-bit node identifier (MAC-address-like).
struct NodeId {
    std::uint64_t value = 0;

    static constexpr std::uint64_t max_value = (std::uint64_t{1} << 48) - 1;

    friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

struct VarId {
    std::uint16_t value = 0;

    friend constexpr auto operator<=>(VarId, VarId) = default;
};

/// Producer-assigned version counter. Held as 64 bits, transmitted as 32.
using SeqNo = std::uint64_t;

inline constexpr std::size_t max_value_length = 64;
inline constexpr std::size_t max_description_length = 32;
inline constexpr std::uint8_t max_rep_cnt = 15;

/// Opaque variable contents; at most max_value_length bytes, stored inline.
class VarValue {
public:
    VarValue() = default;

    explicit VarValue(std::span<const std::uint8_t> bytes) {
        if (bytes.size() > max_value_length) {
            throw std::length_error("variable value exceeds 64 bytes");
        }
        length_ = static_cast<std::uint8_t>(bytes.size());
        std::copy(bytes.begin(), bytes.end(), bytes_.begin());
    }

    [[nodiscard]] std::size_t size() const noexcept { return length_; }
    [[nodiscard]] bool empty() const noexcept { return length_ == 0; }
    [[nodiscard]] std::span<const std::uint8_t> bytes() const noexcept {
        return {bytes_.data(), length_};
    }

    friend bool operator==(const VarValue& a, const VarValue& b) noexcept {
        return a.length_ == b.length_ &&
               std::equal(a.bytes_.begin(), a.bytes_.begin() + a.length_, b.bytes_.begin());
    }

private:
    std::uint8_t length_ = 0;
    std::array<std::uint8_t, max_value_length> bytes_{};
};

struct VariableSpecification {
    VarId var_id;
    NodeId producer;
    std::uint8_t rep_cnt = 1;
    std::string description;

    friend bool operator==(const VariableSpecification&, const VariableSpecification&) = default;
};

struct VarUpdateRecord {
    VarId var_id;
    SeqNo seqno = 0;
    VarValue value;

    friend bool operator==(const VarUpdateRecord&, const VarUpdateRecord&) = default;
};

struct VarSummaryRecord {
    VarId var_id;
    SeqNo seqno = 0;

    friend bool operator==(const VarSummaryRecord&, const VarSummaryRecord&) = default;
};

struct VarCreateRecord {
    VariableSpecification spec;
    VarUpdateRecord initial;

    friend bool operator==(const VarCreateRecord&, const VarCreateRecord&) = default;
};

struct VarDeleteRecord {
    VarId var_id;

    friend bool operator==(const VarDeleteRecord&, const VarDeleteRecord&) = default;
};

struct VarReqCreateRecord {
    VarId var_id;

    friend bool operator==(const VarReqCreateRecord&, const VarReqCreateRecord&) = default;
};

/// Carries the requester's own (outdated) sequence number.
struct VarReqUpdateRecord {
    VarId var_id;
    SeqNo seqno = 0;

    friend bool operator==(const VarReqUpdateRecord&, const VarReqUpdateRecord&) = default;
};

/// Section tags, numbered in transmission priority order.
enum class SectionType : std::uint8_t {
    Create = 1,
    Delete = 2,
    Update = 3,
    Summary = 4,
    ReqCreate = 5,
    ReqUpdate = 6,
};

/// The six instruction sections of one VarDis payload. An empty vector
/// means the section is absent; on the wire sections always appear in
/// SectionType order.
struct VarDisPayload {
    std::vector<VarCreateRecord> creates;
    std::vector<VarDeleteRecord> deletes;
    std::vector<VarUpdateRecord> updates;
    std::vector<VarSummaryRecord> summaries;
    std::vector<VarReqCreateRecord> req_creates;
    std::vector<VarReqUpdateRecord> req_updates;

    [[nodiscard]] bool empty() const noexcept {
        return creates.empty() && deletes.empty() && updates.empty() && summaries.empty() &&
               req_creates.empty() && req_updates.empty();
    }

    friend bool operator==(const VarDisPayload&, const VarDisPayload&) = default;
};

using ClientProtocolId = std::uint8_t;

inline constexpr ClientProtocolId vardis_client_id = 2;

struct BeaconPayload {
    ClientProtocolId client = 0;
    std::vector<std::uint8_t> bytes;

    friend bool operator==(const BeaconPayload&, const BeaconPayload&) = default;
};

struct Beacon {
    NodeId sender;
    std::uint32_t bp_seqno = 0;
    std::vector<BeaconPayload> payloads;

    friend bool operator==(const Beacon&, const Beacon&) = default;
};

/// Comparator packet: every update is flooded in its own frame.
struct FloodPacket {
    NodeId source;
    std::uint32_t flood_seqno = 0;
    std::uint8_t ttl = 32;
    std::vector<std::uint8_t> payload;

    friend bool operator==(const FloodPacket&, const FloodPacket&) = default;
};

}  // namespace vardislab::proto
