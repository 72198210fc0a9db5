#pragma once

// Byte layouts for VarDis payloads, BP beacons and flooding frames.
// All multi-byte integers are little-endian. See docs/wire-format.md.

#include "vardislab/proto/types.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace vardislab::proto {

enum class WireErrc {
    EncodedTooLarge,
    InvalidRecord,
    MalformedPayload,
    MalformedBeacon,
    MalformedFrame,
};

class WireError : public std::runtime_error {
public:
    WireError(WireErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    [[nodiscard]] WireErrc code() const noexcept { return code_; }

private:
    WireErrc code_;
};

inline constexpr std::size_t section_header_size = 2;
inline constexpr std::size_t summary_record_size = 6;
inline constexpr std::size_t delete_record_size = 2;
inline constexpr std::size_t req_create_record_size = 2;
inline constexpr std::size_t req_update_record_size = 6;
inline constexpr std::size_t max_section_records = 255;

/// version (1) + sender (6) + bp seqno (4)
inline constexpr std::size_t beacon_header_size = 11;
/// client id (1) + payload length (2)
inline constexpr std::size_t beacon_payload_header_size = 3;
inline constexpr std::uint8_t beacon_version = 1;

/// frame type (1) + source (6) + flood seqno (4) + ttl (1) + payload length (2)
inline constexpr std::size_t flood_header_size = 14;

[[nodiscard]] inline std::size_t update_record_size(const VarUpdateRecord& r) noexcept {
    return 2 + 4 + 1 + r.value.size();
}

[[nodiscard]] inline std::size_t spec_size(const VariableSpecification& s) noexcept {
    return 2 + 6 + 1 + 1 + s.description.size();
}

[[nodiscard]] inline std::size_t create_record_size(const VarCreateRecord& r) noexcept {
    return spec_size(r.spec) + update_record_size(r.initial);
}

/// Size encode_payload() will produce, computed from the layout alone.
[[nodiscard]] std::size_t encoded_payload_size(const VarDisPayload& p) noexcept;

/// Throws WireError(EncodedTooLarge) when the result would exceed `limit`
/// and WireError(InvalidRecord) when a record breaks its type invariants.
[[nodiscard]] std::vector<std::uint8_t> encode_payload(const VarDisPayload& p,
                                                       std::size_t limit = SIZE_MAX);

/// Throws WireError(MalformedPayload) on truncation, unknown or out-of-order
/// sections and empty sections. Record-level semantic checks (repCnt range,
/// matching varIds in create records) are left to the receiver.
[[nodiscard]] VarDisPayload decode_payload(std::span<const std::uint8_t> bytes);

/// A lone VarUpdateRecord, used as the body of flooding frames.
[[nodiscard]] std::vector<std::uint8_t> encode_update_record(const VarUpdateRecord& r);
[[nodiscard]] VarUpdateRecord decode_update_record(std::span<const std::uint8_t> bytes);

[[nodiscard]] std::size_t encoded_beacon_size(const Beacon& b) noexcept;
[[nodiscard]] std::vector<std::uint8_t> encode_beacon(const Beacon& b);
[[nodiscard]] Beacon decode_beacon(std::span<const std::uint8_t> bytes);

[[nodiscard]] std::vector<std::uint8_t> encode_flood_packet(const FloodPacket& p);
[[nodiscard]] FloodPacket decode_flood_packet(std::span<const std::uint8_t> bytes);

}  // namespace vardislab::proto
