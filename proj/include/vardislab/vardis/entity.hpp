#pragma once

// VarDis protocol entity: the real-time database of shared variables,
// application CRUD calls, payload construction for outgoing beacons and
// processing of received payloads.

#include "vardislab/proto/types.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace vardislab::vardis {

using proto::NodeId;
using proto::SeqNo;
using proto::VarId;
using proto::VarValue;

enum class VardisErrc { VariableExists, NotFound, NotProducer, BeingDeleted, InvalidArgument };

class VardisError : public std::runtime_error {
public:
    VardisError(VardisErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    [[nodiscard]] VardisErrc code() const noexcept { return code_; }

private:
    VardisErrc code_;
};

struct VardisConfig {
    std::size_t max_sum_cnt = 10;
    bool summaries = true;
    /// Holders repeat an update in every beacon instead of repCnt beacons.
    bool always_repeat = false;
    /// Used to size delete tombstones: 10 * repCnt / beacon_rate_hz seconds.
    double beacon_rate_hz = 10.0;
};

struct DatabaseEntry {
    proto::VariableSpecification spec;
    VarValue value;
    SeqNo seqno = 0;
    double last_update_received = 0.0;
    std::uint8_t count_create = 0;
    std::uint8_t count_update = 0;
    std::uint8_t count_delete = 0;
    bool to_be_deleted = false;
    // Arming order of the pending create / update repetitions; older
    // pending instructions are served first when a payload runs out of room.
    std::uint64_t create_armed = 0;
    std::uint64_t update_armed = 0;
};

struct RealTimeDatabase {
    struct PendingUpdateRequest {
        SeqNo local;   ///< our seqno, carried in the request
        SeqNo wanted;  ///< highest seqno seen in a neighbour summary
    };

    std::map<VarId, DatabaseEntry> entries;
    std::map<VarId, double> tombstones;  ///< varId -> expiry time
    /// Last variable summarized; the next summary starts after it.
    std::optional<VarId> summary_cursor;
    std::set<VarId> req_create;
    std::map<VarId, PendingUpdateRequest> req_update;
};

struct VariableReading {
    VarValue value;
    SeqNo seqno = 0;
    double last_update_received = 0.0;
};

/// Effect of one received record on the local database.
struct StateChange {
    enum class Kind {
        Created,            ///< unknown variable learned from a create record
        Updated,            ///< strictly newer value adopted
        DeleteStarted,      ///< delete instruction accepted
        StaleRepair,        ///< older update heard, local value rescheduled
        CreateRequested,    ///< summary for an unknown variable
        UpdateRequested,    ///< summary with a newer seqno
        CreateRescheduled,  ///< neighbour asked for a create
        UpdateRescheduled,  ///< neighbour asked for a newer value
        RecordDropped,      ///< record violated its type invariants
    };

    Kind kind;
    VarId var_id;
    SeqNo seqno = 0;
};

class VardisEntity {
public:
    VardisEntity(NodeId self, VardisConfig config);

    [[nodiscard]] NodeId self() const noexcept { return self_; }
    [[nodiscard]] const VardisConfig& config() const noexcept { return config_; }
    [[nodiscard]] const RealTimeDatabase& database() const noexcept { return db_; }

    void create_variable(const proto::VariableSpecification& spec, const VarValue& initial,
                         double now);
    void update_variable(VarId id, const VarValue& value, double now);
    void delete_variable(VarId id, double now);
    [[nodiscard]] VariableReading read_variable(VarId id) const;
    [[nodiscard]] std::vector<VarId> list_variables() const;

    /// Builds the payload for the next outgoing beacon, consuming repetition
    /// counters and pending requests for whatever it includes. Returns
    /// nothing when every section would be empty.
    [[nodiscard]] std::optional<proto::VarDisPayload> make_payload(std::size_t max_payload_size,
                                                                   double now);

    std::vector<StateChange> process_payload(const proto::VarDisPayload& payload, double now);

private:
    DatabaseEntry& producer_entry(VarId id, const char* op);
    void arm_create(DatabaseEntry& e);
    void arm_update(DatabaseEntry& e);
    void settle_update_request(VarId id, SeqNo local);
    void purge_tombstones(double now);
    [[nodiscard]] bool tombstoned(VarId id) const { return db_.tombstones.contains(id); }

    NodeId self_;
    VardisConfig config_;
    RealTimeDatabase db_;
    std::uint64_t arm_counter_ = 0;
};

}  // namespace vardislab::vardis
