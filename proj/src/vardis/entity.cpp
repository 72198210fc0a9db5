#include "vardislab/vardis/entity.hpp"

#include "vardislab/proto/wire.hpp"

#include <algorithm>
#include <utility>

namespace vardislab::vardis {

namespace {

std::string name(VarId id) { return "variable " + std::to_string(id.value); }

bool valid_create(const proto::VarCreateRecord& c) {
    return c.spec.var_id == c.initial.var_id && c.spec.rep_cnt >= 1 &&
           c.spec.rep_cnt <= proto::max_rep_cnt;
}

}  // namespace

VardisEntity::VardisEntity(NodeId self, VardisConfig config) : self_(self), config_(config) {
    if (config_.beacon_rate_hz <= 0.0) {
        throw VardisError(VardisErrc::InvalidArgument, "beacon rate must be positive");
    }
}

// Re-arming a still-pending instruction refills its counter but keeps its
// place in the service order.
void VardisEntity::arm_create(DatabaseEntry& e) {
    if (e.count_create == 0) e.create_armed = ++arm_counter_;
    e.count_create = e.spec.rep_cnt;
}

void VardisEntity::arm_update(DatabaseEntry& e) {
    if (e.count_update == 0) e.update_armed = ++arm_counter_;
    e.count_update = e.spec.rep_cnt;
}

void VardisEntity::settle_update_request(VarId id, SeqNo local) {
    auto it = db_.req_update.find(id);
    if (it == db_.req_update.end()) return;
    if (local >= it->second.wanted) {
        db_.req_update.erase(it);
    } else {
        it->second.local = local;
    }
}

void VardisEntity::purge_tombstones(double now) {
    std::erase_if(db_.tombstones, [now](const auto& kv) { return kv.second <= now; });
}

void VardisEntity::create_variable(const proto::VariableSpecification& spec,
                                   const VarValue& initial, double now) {
    if (spec.producer != self_) {
        throw VardisError(VardisErrc::NotProducer, "only the producer may create " + name(spec.var_id));
    }
    if (spec.rep_cnt < 1 || spec.rep_cnt > proto::max_rep_cnt) {
        throw VardisError(VardisErrc::InvalidArgument, "repCnt must be in 1..15");
    }
    if (spec.description.size() > proto::max_description_length) {
        throw VardisError(VardisErrc::InvalidArgument, "description exceeds 32 bytes");
    }
    purge_tombstones(now);
    if (db_.entries.contains(spec.var_id) || tombstoned(spec.var_id)) {
        throw VardisError(VardisErrc::VariableExists, name(spec.var_id) + " already exists");
    }
    DatabaseEntry e;
    e.spec = spec;
    e.value = initial;
    e.seqno = 0;
    e.last_update_received = now;
    arm_create(e);
    db_.entries.emplace(spec.var_id, std::move(e));
    db_.req_create.erase(spec.var_id);
    db_.req_update.erase(spec.var_id);
}

DatabaseEntry& VardisEntity::producer_entry(VarId id, const char* op) {
    auto it = db_.entries.find(id);
    if (it == db_.entries.end()) {
        throw VardisError(VardisErrc::NotFound, name(id) + " not found");
    }
    DatabaseEntry& e = it->second;
    if (e.spec.producer != self_) {
        throw VardisError(VardisErrc::NotProducer,
                          std::string("only the producer may ") + op + " " + name(id));
    }
    if (e.to_be_deleted) {
        throw VardisError(VardisErrc::BeingDeleted, name(id) + " is being deleted");
    }
    return e;
}

void VardisEntity::update_variable(VarId id, const VarValue& value, double now) {
    DatabaseEntry& e = producer_entry(id, "update");
    e.seqno += 1;
    e.value = value;
    e.last_update_received = now;
    arm_update(e);
}

void VardisEntity::delete_variable(VarId id, double /*now*/) {
    DatabaseEntry& e = producer_entry(id, "delete");
    e.to_be_deleted = true;
    e.count_delete = e.spec.rep_cnt;
    e.count_create = 0;
    e.count_update = 0;
}

VariableReading VardisEntity::read_variable(VarId id) const {
    auto it = db_.entries.find(id);
    if (it == db_.entries.end()) {
        throw VardisError(VardisErrc::NotFound, name(id) + " not found");
    }
    return {it->second.value, it->second.seqno, it->second.last_update_received};
}

std::vector<VarId> VardisEntity::list_variables() const {
    std::vector<VarId> out;
    out.reserve(db_.entries.size());
    for (const auto& [id, e] : db_.entries) out.push_back(id);
    return out;
}

std::optional<proto::VarDisPayload> VardisEntity::make_payload(std::size_t max_payload_size,
                                                               double now) {
    purge_tombstones(now);
    proto::VarDisPayload p;
    std::size_t remaining = max_payload_size;

    // Reserves room for one record, adding the section header on first use.
    auto take = [&remaining](bool section_open, std::size_t record) {
        const std::size_t need = record + (section_open ? 0 : proto::section_header_size);
        if (need > remaining) return false;
        remaining -= need;
        return true;
    };

    auto pending_in_order = [this](auto count_of, auto armed_of) {
        std::vector<std::pair<std::uint64_t, VarId>> order;
        for (const auto& [id, e] : db_.entries) {
            if (count_of(e) > 0) order.emplace_back(armed_of(e), id);
        }
        std::sort(order.begin(), order.end());
        return order;
    };

    // Creates.
    for (auto [armed, id] : pending_in_order(
             [](const DatabaseEntry& e) { return e.to_be_deleted ? 0 : e.count_create; },
             [](const DatabaseEntry& e) { return e.create_armed; })) {
        if (p.creates.size() == proto::max_section_records) break;
        DatabaseEntry& e = db_.entries.at(id);
        proto::VarCreateRecord rec{e.spec, {id, e.seqno, e.value}};
        if (!take(!p.creates.empty(), proto::create_record_size(rec))) continue;
        p.creates.push_back(std::move(rec));
        --e.count_create;
    }

    // Deletes.
    std::vector<VarId> drained;
    for (auto& [id, e] : db_.entries) {
        if (!e.to_be_deleted || e.count_delete == 0) continue;
        if (p.deletes.size() == proto::max_section_records) break;
        if (!take(!p.deletes.empty(), proto::delete_record_size)) break;
        p.deletes.push_back({id});
        if (--e.count_delete == 0) drained.push_back(id);
    }

    // Updates.
    for (auto [armed, id] : pending_in_order(
             [](const DatabaseEntry& e) { return e.to_be_deleted ? 0 : e.count_update; },
             [](const DatabaseEntry& e) { return e.update_armed; })) {
        if (p.updates.size() == proto::max_section_records) break;
        DatabaseEntry& e = db_.entries.at(id);
        proto::VarUpdateRecord rec{id, e.seqno, e.value};
        if (!take(!p.updates.empty(), proto::update_record_size(rec))) continue;
        p.updates.push_back(rec);
        if (!config_.always_repeat) --e.count_update;
    }

    // Summaries, round-robin after the cursor.
    if (config_.summaries && config_.max_sum_cnt > 0) {
        std::vector<VarId> live;
        for (const auto& [id, e] : db_.entries) {
            if (!e.to_be_deleted) live.push_back(id);
        }
        const std::size_t limit =
            std::min({config_.max_sum_cnt, live.size(), proto::max_section_records});
        if (limit > 0) {
            std::size_t start = 0;
            if (db_.summary_cursor) {
                start = static_cast<std::size_t>(
                    std::upper_bound(live.begin(), live.end(), *db_.summary_cursor) - live.begin());
            }
            for (std::size_t n = 0; n < limit; ++n) {
                const VarId id = live[(start + n) % live.size()];
                if (!take(!p.summaries.empty(), proto::summary_record_size)) break;
                p.summaries.push_back({id, db_.entries.at(id).seqno});
                db_.summary_cursor = id;
            }
        }
    }

    // Requests: whatever fits is sent once and forgotten.
    for (auto it = db_.req_create.begin(); it != db_.req_create.end();) {
        if (p.req_creates.size() == proto::max_section_records ||
            !take(!p.req_creates.empty(), proto::req_create_record_size)) {
            break;
        }
        p.req_creates.push_back({*it});
        it = db_.req_create.erase(it);
    }
    for (auto it = db_.req_update.begin(); it != db_.req_update.end();) {
        if (p.req_updates.size() == proto::max_section_records ||
            !take(!p.req_updates.empty(), proto::req_update_record_size)) {
            break;
        }
        p.req_updates.push_back({it->first, it->second.local});
        it = db_.req_update.erase(it);
    }

    for (VarId id : drained) {
        const double lifetime = 10.0 * db_.entries.at(id).spec.rep_cnt / config_.beacon_rate_hz;
        db_.entries.erase(id);
        db_.tombstones[id] = now + lifetime;
    }

    if (p.empty()) return std::nullopt;
    return p;
}

std::vector<StateChange> VardisEntity::process_payload(const proto::VarDisPayload& payload,
                                                       double now) {
    using Kind = StateChange::Kind;
    purge_tombstones(now);
    std::vector<StateChange> changes;

    for (const auto& c : payload.creates) {
        const VarId id = c.spec.var_id;
        if (!valid_create(c)) {
            changes.push_back({Kind::RecordDropped, id, c.initial.seqno});
            continue;
        }
        if (db_.entries.contains(id) || tombstoned(id)) continue;
        DatabaseEntry e;
        e.spec = c.spec;
        e.value = c.initial.value;
        e.seqno = c.initial.seqno;
        e.last_update_received = now;
        arm_create(e);
        db_.entries.emplace(id, std::move(e));
        db_.req_create.erase(id);
        settle_update_request(id, c.initial.seqno);
        changes.push_back({Kind::Created, id, c.initial.seqno});
    }

    for (const auto& d : payload.deletes) {
        auto it = db_.entries.find(d.var_id);
        if (it == db_.entries.end() || it->second.to_be_deleted) continue;
        DatabaseEntry& e = it->second;
        e.to_be_deleted = true;
        e.count_delete = e.spec.rep_cnt;
        e.count_create = 0;
        e.count_update = 0;
        db_.req_update.erase(d.var_id);
        changes.push_back({Kind::DeleteStarted, d.var_id, e.seqno});
    }

    for (const auto& u : payload.updates) {
        auto it = db_.entries.find(u.var_id);
        if (it == db_.entries.end() || it->second.to_be_deleted) continue;
        DatabaseEntry& e = it->second;
        if (u.seqno == e.seqno) continue;
        if (u.seqno > e.seqno) {
            e.seqno = u.seqno;
            e.value = u.value;
            e.last_update_received = now;
            arm_update(e);
            settle_update_request(u.var_id, e.seqno);
            changes.push_back({Kind::Updated, u.var_id, e.seqno});
        } else {
            arm_update(e);
            changes.push_back({Kind::StaleRepair, u.var_id, e.seqno});
        }
    }

    for (const auto& s : payload.summaries) {
        auto it = db_.entries.find(s.var_id);
        if (it == db_.entries.end()) {
            if (tombstoned(s.var_id)) continue;
            if (db_.req_create.insert(s.var_id).second) {
                changes.push_back({Kind::CreateRequested, s.var_id, s.seqno});
            }
            continue;
        }
        const DatabaseEntry& e = it->second;
        if (e.to_be_deleted || s.seqno <= e.seqno) continue;
        auto [req, inserted] = db_.req_update.try_emplace(s.var_id, RealTimeDatabase::PendingUpdateRequest{e.seqno, s.seqno});
        if (!inserted) {
            req->second.local = e.seqno;
            req->second.wanted = std::max(req->second.wanted, s.seqno);
        }
        changes.push_back({Kind::UpdateRequested, s.var_id, e.seqno});
    }

    for (const auto& r : payload.req_creates) {
        auto it = db_.entries.find(r.var_id);
        if (it == db_.entries.end() || it->second.to_be_deleted) continue;
        arm_create(it->second);
        changes.push_back({Kind::CreateRescheduled, r.var_id, it->second.seqno});
    }

    for (const auto& r : payload.req_updates) {
        auto it = db_.entries.find(r.var_id);
        if (it == db_.entries.end() || it->second.to_be_deleted) continue;
        if (it->second.seqno <= r.seqno) continue;
        arm_update(it->second);
        changes.push_back({Kind::UpdateRescheduled, r.var_id, it->second.seqno});
    }

    return changes;
}

}  // namespace vardislab::vardis
