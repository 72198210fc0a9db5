#include "vardislab/proto/wire.hpp"
#include "vardislab/vardis/entity.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace vardislab;
using namespace vardislab::vardis;
using proto::VariableSpecification;

namespace {

constexpr NodeId self{1};
constexpr NodeId other{2};

VarValue val(std::uint8_t b, std::size_t n = 4) {
    std::vector<std::uint8_t> v(n, b);
    return VarValue(v);
}

VariableSpecification spec(std::uint16_t id, std::uint8_t rep, NodeId prod = self) {
    return {VarId{id}, prod, rep, "v"};
}

VardisEntity entity(bool summaries = true, std::size_t max_sum = 10) {
    VardisConfig c;
    c.summaries = summaries;
    c.max_sum_cnt = max_sum;
    return VardisEntity(self, c);
}

bool has_create(const proto::VarDisPayload& p, std::uint16_t id) {
    return std::any_of(p.creates.begin(), p.creates.end(),
                       [id](const auto& c) { return c.spec.var_id.value == id; });
}

bool has_update(const proto::VarDisPayload& p, std::uint16_t id) {
    return std::any_of(p.updates.begin(), p.updates.end(),
                       [id](const auto& u) { return u.var_id.value == id; });
}

}  // namespace

TEST(VardisCrud, CreateThenRead) {
    auto e = entity();
    e.create_variable(spec(7, 1), val(0xAB), 1.5);
    const auto r = e.read_variable(VarId{7});
    EXPECT_EQ(r.value, val(0xAB));
    EXPECT_EQ(r.seqno, 0U);
    EXPECT_EQ(r.last_update_received, 1.5);
}

TEST(VardisCrud, CreateTwiceFails) {
    auto e = entity();
    e.create_variable(spec(7, 1), val(1), 0);
    try {
        e.create_variable(spec(7, 1), val(1), 0);
        FAIL();
    } catch (const VardisError& err) {
        EXPECT_EQ(err.code(), VardisErrc::VariableExists);
    }
}

TEST(VardisCrud, CreateValidatesArguments) {
    auto e = entity();
    EXPECT_THROW(e.create_variable(spec(1, 0), val(1), 0), VardisError);
    EXPECT_THROW(e.create_variable(spec(1, 16), val(1), 0), VardisError);
    EXPECT_THROW(e.create_variable(spec(1, 1, other), val(1), 0), VardisError);
    auto s = spec(1, 1);
    s.description = std::string(33, 'x');
    EXPECT_THROW(e.create_variable(s, val(1), 0), VardisError);
}

TEST(VardisCrud, CreateRepeatsExactlyRepCntPayloads) {
    auto e = entity(false);
    e.create_variable(spec(7, 3), val(1), 0);
    int with_create = 0;
    for (int i = 0; i < 10; ++i) {
        auto p = e.make_payload(500, i);
        if (p && has_create(*p, 7)) ++with_create;
    }
    EXPECT_EQ(with_create, 3);
}

TEST(VardisCrud, TwoUpdatesGiveSeqnoTwo) {
    auto e = entity();
    e.create_variable(spec(3, 1), val(0), 0);
    e.update_variable(VarId{3}, val(1), 1);
    e.update_variable(VarId{3}, val(2), 2);
    const auto r = e.read_variable(VarId{3});
    EXPECT_EQ(r.seqno, 2U);
    EXPECT_EQ(r.value, val(2));
}

TEST(VardisCrud, UpdateFromNonProducerRejected) {
    auto e = entity();
    proto::VarDisPayload p;
    p.creates.push_back({spec(9, 1, other), {VarId{9}, 0, val(0)}});
    (void)e.process_payload(p, 0);
    try {
        e.update_variable(VarId{9}, val(1), 1);
        FAIL();
    } catch (const VardisError& err) {
        EXPECT_EQ(err.code(), VardisErrc::NotProducer);
    }
    EXPECT_THROW(e.delete_variable(VarId{9}, 1), VardisError);
}

TEST(VardisCrud, UpdateRepeatsExactlyRepCntPayloads) {
    auto e = entity(false);
    e.create_variable(spec(4, 2), val(0), 0);
    for (int i = 0; i < 5; ++i) (void)e.make_payload(500, i);
    e.update_variable(VarId{4}, val(1), 10);
    std::vector<bool> seen;
    for (int i = 0; i < 5; ++i) {
        auto p = e.make_payload(500, 10 + i);
        seen.push_back(p && has_update(*p, 4));
    }
    EXPECT_EQ(seen, (std::vector<bool>{true, true, false, false, false}));
}

TEST(VardisCrud, UpdateUnknownIsNotFound) {
    auto e = entity();
    try {
        e.update_variable(VarId{1}, val(1), 0);
        FAIL();
    } catch (const VardisError& err) {
        EXPECT_EQ(err.code(), VardisErrc::NotFound);
    }
}

TEST(VardisCrud, DeleteDrainsThenNotFound) {
    auto e = entity(false);
    e.create_variable(spec(5, 2), val(0), 0);
    (void)e.make_payload(500, 0);
    (void)e.make_payload(500, 0.1);
    e.delete_variable(VarId{5}, 1);
    try {
        e.update_variable(VarId{5}, val(1), 1);
        FAIL();
    } catch (const VardisError& err) {
        EXPECT_EQ(err.code(), VardisErrc::BeingDeleted);
    }
    EXPECT_NO_THROW((void)e.read_variable(VarId{5}));
    int deletes = 0;
    for (int i = 0; i < 4; ++i) {
        auto p = e.make_payload(500, 1 + 0.1 * i);
        if (p) deletes += static_cast<int>(p->deletes.size());
    }
    EXPECT_EQ(deletes, 2);
    EXPECT_THROW((void)e.read_variable(VarId{5}), VardisError);
    EXPECT_TRUE(e.list_variables().empty());
    // Tombstoned: the name cannot be reused until the tombstone expires (10*2/10 = 2 s).
    EXPECT_THROW(e.create_variable(spec(5, 2), val(0), 1.5), VardisError);
    EXPECT_NO_THROW(e.create_variable(spec(5, 2), val(0), 3.5));
}

TEST(VardisCrud, DeleteUnknownIsNotFound) {
    auto e = entity();
    try {
        e.delete_variable(VarId{1}, 0);
        FAIL();
    } catch (const VardisError& err) {
        EXPECT_EQ(err.code(), VardisErrc::NotFound);
    }
}

TEST(VardisPayload, EmptyDatabaseGivesNothing) {
    auto e = entity();
    EXPECT_FALSE(e.make_payload(200, 0).has_value());
}

TEST(VardisPayload, SummariesRoundRobin) {
    auto ids = [](const proto::VarDisPayload& p) {
        std::vector<std::uint16_t> out;
        for (const auto& s : p.summaries) out.push_back(s.var_id.value);
        return out;
    };
    auto g = entity(true, 10);
    for (std::uint16_t id = 1; id <= 25; ++id) g.create_variable(spec(id, 1), val(0, 0), 0);
    std::vector<std::vector<std::uint16_t>> got;
    for (int i = 0; i < 3; ++i) {
        auto p = g.make_payload(5000, 0);
        ASSERT_TRUE(p);
        got.push_back(ids(*p));
    }
    std::vector<std::uint16_t> a, b, c;
    for (std::uint16_t i = 1; i <= 10; ++i) a.push_back(i);
    for (std::uint16_t i = 11; i <= 20; ++i) b.push_back(i);
    for (std::uint16_t i = 21; i <= 25; ++i) c.push_back(i);
    for (std::uint16_t i = 1; i <= 5; ++i) c.push_back(i);
    EXPECT_EQ(got[0], a);
    EXPECT_EQ(got[1], b);
    EXPECT_EQ(got[2], c);
}

TEST(VardisPayload, SectionsRespectBudgetAndPriority) {
    auto e = entity(true, 10);
    e.create_variable(spec(1, 5), val(0, 8), 0);
    for (int i = 0; i < 5; ++i) (void)e.make_payload(500, 0);
    e.update_variable(VarId{1}, val(1, 8), 1);
    // Update record: 2 + 4 + 1 + 8 = 15 B plus 2 B section header. Summary
    // would need 8 more; a 20 B budget only fits the update.
    auto p = e.make_payload(20, 1);
    ASSERT_TRUE(p);
    EXPECT_EQ(p->updates.size(), 1U);
    EXPECT_TRUE(p->summaries.empty());
    EXPECT_LE(proto::encoded_payload_size(*p), 20U);
    auto q = e.make_payload(8, 1);
    ASSERT_TRUE(q);
    EXPECT_TRUE(q->updates.empty());
    EXPECT_EQ(q->summaries.size(), 1U);
}

TEST(VardisPayload, EncodedSizeNeverExceedsBudget) {
    auto e = entity(true, 10);
    for (std::uint16_t id = 1; id <= 40; ++id) e.create_variable(spec(id, 3), val(1, 12), 0);
    for (std::size_t budget : {20, 50, 100, 186, 286}) {
        for (int i = 0; i < 20; ++i) {
            auto p = e.make_payload(budget, 0);
            if (p) ASSERT_LE(proto::encoded_payload_size(*p), budget);
        }
    }
}

TEST(VardisReceive, SameSeqnoIgnored) {
    auto e = entity();
    proto::VarDisPayload c;
    c.creates.push_back({spec(9, 2, other), {VarId{9}, 5, val(5)}});
    (void)e.process_payload(c, 0);
    for (int i = 0; i < 3; ++i) (void)e.make_payload(500, 0);
    proto::VarDisPayload u;
    u.updates.push_back({VarId{9}, 5, val(5)});
    EXPECT_TRUE(e.process_payload(u, 1).empty());
    EXPECT_EQ(e.database().entries.at(VarId{9}).count_update, 0);
}

TEST(VardisReceive, OlderSeqnoReschedulesLocalValue) {
    auto e = entity();
    proto::VarDisPayload c;
    c.creates.push_back({spec(9, 2, other), {VarId{9}, 5, val(5)}});
    (void)e.process_payload(c, 0);
    for (int i = 0; i < 3; ++i) (void)e.make_payload(500, 0);
    proto::VarDisPayload u;
    u.updates.push_back({VarId{9}, 3, val(3)});
    const auto ch = e.process_payload(u, 1);
    ASSERT_EQ(ch.size(), 1U);
    EXPECT_EQ(ch[0].kind, StateChange::Kind::StaleRepair);
    const auto& entry = e.database().entries.at(VarId{9});
    EXPECT_EQ(entry.count_update, 2);
    EXPECT_EQ(entry.seqno, 5U);
    EXPECT_EQ(entry.value, val(5));
}

TEST(VardisReceive, NewerSeqnoAdopted) {
    auto e = entity();
    proto::VarDisPayload c;
    c.creates.push_back({spec(9, 2, other), {VarId{9}, 1, val(1)}});
    (void)e.process_payload(c, 0);
    proto::VarDisPayload u;
    u.updates.push_back({VarId{9}, 4, val(4)});
    const auto ch = e.process_payload(u, 2.5);
    ASSERT_EQ(ch.size(), 1U);
    EXPECT_EQ(ch[0].kind, StateChange::Kind::Updated);
    const auto r = e.read_variable(VarId{9});
    EXPECT_EQ(r.seqno, 4U);
    EXPECT_EQ(r.value, val(4));
    EXPECT_EQ(r.last_update_received, 2.5);
}

TEST(VardisReceive, SummaryForUnknownTriggersCreateRequest) {
    auto e = entity();
    proto::VarDisPayload s;
    s.summaries.push_back({VarId{9}, 4});
    (void)e.process_payload(s, 0);
    EXPECT_TRUE(e.database().req_create.contains(VarId{9}));
    auto p = e.make_payload(200, 0);
    ASSERT_TRUE(p);
    ASSERT_EQ(p->req_creates.size(), 1U);
    EXPECT_EQ(p->req_creates[0].var_id, VarId{9});
    EXPECT_FALSE(e.make_payload(200, 0).has_value());
}

TEST(VardisReceive, NewerSummaryTriggersUpdateRequestWithLocalSeqno) {
    auto e = entity(false);
    proto::VarDisPayload c;
    c.creates.push_back({spec(9, 1, other), {VarId{9}, 2, val(2)}});
    (void)e.process_payload(c, 0);
    (void)e.make_payload(500, 0);
    proto::VarDisPayload s;
    s.summaries.push_back({VarId{9}, 6});
    (void)e.process_payload(s, 1);
    auto p = e.make_payload(200, 1);
    ASSERT_TRUE(p);
    ASSERT_EQ(p->req_updates.size(), 1U);
    EXPECT_EQ(p->req_updates[0].seqno, 2U);
}

TEST(VardisReceive, RequestsRearmCounters) {
    auto e = entity(false);
    e.create_variable(spec(3, 2), val(0), 0);
    e.update_variable(VarId{3}, val(1), 0);
    for (int i = 0; i < 3; ++i) (void)e.make_payload(500, 0);
    proto::VarDisPayload r;
    r.req_creates.push_back({VarId{3}});
    r.req_updates.push_back({VarId{3}, 0});
    (void)e.process_payload(r, 1);
    const auto& entry = e.database().entries.at(VarId{3});
    EXPECT_EQ(entry.count_create, 2);
    EXPECT_EQ(entry.count_update, 2);
    // A request naming the current seqno does not re-arm.
    for (int i = 0; i < 3; ++i) (void)e.make_payload(500, 1);
    proto::VarDisPayload same;
    same.req_updates.push_back({VarId{3}, 1});
    (void)e.process_payload(same, 2);
    EXPECT_EQ(e.database().entries.at(VarId{3}).count_update, 0);
}

TEST(VardisReceive, InvalidCreateDropped) {
    auto e = entity();
    proto::VarDisPayload c;
    c.creates.push_back({spec(9, 1, other), {VarId{8}, 0, val(0)}});
    const auto ch = e.process_payload(c, 0);
    ASSERT_EQ(ch.size(), 1U);
    EXPECT_EQ(ch[0].kind, StateChange::Kind::RecordDropped);
    EXPECT_TRUE(e.list_variables().empty());
}

TEST(VardisReceive, DeleteRecordStartsDeletion) {
    auto e = entity(false);
    proto::VarDisPayload c;
    c.creates.push_back({spec(9, 2, other), {VarId{9}, 0, val(0)}});
    (void)e.process_payload(c, 0);
    proto::VarDisPayload d;
    d.deletes.push_back({VarId{9}});
    (void)e.process_payload(d, 1);
    const auto& entry = e.database().entries.at(VarId{9});
    EXPECT_TRUE(entry.to_be_deleted);
    EXPECT_EQ(entry.count_delete, 2);
    EXPECT_EQ(entry.count_create, 0);
}

TEST(VardisAlwaysRepeat, UpdateNeverDrains) {
    VardisConfig c;
    c.summaries = false;
    c.always_repeat = true;
    VardisEntity e(self, c);
    e.create_variable(spec(1, 1), val(0), 0);
    e.update_variable(VarId{1}, val(1), 0);
    for (int i = 0; i < 20; ++i) {
        auto p = e.make_payload(200, 0);
        ASSERT_TRUE(p);
        EXPECT_TRUE(has_update(*p, 1));
    }
}
