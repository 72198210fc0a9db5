#include "vardislab/proto/wire.hpp"

#include <limits>
#include <string>

namespace vardislab::proto {

namespace {

class ByteWriter {
public:
    explicit ByteWriter(std::size_t reserve) { out_.reserve(reserve); }

    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) { put_le(v, 2); }
    void u32(std::uint32_t v) { put_le(v, 4); }
    void u48(std::uint64_t v) { put_le(v, 6); }
    void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }

    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    void put_le(std::uint64_t v, int width) {
        for (int i = 0; i < width; ++i) {
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }

    std::vector<std::uint8_t> out_;
};

class ByteReader {
public:
    ByteReader(std::span<const std::uint8_t> in, WireErrc errc) : in_(in), errc_(errc) {}

    [[nodiscard]] bool done() const noexcept { return pos_ == in_.size(); }
    [[nodiscard]] std::size_t remaining() const noexcept { return in_.size() - pos_; }

    std::uint8_t u8() { return static_cast<std::uint8_t>(get_le(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(get_le(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get_le(4)); }
    std::uint64_t u48() { return get_le(6); }

    std::span<const std::uint8_t> bytes(std::size_t n) {
        need(n);
        auto s = in_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw WireError(errc_, what + " at offset " + std::to_string(pos_));
    }

private:
    void need(std::size_t n) const {
        if (remaining() < n) fail("truncated input");
    }

    std::uint64_t get_le(int width) {
        need(static_cast<std::size_t>(width));
        std::uint64_t v = 0;
        for (int i = 0; i < width; ++i) {
            v |= std::uint64_t{in_[pos_ + static_cast<std::size_t>(i)]} << (8 * i);
        }
        pos_ += static_cast<std::size_t>(width);
        return v;
    }

    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
    WireErrc errc_;
};

[[noreturn]] void invalid(const std::string& what) {
    throw WireError(WireErrc::InvalidRecord, what);
}

void check_seqno(SeqNo s) {
    if (s > std::numeric_limits<std::uint32_t>::max()) invalid("sequence number exceeds 32 bits");
}

void check_spec(const VariableSpecification& s) {
    if (s.rep_cnt < 1 || s.rep_cnt > max_rep_cnt) invalid("repCnt outside 1..15");
    if (s.description.size() > max_description_length) invalid("description exceeds 32 bytes");
    if (s.producer.value > NodeId::max_value) invalid("producer id exceeds 48 bits");
}

template <typename Records>
void check_count(const Records& r) {
    if (r.size() > max_section_records) invalid("more than 255 records in one section");
}

void write_update(ByteWriter& w, const VarUpdateRecord& r) {
    w.u16(r.var_id.value);
    w.u32(static_cast<std::uint32_t>(r.seqno));
    w.u8(static_cast<std::uint8_t>(r.value.size()));
    w.bytes(r.value.bytes());
}

VarUpdateRecord read_update(ByteReader& r) {
    VarUpdateRecord u;
    u.var_id = VarId{r.u16()};
    u.seqno = r.u32();
    const std::uint8_t len = r.u8();
    if (len > max_value_length) r.fail("value length exceeds 64 bytes");
    u.value = VarValue(r.bytes(len));
    return u;
}

template <typename Records, typename WriteFn>
void write_section(ByteWriter& w, SectionType type, const Records& records, WriteFn&& write_one) {
    if (records.empty()) return;
    w.u8(static_cast<std::uint8_t>(type));
    w.u8(static_cast<std::uint8_t>(records.size()));
    for (const auto& rec : records) write_one(rec);
}

}  // namespace

std::size_t encoded_payload_size(const VarDisPayload& p) noexcept {
    std::size_t n = 0;
    auto header = [&](const auto& v) { n += v.empty() ? 0 : section_header_size; };
    header(p.creates);
    header(p.deletes);
    header(p.updates);
    header(p.summaries);
    header(p.req_creates);
    header(p.req_updates);
    for (const auto& c : p.creates) n += create_record_size(c);
    n += p.deletes.size() * delete_record_size;
    for (const auto& u : p.updates) n += update_record_size(u);
    n += p.summaries.size() * summary_record_size;
    n += p.req_creates.size() * req_create_record_size;
    n += p.req_updates.size() * req_update_record_size;
    return n;
}

std::vector<std::uint8_t> encode_payload(const VarDisPayload& p, std::size_t limit) {
    check_count(p.creates);
    check_count(p.deletes);
    check_count(p.updates);
    check_count(p.summaries);
    check_count(p.req_creates);
    check_count(p.req_updates);
    for (const auto& c : p.creates) {
        check_spec(c.spec);
        if (c.spec.var_id != c.initial.var_id) invalid("create record varId mismatch");
        check_seqno(c.initial.seqno);
    }
    for (const auto& u : p.updates) check_seqno(u.seqno);
    for (const auto& s : p.summaries) check_seqno(s.seqno);
    for (const auto& q : p.req_updates) check_seqno(q.seqno);

    const std::size_t size = encoded_payload_size(p);
    if (size > limit) {
        throw WireError(WireErrc::EncodedTooLarge, "payload of " + std::to_string(size) +
                                                       " bytes exceeds limit " +
                                                       std::to_string(limit));
    }

    ByteWriter w(size);
    write_section(w, SectionType::Create, p.creates, [&](const VarCreateRecord& c) {
        w.u16(c.spec.var_id.value);
        w.u48(c.spec.producer.value);
        w.u8(c.spec.rep_cnt);
        w.u8(static_cast<std::uint8_t>(c.spec.description.size()));
        w.bytes({reinterpret_cast<const std::uint8_t*>(c.spec.description.data()),
                 c.spec.description.size()});
        write_update(w, c.initial);
    });
    write_section(w, SectionType::Delete, p.deletes,
                  [&](const VarDeleteRecord& d) { w.u16(d.var_id.value); });
    write_section(w, SectionType::Update, p.updates,
                  [&](const VarUpdateRecord& u) { write_update(w, u); });
    write_section(w, SectionType::Summary, p.summaries, [&](const VarSummaryRecord& s) {
        w.u16(s.var_id.value);
        w.u32(static_cast<std::uint32_t>(s.seqno));
    });
    write_section(w, SectionType::ReqCreate, p.req_creates,
                  [&](const VarReqCreateRecord& r) { w.u16(r.var_id.value); });
    write_section(w, SectionType::ReqUpdate, p.req_updates, [&](const VarReqUpdateRecord& r) {
        w.u16(r.var_id.value);
        w.u32(static_cast<std::uint32_t>(r.seqno));
    });
    return w.take();
}

VarDisPayload decode_payload(std::span<const std::uint8_t> bytes) {
    VarDisPayload p;
    ByteReader r(bytes, WireErrc::MalformedPayload);
    int last_type = 0;
    while (!r.done()) {
        const int type = r.u8();
        if (type < static_cast<int>(SectionType::Create) ||
            type > static_cast<int>(SectionType::ReqUpdate)) {
            r.fail("unknown section type " + std::to_string(type));
        }
        if (type <= last_type) r.fail("section out of priority order");
        last_type = type;
        const std::uint8_t count = r.u8();
        if (count == 0) r.fail("empty section");

        for (std::uint8_t i = 0; i < count; ++i) {
            switch (static_cast<SectionType>(type)) {
                case SectionType::Create: {
                    VarCreateRecord c;
                    c.spec.var_id = VarId{r.u16()};
                    c.spec.producer = NodeId{r.u48()};
                    c.spec.rep_cnt = r.u8();
                    const std::uint8_t dlen = r.u8();
                    if (dlen > max_description_length) r.fail("description exceeds 32 bytes");
                    auto d = r.bytes(dlen);
                    c.spec.description.assign(d.begin(), d.end());
                    c.initial = read_update(r);
                    p.creates.push_back(std::move(c));
                    break;
                }
                case SectionType::Delete:
                    p.deletes.push_back({VarId{r.u16()}});
                    break;
                case SectionType::Update:
                    p.updates.push_back(read_update(r));
                    break;
                case SectionType::Summary: {
                    VarSummaryRecord s;
                    s.var_id = VarId{r.u16()};
                    s.seqno = r.u32();
                    p.summaries.push_back(s);
                    break;
                }
                case SectionType::ReqCreate:
                    p.req_creates.push_back({VarId{r.u16()}});
                    break;
                case SectionType::ReqUpdate: {
                    VarReqUpdateRecord q;
                    q.var_id = VarId{r.u16()};
                    q.seqno = r.u32();
                    p.req_updates.push_back(q);
                    break;
                }
            }
        }
    }
    return p;
}

std::vector<std::uint8_t> encode_update_record(const VarUpdateRecord& r) {
    check_seqno(r.seqno);
    ByteWriter w(update_record_size(r));
    write_update(w, r);
    return w.take();
}

VarUpdateRecord decode_update_record(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes, WireErrc::MalformedFrame);
    VarUpdateRecord u = read_update(r);
    if (!r.done()) r.fail("trailing bytes after update record");
    return u;
}

std::size_t encoded_beacon_size(const Beacon& b) noexcept {
    std::size_t n = beacon_header_size;
    for (const auto& pl : b.payloads) n += beacon_payload_header_size + pl.bytes.size();
    return n;
}

std::vector<std::uint8_t> encode_beacon(const Beacon& b) {
    if (b.sender.value > NodeId::max_value) invalid("sender id exceeds 48 bits");
    ByteWriter w(encoded_beacon_size(b));
    w.u8(beacon_version);
    w.u48(b.sender.value);
    w.u32(b.bp_seqno);
    for (const auto& pl : b.payloads) {
        if (pl.bytes.size() > std::numeric_limits<std::uint16_t>::max()) {
            invalid("client payload exceeds 65535 bytes");
        }
        w.u8(pl.client);
        w.u16(static_cast<std::uint16_t>(pl.bytes.size()));
        w.bytes(pl.bytes);
    }
    return w.take();
}

Beacon decode_beacon(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes, WireErrc::MalformedBeacon);
    if (r.u8() != beacon_version) r.fail("unsupported beacon version");
    Beacon b;
    b.sender = NodeId{r.u48()};
    b.bp_seqno = r.u32();
    while (!r.done()) {
        BeaconPayload pl;
        pl.client = r.u8();
        const std::uint16_t len = r.u16();
        auto body = r.bytes(len);
        pl.bytes.assign(body.begin(), body.end());
        b.payloads.push_back(std::move(pl));
    }
    return b;
}

namespace {
constexpr std::uint8_t flood_frame_type = 0xF1;
}

std::vector<std::uint8_t> encode_flood_packet(const FloodPacket& p) {
    if (p.source.value > NodeId::max_value) invalid("source id exceeds 48 bits");
    if (p.payload.size() > std::numeric_limits<std::uint16_t>::max()) {
        invalid("flood payload exceeds 65535 bytes");
    }
    ByteWriter w(flood_header_size + p.payload.size());
    w.u8(flood_frame_type);
    w.u48(p.source.value);
    w.u32(p.flood_seqno);
    w.u8(p.ttl);
    w.u16(static_cast<std::uint16_t>(p.payload.size()));
    w.bytes(p.payload);
    return w.take();
}

FloodPacket decode_flood_packet(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes, WireErrc::MalformedFrame);
    if (r.u8() != flood_frame_type) r.fail("not a flooding frame");
    FloodPacket p;
    p.source = NodeId{r.u48()};
    p.flood_seqno = r.u32();
    p.ttl = r.u8();
    const std::uint16_t len = r.u16();
    auto body = r.bytes(len);
    p.payload.assign(body.begin(), body.end());
    if (!r.done()) r.fail("trailing bytes after flooding payload");
    return p;
}

}  // namespace vardislab::proto
