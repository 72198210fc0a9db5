#include "vardislab/sim/simulation.hpp"

#include "vardislab/flooding/flooding.hpp"
#include "vardislab/proto/wire.hpp"
#include "vardislab/rng.hpp"
#include "vardislab/sim/channel.hpp"
#include "vardislab/sim/event_queue.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

namespace vardislab::sim {

std::string_view to_string(Protocol p) {
    switch (p) {
        case Protocol::Vardis: return "vardis";
        case Protocol::VardisAlwaysRepeat: return "vardis-always-repeat";
        case Protocol::Flooding: return "flooding";
    }
    return "?";
}

Protocol protocol_from_string(std::string_view s) {
    for (auto p : {Protocol::Vardis, Protocol::VardisAlwaysRepeat, Protocol::Flooding}) {
        if (to_string(p) == s) return p;
    }
    throw std::invalid_argument("unknown protocol '" + std::string(s) + "'");
}

std::string_view to_string(UpdateDistribution d) {
    return d == UpdateDistribution::Periodic ? "periodic" : "exponential";
}

UpdateDistribution update_distribution_from_string(std::string_view s) {
    if (s == "periodic") return UpdateDistribution::Periodic;
    if (s == "exponential") return UpdateDistribution::Exponential;
    throw std::invalid_argument("unknown update distribution '" + std::string(s) + "'");
}

proto::VarValue encode_app_value(const AppValue& v) {
    std::array<std::uint8_t, app_value_length> b{};
    const auto bits = std::bit_cast<std::uint64_t>(v.gen_time);
    for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(bits >> (8 * i));
    for (int i = 0; i < 4; ++i) {
        b[static_cast<std::size_t>(8 + i)] = static_cast<std::uint8_t>(v.app_seqno >> (8 * i));
    }
    return proto::VarValue(b);
}

AppValue decode_app_value(const proto::VarValue& v) {
    if (v.size() != app_value_length) throw std::invalid_argument("not an application value");
    auto b = v.bytes();
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= std::uint64_t{b[static_cast<std::size_t>(i)]} << (8 * i);
    std::uint32_t seq = 0;
    for (int i = 0; i < 4; ++i) seq |= std::uint32_t{b[static_cast<std::size_t>(8 + i)]} << (8 * i);
    return {std::bit_cast<double>(bits), seq};
}

void validate(const SimConfig& c) {
    auto fail = [](const std::string& what) { throw SimError(SimErrc::ConfigInvalid, what); };
    const std::size_t n = c.deployment.node_count();
    if (n < 2) fail("deployment has fewer than two nodes");
    if (c.deployment.loss.size() != n) fail("loss matrix does not match the deployment");
    if (!(c.duration_s >= 0.0)) fail("duration must be non-negative");
    if (!(c.warmup_s >= 0.0)) fail("warm-up must be non-negative");
    if (!(c.timing.rate_hz > 0.0)) fail("beacon rate must be positive");
    if (!(c.timing.jitter >= 0.0 && c.timing.jitter < 1.0)) fail("jitter must be in [0,1)");
    if (c.rep_cnt < 1 || c.rep_cnt > proto::max_rep_cnt) fail("repCnt must be in 1..15");
    if (c.max_beacon_size <= proto::beacon_header_size + proto::beacon_payload_header_size + 32) {
        fail("maximum beacon size too small");
    }
    if (!(c.traffic.update_period_s > 0.0)) fail("update period must be positive");
    if (c.queue_sample_interval_s < 0.0) fail("queue sample interval must be non-negative");
    if (!(c.flood_mean_backoff_s > 0.0)) fail("flooding backoff must be positive");
    if (n > 0xFFFF) fail("too many nodes for 16-bit variable identifiers");
    for (auto p : c.traffic.producers) {
        if (p >= n) fail("producer " + std::to_string(p) + " not in deployment");
    }
    for (auto p : c.consumers) {
        if (p >= n) fail("consumer " + std::to_string(p) + " not in deployment");
    }
}

namespace {

/// A transmitted frame shared by all of its receivers.
struct Frame {
    std::vector<std::uint8_t> bytes;
    std::optional<proto::Beacon> beacon;
    std::optional<proto::FloodPacket> flood;
};

struct Event {
    enum class Kind : std::uint8_t { Beacon, Arrival, Update, FloodTransmit, QueueSample };
    Kind kind;
    std::uint32_t node = 0;
    std::shared_ptr<const Frame> frame;
};

struct Node {
    Node(std::size_t index, std::uint64_t seed)
        : id{index},
          beacon_rng(stream_seed(seed, index, "beacon")),
          channel_rng(stream_seed(seed, index, "channel")),
          traffic_rng(stream_seed(seed, index, "traffic")),
          backoff_rng(stream_seed(seed, index, "backoff")) {}

    proto::NodeId id;
    std::optional<bp::BeaconingProtocol> bp;
    std::optional<bp::ClientHandle> vardis_handle;
    std::optional<vardis::VardisEntity> vardis;
    std::optional<flooding::FloodingNode> flood;
    RandomStream beacon_rng;
    RandomStream channel_rng;
    RandomStream traffic_rng;
    RandomStream backoff_rng;
    std::uint32_t app_seqno = 0;
    bool consumer = false;
};

proto::VarId var_of(std::size_t node) { return proto::VarId{static_cast<std::uint16_t>(node + 1)}; }

class Kernel {
public:
    Kernel(const SimConfig& config, std::uint64_t seed, SimObserver* observer)
        : cfg_(config), channel_(config.deployment.loss), observer_(observer) {
        const std::size_t n = cfg_.deployment.node_count();
        nodes_.reserve(n);
        for (std::size_t i = 0; i < n; ++i) nodes_.emplace_back(i, seed);
        for (auto c : cfg_.consumers) nodes_[c].consumer = true;
        result_.issued.assign(n, 0);

        for (auto& node : nodes_) {
            if (cfg_.protocol == Protocol::Flooding) {
                node.flood.emplace(node.id, flooding::FloodingConfig{cfg_.rep_cnt,
                                                                     cfg_.flood_mean_backoff_s});
            } else {
                node.bp.emplace(node.id, cfg_.max_beacon_size);
                node.vardis_handle =
                    node.bp->register_client(proto::vardis_client_id, bp::BufferMode::BufferedOnce);
                vardis::VardisConfig vc;
                vc.max_sum_cnt = cfg_.max_sum_cnt;
                vc.summaries = cfg_.summaries;
                vc.always_repeat = cfg_.protocol == Protocol::VardisAlwaysRepeat;
                vc.beacon_rate_hz = cfg_.timing.rate_hz;
                node.vardis.emplace(node.id, vc);
            }
        }
    }

    RunResult run() {
        schedule_start();
        while (!events_.empty() && events_.next_time() <= cfg_.duration_s) {
            auto e = events_.pop();
            dispatch(e.time, e.payload);
        }
        return std::move(result_);
    }

private:
    void schedule(double time, Event e) { events_.schedule(time, std::move(e)); }

    void schedule_start() {
        for (auto p : cfg_.traffic.producers) {
            Node& node = nodes_[p];
            if (node.vardis) {
                proto::VariableSpecification spec{var_of(p), node.id, cfg_.rep_cnt,
                                                  "node " + std::to_string(p)};
                node.vardis->create_variable(spec, encode_app_value({0.0, 0}), 0.0);
            }
            const double first =
                cfg_.traffic.distribution == UpdateDistribution::Periodic
                    ? node.traffic_rng.uniform(0.0, cfg_.traffic.update_period_s)
                    : node.traffic_rng.exponential(1.0 / cfg_.traffic.update_period_s);
            schedule(first, {Event::Kind::Update, static_cast<std::uint32_t>(p), nullptr});
        }
        if (cfg_.protocol != Protocol::Flooding) {
            // Random initial phase so that periodic beaconing starts desynchronized.
            const double period = 1.0 / cfg_.timing.rate_hz;
            for (std::size_t i = 0; i < nodes_.size(); ++i) {
                Node& node = nodes_[i];
                const double first =
                    cfg_.timing.distribution == bp::BeaconTiming::Distribution::Exponential
                        ? node.beacon_rng.exponential(cfg_.timing.rate_hz)
                        : node.beacon_rng.uniform(0.0, period);
                schedule(first, {Event::Kind::Beacon, static_cast<std::uint32_t>(i), nullptr});
            }
        }
        if (cfg_.queue_sample_interval_s > 0.0 && cfg_.protocol == Protocol::Flooding) {
            schedule(0.0, {Event::Kind::QueueSample, 0, nullptr});
        }
    }

    void dispatch(double now, const Event& e) {
        switch (e.kind) {
            case Event::Kind::Beacon: on_beacon(now, e.node); break;
            case Event::Kind::Arrival: on_arrival(now, e.node, *e.frame); break;
            case Event::Kind::Update: on_update(now, e.node); break;
            case Event::Kind::FloodTransmit: on_flood_transmit(now, e.node); break;
            case Event::Kind::QueueSample: on_queue_sample(now); break;
        }
    }

    void on_beacon(double now, std::size_t i) {
        Node& node = nodes_[i];
        if (auto payload = node.vardis->make_payload(node.bp->max_payload_size(), now)) {
            if (observer_) observer_->on_payload(now, i, *payload);
            node.bp->submit_payload(*node.vardis_handle,
                                    proto::encode_payload(*payload, node.bp->max_payload_size()));
        }
        if (auto beacon = node.bp->assemble_beacon()) {
            auto frame = std::make_shared<Frame>();
            frame->bytes = proto::encode_beacon(*beacon);
            frame->beacon = proto::decode_beacon(frame->bytes);
            transmit(now, i, std::move(frame));
        }
        schedule(bp::next_beacon_time(cfg_.timing, node.beacon_rng, now),
                 {Event::Kind::Beacon, static_cast<std::uint32_t>(i), nullptr});
    }

    void transmit(double now, std::size_t sender, std::shared_ptr<const Frame> frame) {
        ++result_.frames_sent;
        for (const Delivery& d :
             channel_.broadcast(sender, frame->bytes.size(), now, nodes_[sender].channel_rng)) {
            ++result_.frames_delivered;
            schedule(d.time, {Event::Kind::Arrival, static_cast<std::uint32_t>(d.receiver), frame});
        }
    }

    void on_arrival(double now, std::size_t i, const Frame& frame) {
        Node& node = nodes_[i];
        if (frame.flood) {
            on_flood_arrival(now, i, *frame.flood);
            return;
        }
        for (const bp::Dispatch& d : node.bp->on_receive_beacon(*frame.beacon)) {
            if (d.client != proto::vardis_client_id) continue;
            proto::VarDisPayload payload;
            try {
                payload = proto::decode_payload(d.bytes);
            } catch (const proto::WireError&) {
                continue;
            }
            const auto changes = node.vardis->process_payload(payload, now);
            if (observer_) observer_->on_changes(now, i, changes);
            if (!node.consumer) continue;
            for (const auto& c : changes) {
                if (c.kind != vardis::StateChange::Kind::Created &&
                    c.kind != vardis::StateChange::Kind::Updated) {
                    continue;
                }
                const auto reading = node.vardis->read_variable(c.var_id);
                const std::size_t producer =
                    node.vardis->database().entries.at(c.var_id).spec.producer.value;
                record(now, i, producer, c.var_id.value, reading.value);
            }
        }
    }

    void record(double now, std::size_t consumer, std::size_t producer, std::uint16_t var,
                const proto::VarValue& value) {
        if (value.size() != app_value_length) return;
        const AppValue app = decode_app_value(value);
        Sample s{consumer, producer, var, app.app_seqno, app.gen_time, now};
        if (observer_) observer_->on_delivery(s);
        if (now >= cfg_.warmup_s) result_.samples.push_back(s);
    }

    void on_update(double now, std::size_t i) {
        Node& node = nodes_[i];
        const std::uint32_t seq = ++node.app_seqno;
        const proto::VarValue value = encode_app_value({now, seq});
        if (now >= cfg_.warmup_s) ++result_.issued[i];
        if (observer_) observer_->on_update_issued(now, i, seq);

        if (node.vardis) {
            node.vardis->update_variable(var_of(i), value, now);
        } else {
            node.flood->flood_submit(proto::encode_update_record({var_of(i), seq, value}));
            kick_flood_worker(now, i);
        }

        const double gap = cfg_.traffic.distribution == UpdateDistribution::Periodic
                               ? cfg_.traffic.update_period_s
                               : node.traffic_rng.exponential(1.0 / cfg_.traffic.update_period_s);
        schedule(now + gap, {Event::Kind::Update, static_cast<std::uint32_t>(i), nullptr});
    }

    void kick_flood_worker(double now, std::size_t i) {
        Node& node = nodes_[i];
        if (auto at = node.flood->flood_worker_step(node.backoff_rng, now)) {
            schedule(*at, {Event::Kind::FloodTransmit, static_cast<std::uint32_t>(i), nullptr});
        }
    }

    void on_flood_transmit(double now, std::size_t i) {
        Node& node = nodes_[i];
        auto frame = std::make_shared<Frame>();
        frame->bytes = proto::encode_flood_packet(node.flood->transmit_head());
        frame->flood = proto::decode_flood_packet(frame->bytes);
        transmit(now, i, std::move(frame));
        kick_flood_worker(now, i);
    }

    void on_flood_arrival(double now, std::size_t i, const proto::FloodPacket& packet) {
        Node& node = nodes_[i];
        if (!node.flood->flood_receive(packet).delivered) return;
        kick_flood_worker(now, i);
        if (!node.consumer) return;
        proto::VarUpdateRecord update;
        try {
            update = proto::decode_update_record(packet.payload);
        } catch (const proto::WireError&) {
            return;
        }
        record(now, i, packet.source.value, update.var_id.value, update.value);
    }

    void on_queue_sample(double now) {
        QueueSample q{now, 0.0, 0};
        for (const auto& node : nodes_) {
            const std::size_t len = node.flood->queue_length();
            q.mean_length += static_cast<double>(len);
            q.max_length = std::max(q.max_length, len);
        }
        q.mean_length /= static_cast<double>(nodes_.size());
        result_.queue_trace.push_back(q);
        // Sample times are multiples of the interval, not accumulated sums.
        const auto k = result_.queue_trace.size();
        schedule(static_cast<double>(k) * cfg_.queue_sample_interval_s,
                 {Event::Kind::QueueSample, 0, nullptr});
    }

    const SimConfig& cfg_;
    Channel channel_;
    SimObserver* observer_;
    std::vector<Node> nodes_;
    EventQueue<Event> events_;
    RunResult result_;
};

}  // namespace

RunResult run(const SimConfig& config, std::uint64_t seed, SimObserver* observer) {
    validate(config);
    Kernel kernel(config, seed, observer);
    return kernel.run();
}

void write_samples_csv(std::ostream& out, std::span<const Sample> samples) {
    out << samples_csv_header << '\n';
    char line[160];
    for (const Sample& s : samples) {
        std::snprintf(line, sizeof line, "%zu,%zu,%u,%u,%.9f,%.9f\n", s.consumer, s.producer,
                      static_cast<unsigned>(s.var_id), static_cast<unsigned>(s.app_seqno),
                      s.gen_time, s.recv_time);
        out << line;
    }
}

std::vector<Sample> read_samples_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != samples_csv_header) {
        throw std::invalid_argument("missing samples CSV header");
    }
    std::vector<Sample> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream row(line);
        Sample s;
        char c1, c2, c3, c4, c5;
        unsigned var = 0;
        if (!(row >> s.consumer >> c1 >> s.producer >> c2 >> var >> c3 >> s.app_seqno >> c4 >>
              s.gen_time >> c5 >> s.recv_time) ||
            c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',' || c5 != ',') {
            throw std::invalid_argument("malformed samples CSV row " + std::to_string(lineno));
        }
        s.var_id = static_cast<std::uint16_t>(var);
        out.push_back(s);
    }
    return out;
}

}  // namespace vardislab::sim
