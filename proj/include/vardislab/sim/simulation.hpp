#pragma once

// Discrete-event simulation of one replication: BP + VarDis (or the flooding
// comparator) on every node of a deployment, connected by the lossy
// broadcast channel, driven by per-node update generators.

#include "vardislab/bp/beaconing.hpp"
#include "vardislab/proto/types.hpp"
#include "vardislab/sim/deployment.hpp"
#include "vardislab/vardis/entity.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace vardislab::sim {

enum class Protocol { Vardis, VardisAlwaysRepeat, Flooding };

[[nodiscard]] std::string_view to_string(Protocol p);
[[nodiscard]] Protocol protocol_from_string(std::string_view s);

enum class UpdateDistribution { Periodic, Exponential };

[[nodiscard]] std::string_view to_string(UpdateDistribution d);
[[nodiscard]] UpdateDistribution update_distribution_from_string(std::string_view s);

struct TrafficModel {
    std::vector<std::size_t> producers;
    UpdateDistribution distribution = UpdateDistribution::Periodic;
    double update_period_s = 5.0;  ///< mean time between updates at each producer
};

/// Application variable layout: 8 B generation time (IEEE double) + 4 B
/// application sequence number, both little-endian.
inline constexpr std::size_t app_value_length = 12;

struct AppValue {
    double gen_time = 0.0;
    std::uint32_t app_seqno = 0;
};

[[nodiscard]] proto::VarValue encode_app_value(const AppValue& v);
[[nodiscard]] AppValue decode_app_value(const proto::VarValue& v);

struct SimConfig {
    Deployment deployment;
    Protocol protocol = Protocol::Vardis;
    bp::BeaconTiming timing;
    std::size_t max_beacon_size = 200;
    std::uint8_t rep_cnt = 2;
    std::size_t max_sum_cnt = 10;
    bool summaries = true;
    TrafficModel traffic;
    /// Nodes at which application receptions are recorded.
    std::vector<std::size_t> consumers;
    double duration_s = 100.0;
    double warmup_s = 30.0;
    /// Broadcast-queue sampling period for the flooding protocol; 0 disables.
    double queue_sample_interval_s = 0.0;
    double flood_mean_backoff_s = 0.010;
};

/// One update observed by the application at a consumer.
struct Sample {
    std::size_t consumer = 0;
    std::size_t producer = 0;
    std::uint16_t var_id = 0;
    std::uint32_t app_seqno = 0;
    double gen_time = 0.0;
    double recv_time = 0.0;

    friend bool operator==(const Sample&, const Sample&) = default;
};

struct QueueSample {
    double time = 0.0;
    double mean_length = 0.0;
    std::size_t max_length = 0;
};

struct RunResult {
    std::vector<Sample> samples;  ///< receptions at or after the warm-up
    /// Per node: updates generated at or after the warm-up.
    std::vector<std::uint64_t> issued;
    std::vector<QueueSample> queue_trace;
    std::uint64_t frames_sent = 0;
    std::uint64_t frames_delivered = 0;
};

/// Optional hooks for tests and tracing. All calls happen on the simulation
/// thread in event order.
class SimObserver {
public:
    virtual ~SimObserver() = default;
    virtual void on_payload(double /*time*/, std::size_t /*node*/,
                            const proto::VarDisPayload& /*payload*/) {}
    virtual void on_changes(double /*time*/, std::size_t /*node*/,
                            std::span<const vardis::StateChange> /*changes*/) {}
    virtual void on_update_issued(double /*time*/, std::size_t /*node*/,
                                  std::uint32_t /*app_seqno*/) {}
    virtual void on_delivery(const Sample& /*sample*/) {}
};

enum class SimErrc { ConfigInvalid };

class SimError : public std::runtime_error {
public:
    SimError(SimErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    [[nodiscard]] SimErrc code() const noexcept { return code_; }

private:
    SimErrc code_;
};

/// Throws SimError(ConfigInvalid) listing the first violated constraint.
void validate(const SimConfig& config);

/// Deterministic for a fixed (config, seed).
[[nodiscard]] RunResult run(const SimConfig& config, std::uint64_t seed,
                            SimObserver* observer = nullptr);

inline constexpr std::string_view samples_csv_header =
    "consumer,producer,var_id,app_seqno,gen_time_s,recv_time_s";

void write_samples_csv(std::ostream& out, std::span<const Sample> samples);
[[nodiscard]] std::vector<Sample> read_samples_csv(std::istream& in);

}  // namespace vardislab::sim
