#pragma once

// Randomized-topology checks of the VarDis invariants, shared by the unit
// tests and the acceptance binary.

#include "vardislab/rng.hpp"
#include "vardislab/sim/simulation.hpp"
#include "vardislab/vardis/entity.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace vardislab::proptest {

inline sim::Deployment random_deployment(RandomStream& rng, std::size_t n, double lossy_fraction) {
    while (true) {
        sim::Deployment d;
        d.k = n;
        d.positions.assign(n, sim::Position{});
        d.loss = sim::LossMatrix(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const double u = rng.uniform01();
                const double q = u < 0.4 ? 1.0 : (u < 0.4 + lossy_fraction ? rng.uniform(0, 0.8) : 0.0);
                d.loss.set(i, j, q);
            }
        }
        if (d.loss.connected_from(0)) return d;
    }
}

/// Tracks per-node stored seqnos, application deliveries and update-record
/// insertions against the number of times the record was (re-)armed.
class InvariantChecker : public sim::SimObserver {
public:
    explicit InvariantChecker(unsigned rep_cnt) : rep_cnt_(rep_cnt) {}

    void on_update_issued(double, std::size_t node, std::uint32_t) override {
        reset({node, static_cast<std::uint16_t>(node + 1)});
    }

    void on_changes(double, std::size_t node,
                    std::span<const vardis::StateChange> changes) override {
        using Kind = vardis::StateChange::Kind;
        for (const auto& c : changes) {
            const Key key{node, c.var_id.value};
            if (c.kind == Kind::Created || c.kind == Kind::Updated) {
                auto [it, fresh] = stored_.try_emplace(key, c.seqno);
                if (!fresh) {
                    if (c.seqno <= it->second) ++monotone_violations;
                    it->second = c.seqno;
                }
                if (c.kind == Kind::Updated) reset(key);
            } else if (c.kind == Kind::StaleRepair || c.kind == Kind::UpdateRescheduled) {
                budget_[key].allowance += rep_cnt_;
            }
        }
    }

    void on_payload(double, std::size_t node, const proto::VarDisPayload& p) override {
        for (const auto& u : p.updates) {
            auto& b = budget_[{node, u.var_id.value}];
            if (++b.inserted > b.allowance) ++repetition_violations;
        }
        ++payloads;
    }

    void on_delivery(const sim::Sample& s) override {
        auto [it, fresh] = delivered_.try_emplace({s.consumer, s.producer}, s.app_seqno);
        if (!fresh) {
            if (s.app_seqno <= it->second) ++duplicate_violations;
            it->second = s.app_seqno;
        }
        ++deliveries;
    }

    std::size_t monotone_violations = 0;
    std::size_t duplicate_violations = 0;
    std::size_t repetition_violations = 0;
    std::size_t payloads = 0;
    std::size_t deliveries = 0;

private:
    using Key = std::pair<std::size_t, std::uint16_t>;
    struct Budget {
        unsigned inserted = 0;
        unsigned allowance = 0;
    };

    void reset(const Key& key) { budget_[key] = {0, rep_cnt_}; }

    unsigned rep_cnt_;
    std::map<Key, std::uint64_t> stored_;
    std::map<Key, Budget> budget_;
    std::map<std::pair<std::size_t, std::size_t>, std::uint32_t> delivered_;
};

struct PropertyReport {
    std::size_t topologies = 0;
    std::size_t deliveries = 0;
    std::size_t monotone_violations = 0;
    std::size_t duplicate_violations = 0;
    std::size_t repetition_violations = 0;
    std::size_t two_node_cases = 0;
    std::size_t two_node_gap_failures = 0;  ///< consecutive receptions with gap != 1
    std::size_t two_node_missing = 0;       ///< issued updates never delivered (excl. in flight)
};

/// `topologies` random VarDis networks of 2..7 nodes plus `topologies / 10`
/// loss-free two-node runs.
inline PropertyReport run_property_suite(std::uint64_t seed, std::size_t topologies) {
    RandomStream rng(seed);
    PropertyReport rep;
    for (std::size_t trial = 0; trial < topologies; ++trial) {
        const std::size_t n = 2 + rng.below(6);
        sim::SimConfig c;
        c.deployment = random_deployment(rng, n, 0.5);
        c.rep_cnt = static_cast<std::uint8_t>(1 + rng.below(3));
        c.summaries = rng.bernoulli(0.7);
        c.max_sum_cnt = 1 + rng.below(10);
        c.timing.rate_hz = rng.bernoulli(0.5) ? 10.0 : 20.0;
        c.timing.distribution = rng.bernoulli(0.5) ? bp::BeaconTiming::Distribution::Exponential
                                                   : bp::BeaconTiming::Distribution::PeriodicJitter;
        c.traffic.update_period_s = rng.uniform(0.1, 2.0);
        c.traffic.distribution = rng.bernoulli(0.5) ? sim::UpdateDistribution::Exponential
                                                    : sim::UpdateDistribution::Periodic;
        for (std::size_t i = 0; i < n; ++i) {
            c.consumers.push_back(i);
            if (i == 0 || rng.bernoulli(0.5)) c.traffic.producers.push_back(i);
        }
        c.duration_s = 10.0;
        c.warmup_s = 0.0;
        InvariantChecker check(c.rep_cnt);
        (void)sim::run(c, rng.next_u64(), &check);
        ++rep.topologies;
        rep.deliveries += check.deliveries;
        rep.monotone_violations += check.monotone_violations;
        rep.duplicate_violations += check.duplicate_violations;
        rep.repetition_violations += check.repetition_violations;
    }

    for (std::size_t trial = 0; trial < topologies / 10; ++trial) {
        sim::SimConfig c;
        c.deployment = random_deployment(rng, 2, 0.0);
        c.deployment.loss.set(0, 1, 0.0);
        c.deployment.loss.set(1, 0, 0.0);
        c.rep_cnt = static_cast<std::uint8_t>(1 + rng.below(3));
        c.summaries = rng.bernoulli(0.5);
        c.timing.rate_hz = rng.bernoulli(0.5) ? 10.0 : 20.0;
        c.traffic.update_period_s = rng.uniform(0.3, 2.0);
        c.traffic.producers = {0};
        c.consumers = {1};
        c.duration_s = 60.0;
        c.warmup_s = 5.0;
        const auto r = sim::run(c, rng.next_u64());
        ++rep.two_node_cases;
        for (std::size_t i = 1; i < r.samples.size(); ++i) {
            if (r.samples[i].app_seqno != r.samples[i - 1].app_seqno + 1) ++rep.two_node_gap_failures;
        }
        // The last update may still be in flight when the run ends.
        if (r.issued[0] > r.samples.size() + 1) rep.two_node_missing += r.issued[0] - r.samples.size() - 1;
    }
    return rep;
}

}  // namespace vardislab::proptest
