#include "vardislab/experiment/runner.hpp"

#include "vardislab/rng.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace vardislab::experiment {

std::pair<std::size_t, std::size_t> measured_pair(const sim::SimConfig& c) {
    const auto pick = [](const std::vector<std::size_t>& nodes, std::size_t reference) {
        if (nodes.empty()) return reference;
        return std::find(nodes.begin(), nodes.end(), reference) != nodes.end() ? reference
                                                                               : nodes.front();
    };
    return {pick(c.traffic.producers, c.deployment.reference_producer),
            pick(c.consumers, c.deployment.reference_consumer)};
}

ReplicationOutcome run_replication(const ExperimentConfig& config, std::size_t replication) {
    const sim::SimConfig sc = to_sim_config(config);
    const auto [producer, consumer] = measured_pair(sc);
    ReplicationOutcome out;
    out.seed = replication_seed(config.seed, replication);
    sim::RunResult r = sim::run(sc, out.seed);
    out.issued = r.issued.at(producer);
    for (const auto& s : r.samples) {
        if (s.producer == producer && s.consumer == consumer && s.app_seqno != 0) ++out.received;
    }
    if (out.issued > 0) {
        out.pct_received =
            analysis::percent_received(r.samples, producer, consumer, out.issued, sc.warmup_s);
    }
    try {
        out.metrics =
            analysis::compute_metrics(r.samples, producer, consumer, out.issued, sc.warmup_s);
    } catch (const analysis::AnalysisError& e) {
        if (e.code() != analysis::AnalysisErrc::NoSamples) throw;
    }
    out.queue_trace = std::move(r.queue_trace);
    return out;
}

PointResult summarize_point(const ExperimentConfig& config,
                            std::vector<ReplicationOutcome> replications) {
    PointResult p;
    p.config = config;
    std::tie(p.producer, p.consumer) = measured_pair(to_sim_config(config));
    std::vector<double> delay, gap, pct;
    for (const auto& r : replications) {
        p.receptions += r.received;
        pct.push_back(r.pct_received);
        if (r.metrics) {
            delay.push_back(r.metrics->mean_delay_s);
            gap.push_back(r.metrics->mean_gap);
        }
    }
    if (!pct.empty()) p.pct_received = analysis::summarize(std::span<const double>(pct));
    if (!delay.empty()) {
        p.delay_s = analysis::summarize(std::span<const double>(delay));
        p.gap = analysis::summarize(std::span<const double>(gap));
    }
    p.replications = std::move(replications);
    return p;
}

std::vector<PointResult> run_points(const std::vector<ExperimentConfig>& points,
                                    std::size_t jobs) {
    struct Task {
        std::size_t point;
        std::size_t replication;
    };
    std::vector<Task> tasks;
    std::vector<std::vector<ReplicationOutcome>> outcomes(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        // Reject invalid points before any work starts.
        (void)to_sim_config(points[i]);
        outcomes[i].resize(points[i].replications);
        for (std::size_t r = 0; r < points[i].replications; ++r) tasks.push_back({i, r});
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t t = next++; t < tasks.size(); t = next++) {
            try {
                const Task& task = tasks[t];
                outcomes[task.point][task.replication] =
                    run_replication(points[task.point], task.replication);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = tasks.size();
            }
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(1, tasks.size()));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<PointResult> out;
    out.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        out.push_back(summarize_point(points[i], std::move(outcomes[i])));
    }
    return out;
}

PointResult run_point(const ExperimentConfig& config, std::size_t jobs) {
    return std::move(run_points({config}, jobs).front());
}

}  // namespace vardislab::experiment
