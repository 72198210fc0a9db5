#include "vardislab/analysis/metrics.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <set>
#include <vector>

namespace vardislab::analysis {

namespace {

bool relevant(const sim::Sample& s, std::size_t producer, std::size_t consumer) {
    return s.producer == producer && s.consumer == consumer && s.app_seqno != 0;
}

}  // namespace

double percent_received(std::span<const sim::Sample> samples, std::size_t producer,
                        std::size_t consumer, std::uint64_t issued, double window_start_s) {
    if (issued == 0) throw AnalysisError(AnalysisErrc::NoSamples, "no updates issued");
    std::set<std::uint32_t> distinct;
    for (const auto& s : samples) {
        if (relevant(s, producer, consumer) && s.gen_time >= window_start_s) {
            distinct.insert(s.app_seqno);
        }
    }
    return 100.0 * static_cast<double>(distinct.size()) / static_cast<double>(issued);
}

PairMetrics compute_metrics(std::span<const sim::Sample> samples, std::size_t producer,
                            std::size_t consumer, std::uint64_t issued, double window_start_s) {
    PairMetrics m;
    double delay_sum = 0.0;
    double gap_sum = 0.0;
    const sim::Sample* prev = nullptr;
    for (const auto& s : samples) {
        if (!relevant(s, producer, consumer)) continue;
        ++m.received;
        delay_sum += s.recv_time - s.gen_time;
        if (prev) gap_sum += static_cast<double>(s.app_seqno) - static_cast<double>(prev->app_seqno);
        prev = &s;
    }
    if (m.received < 2) {
        throw AnalysisError(AnalysisErrc::NoSamples,
                            "fewer than two receptions from producer " + std::to_string(producer) +
                                " at consumer " + std::to_string(consumer));
    }
    m.mean_delay_s = delay_sum / static_cast<double>(m.received);
    m.mean_gap = gap_sum / static_cast<double>(m.received - 1);
    m.pct_received = issued == 0 ? 0.0
                                 : percent_received(samples, producer, consumer, issued,
                                                    window_start_s);
    return m;
}

Estimate summarize(std::span<const double> values) {
    if (values.empty()) throw AnalysisError(AnalysisErrc::NoSamples, "nothing to summarize");
    Estimate e;
    e.n = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    e.mean = sum / static_cast<double>(e.n);
    if (e.n < 2) return e;
    double ss = 0.0;
    for (double v : values) ss += (v - e.mean) * (v - e.mean);
    const double sd = std::sqrt(ss / static_cast<double>(e.n - 1));
    const boost::math::students_t dist(static_cast<double>(e.n - 1));
    const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
    e.half_width = t * sd / std::sqrt(static_cast<double>(e.n));
    return e;
}

MetricSummary summarize(std::span<const PairMetrics> replications) {
    if (replications.empty()) throw AnalysisError(AnalysisErrc::NoSamples, "no replications");
    std::vector<double> delay, gap, pct;
    MetricSummary out;
    for (const auto& r : replications) {
        delay.push_back(r.mean_delay_s);
        gap.push_back(r.mean_gap);
        pct.push_back(r.pct_received);
        out.receptions += r.received;
    }
    out.replications = replications.size();
    out.delay_s = summarize(std::span<const double>(delay));
    out.gap = summarize(std::span<const double>(gap));
    out.pct_received = summarize(std::span<const double>(pct));
    return out;
}

double expected_gap_model(double per, unsigned rep_cnt, std::size_t k) {
    if (!(per >= 0.0 && per < 1.0) || rep_cnt < 1 || k < 2) {
        throw AnalysisError(AnalysisErrc::InvalidArgument, "need 0 <= P < 1, repCnt >= 1, K >= 2");
    }
    const double q = std::pow(1.0 - std::pow(per, static_cast<double>(rep_cnt)),
                              static_cast<double>(k - 1));
    return 1.0 / q;
}

}  // namespace vardislab::analysis
