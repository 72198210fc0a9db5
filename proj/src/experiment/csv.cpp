#include "vardislab/experiment/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <ostream>

namespace vardislab::experiment {

std::string format_number(double v) {
    if (std::isnan(v)) return "NA";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    for (int precision = 6; precision <= 9; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (precision == 9 || std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

namespace {

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out << ',';
        out << cells[i];
    }
    out << '\n';
}

std::string deployment_param(const DeploymentSpec& d) {
    const bool fixed =
        d.kind == sim::DeploymentKind::LineFixed || d.kind == sim::DeploymentKind::GridFixed;
    return format_number(fixed ? d.per : d.extent_m);
}

std::string estimate_mean(const std::optional<analysis::Estimate>& e) {
    return e ? format_number(e->mean) : "NA";
}

std::string estimate_hw(const std::optional<analysis::Estimate>& e) {
    return e ? format_number(e->half_width) : "NA";
}

}  // namespace

void write_metrics_csv(std::ostream& out, std::span<const PointResult> points) {
    std::vector<std::string> extra_names;
    for (const auto& p : points) {
        for (const auto& [name, value] : p.extra) {
            if (std::find(extra_names.begin(), extra_names.end(), name) == extra_names.end()) {
                extra_names.push_back(name);
            }
        }
    }
    std::vector<std::string> header{
        "point", "name", "deployment", "k", "per_or_extent_m", "protocol", "beta_hz",
        "beacon_timing", "jitter", "max_beacon_size", "rep_cnt", "max_sum_cnt", "summaries",
        "lambda_s", "update_distribution", "producer", "consumer", "duration_s", "warmup_s",
        "replications", "seed", "receptions", "with_metrics", "delay_mean_s", "delay_ci95_s",
        "gap_mean", "gap_ci95", "pct_received_mean", "pct_received_ci95"};
    header.insert(header.end(), extra_names.begin(), extra_names.end());
    write_row(out, header);

    for (std::size_t i = 0; i < points.size(); ++i) {
        const PointResult& p = points[i];
        const ExperimentConfig& c = p.config;
        std::size_t with_metrics = 0;
        for (const auto& r : p.replications) with_metrics += r.metrics ? 1 : 0;
        std::vector<std::string> row{
            std::to_string(i),
            c.name,
            std::string(sim::to_string(c.deployment.kind)),
            std::to_string(c.deployment.k),
            deployment_param(c.deployment),
            std::string(sim::to_string(c.protocol)),
            format_number(c.beta_hz),
            std::string(to_string(c.timing)),
            format_number(c.jitter),
            std::to_string(c.max_beacon_size),
            std::to_string(c.rep_cnt),
            std::to_string(c.max_sum_cnt),
            c.summaries ? "1" : "0",
            format_number(c.lambda_s),
            std::string(sim::to_string(c.update_distribution)),
            std::to_string(p.producer),
            std::to_string(p.consumer),
            format_number(c.duration_s),
            format_number(c.warmup_s),
            std::to_string(c.replications),
            std::to_string(c.seed),
            std::to_string(p.receptions),
            std::to_string(with_metrics),
            estimate_mean(p.delay_s),
            estimate_hw(p.delay_s),
            estimate_mean(p.gap),
            estimate_hw(p.gap),
            format_number(p.pct_received.mean),
            format_number(p.pct_received.half_width),
        };
        for (const auto& name : extra_names) {
            std::string value;
            for (const auto& [n, v] : p.extra) {
                if (n == name) value = v;
            }
            row.push_back(value);
        }
        write_row(out, row);
    }
}

void write_queue_csv(std::ostream& out, std::span<const PointResult> points) {
    write_row(out, {"point", "name", "time_s", "mean_queue_length", "max_queue_length"});
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& reps = points[i].replications;
        if (reps.empty() || reps.front().queue_trace.empty()) continue;
        std::size_t len = reps.front().queue_trace.size();
        for (const auto& r : reps) len = std::min(len, r.queue_trace.size());
        for (std::size_t s = 0; s < len; ++s) {
            double mean = 0.0;
            std::size_t max = 0;
            for (const auto& r : reps) {
                mean += r.queue_trace[s].mean_length;
                max = std::max(max, r.queue_trace[s].max_length);
            }
            mean /= static_cast<double>(reps.size());
            write_row(out, {std::to_string(i), points[i].config.name,
                            format_number(reps.front().queue_trace[s].time), format_number(mean),
                            std::to_string(max)});
        }
    }
}

void write_rsm_csv(std::ostream& out, std::span<const RsmRow> rows) {
    if (rows.empty()) {
        out << "response,r2_pct,average,min,max\n";
        return;
    }
    const RsmRow& first = rows.front();
    std::vector<std::string> header;
    for (const auto& [name, value] : first.setting) header.push_back(name);
    for (const char* h : {"response", "r2_pct", "average", "min", "max"}) header.emplace_back(h);
    for (const auto& f : first.factor_names) header.push_back("coef_" + f);
    for (const auto& f : first.factor_names) header.push_back("contrib_pct_" + f);
    header.emplace_back("contrib_pct_interactions");
    const std::size_t k = first.factor_names.size();
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            header.push_back("coef_" + first.factor_names[i] + "_x_" + first.factor_names[j]);
        }
    }
    write_row(out, header);

    for (const auto& r : rows) {
        std::vector<std::string> row;
        for (const auto& [name, value] : r.setting) row.push_back(value);
        row.push_back(r.response);
        row.push_back(format_number(r.model.r2_pct));
        row.push_back(format_number(r.model.intercept));
        row.push_back(format_number(r.model.min_response));
        row.push_back(format_number(r.model.max_response));
        for (std::size_t i = 0; i < r.model.k; ++i) {
            row.push_back(format_number(r.model.linear(i)));
        }
        for (std::size_t i = 0; i < r.model.k; ++i) {
            row.push_back(format_number(r.model.terms[i].contribution_pct));
        }
        row.push_back(format_number(r.model.interaction_contribution_pct()));
        for (std::size_t i = 0; i < r.model.k; ++i) {
            for (std::size_t j = i + 1; j < r.model.k; ++j) {
                row.push_back(format_number(r.model.interaction(i, j)));
            }
        }
        write_row(out, row);
    }
}

void write_capacity_csv(std::ostream& out, std::span<const CapacityRow> rows) {
    write_row(out, {"setting", "k", "kind", "capacity_lambda_s", "points_evaluated",
                    "last_metric_mean", "last_metric_ci95"});
    for (const auto& r : rows) {
        const auto& pts = r.result.points;
        write_row(out, {r.setting, std::to_string(r.k), std::string(analysis::to_string(r.kind)),
                        r.result.lambda_s ? format_number(*r.result.lambda_s) : "infeasible",
                        std::to_string(pts.size()),
                        pts.empty() ? "NA" : format_number(pts.back().metric.mean),
                        pts.empty() ? "NA" : format_number(pts.back().metric.half_width)});
    }
}

}  // namespace vardislab::experiment
