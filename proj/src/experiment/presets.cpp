#include "vardislab/experiment/presets.hpp"

#include "vardislab/analysis/capacity.hpp"
#include "vardislab/analysis/rsm.hpp"
#include "vardislab/dtmc/markov.hpp"
#include "vardislab/experiment/csv.hpp"
#include "vardislab/experiment/runner.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>

namespace vardislab::experiment {

namespace fs = std::filesystem;
using sim::DeploymentKind;
using Timing = bp::BeaconTiming::Distribution;

namespace {

struct Window {
    double duration_s;
    double warmup_s;
    std::size_t replications;
};

void apply_window(ExperimentConfig& c, Window w, const PresetOptions& o) {
    c.warmup_s = o.warmup_s.value_or(w.warmup_s);
    const double measured = (w.duration_s - w.warmup_s) * o.scale;
    c.duration_s = o.duration_s.value_or(c.warmup_s + measured);
    c.replications = o.replications.value_or(w.replications);
    c.seed = o.seed;
}

std::string fmt(double v) { return format_number(v); }

std::vector<ExperimentConfig> line_fixed(double per, bool with_no_summaries,
                                         const PresetOptions& o) {
    std::vector<ExperimentConfig> out;
    for (bool summaries : {true, false}) {
        if (!summaries && !with_no_summaries) continue;
        for (double beta : {10.0, 20.0}) {
            for (unsigned rep : {1U, 2U, 3U}) {
                for (std::size_t k = 3; k <= 17; ++k) {
                    ExperimentConfig c;
                    c.deployment = {DeploymentKind::LineFixed, k, per, sim::default_extent_m};
                    c.beta_hz = beta;
                    c.rep_cnt = rep;
                    c.summaries = summaries;
                    c.lambda_s = 5.0;
                    apply_window(c, {330.0, 30.0, 4}, o);
                    out.push_back(c);
                }
            }
        }
    }
    return out;
}

// Factor order of the design: bit 0 repCnt {1,3}, bit 1 beta {10,20},
// bit 2 maxSumCnt {10,20}.
std::vector<ExperimentConfig> sensitivity_grid(const PresetOptions& o) {
    std::vector<ExperimentConfig> out;
    for (std::size_t k : {9U, 13U}) {
        for (double per : {0.1, 0.2}) {
            for (double lambda : {0.3, 1.0, 3.0}) {
                for (unsigned m = 0; m < 8; ++m) {
                    ExperimentConfig c;
                    c.deployment = {DeploymentKind::GridFixed, k, per, sim::default_extent_m};
                    c.rep_cnt = (m & 1U) ? 3 : 1;
                    c.beta_hz = (m & 2U) ? 20.0 : 10.0;
                    c.max_sum_cnt = (m & 4U) ? 20 : 10;
                    c.max_beacon_size = 300;
                    c.lambda_s = lambda;
                    c.update_distribution = sim::UpdateDistribution::Exponential;
                    c.producers = {NodeSet::Mode::All, {}};
                    apply_window(c, {90.0, 30.0, 2}, o);
                    out.push_back(c);
                }
            }
        }
    }
    return out;
}

std::vector<ExperimentConfig> flooding_comparison(const PresetOptions& o) {
    std::vector<ExperimentConfig> out;
    for (std::size_t k : {5U, 7U, 9U, 11U}) {
        for (double per : {0.1, 0.2}) {
            for (double lambda : {0.2, 1.0}) {
                for (auto protocol : {sim::Protocol::Vardis, sim::Protocol::Flooding}) {
                    for (unsigned rep : {1U, 2U, 3U}) {
                        ExperimentConfig c;
                        c.deployment = {DeploymentKind::GridFixed, k, per, sim::default_extent_m};
                        c.protocol = protocol;
                        c.rep_cnt = rep;
                        c.beta_hz = 20.0;
                        c.max_sum_cnt = 10;
                        c.max_beacon_size = 300;
                        c.lambda_s = lambda;
                        c.update_distribution = sim::UpdateDistribution::Exponential;
                        c.producers = {NodeSet::Mode::All, {}};
                        if (protocol == sim::Protocol::Flooding) c.queue_sample_interval_s = 1.0;
                        apply_window(c, {70.0, 10.0, 2}, o);
                        out.push_back(c);
                    }
                }
            }
        }
    }
    return out;
}

std::vector<ExperimentConfig> line_variable(const PresetOptions& o) {
    std::vector<ExperimentConfig> out;
    for (auto timing : {Timing::PeriodicJitter, Timing::Exponential}) {
        for (double beta : {10.0, 20.0}) {
            for (unsigned rep : {1U, 2U, 3U}) {
                for (std::size_t k = 6; k <= 18; ++k) {
                    ExperimentConfig c;
                    c.deployment = {DeploymentKind::LineVariable, k, 0.2, sim::default_extent_m};
                    c.timing = timing;
                    c.beta_hz = beta;
                    c.rep_cnt = rep;
                    c.lambda_s = 5.0;
                    apply_window(c, {330.0, 30.0, 4}, o);
                    out.push_back(c);
                }
            }
        }
    }
    return out;
}

std::vector<ExperimentConfig> dtmc_validate(const PresetOptions& o) {
    std::vector<ExperimentConfig> out;
    for (std::size_t k = 6; k <= 15; ++k) {
        ExperimentConfig c;
        c.deployment = {DeploymentKind::LineVariable, k, 0.2, sim::default_extent_m};
        c.protocol = sim::Protocol::VardisAlwaysRepeat;
        c.timing = Timing::Exponential;
        c.beta_hz = 10.0;
        c.rep_cnt = 1;
        c.lambda_s = 5.0;
        apply_window(c, {530.0, 30.0, 4}, o);
        out.push_back(c);
    }
    return out;
}

std::vector<ExperimentConfig> grid_capacity(const PresetOptions& o) {
    std::vector<ExperimentConfig> out;
    for (std::size_t k : {5U, 7U, 9U}) {
        for (double lambda : analysis::default_lambda_grid()) {
            ExperimentConfig c;
            c.deployment = {DeploymentKind::GridVariable, k, 0.2, sim::default_extent_m};
            c.beta_hz = 20.0;
            c.rep_cnt = 1;
            c.max_sum_cnt = 10;
            c.max_beacon_size = 300;
            c.lambda_s = lambda;
            c.update_distribution = sim::UpdateDistribution::Exponential;
            c.producers = {NodeSet::Mode::All, {}};
            apply_window(c, {40.0, 10.0, 3}, o);
            out.push_back(c);
        }
    }
    return out;
}

fs::path write_file(const fs::path& dir, const char* name, const auto& writer) {
    const fs::path path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    writer(out);
    if (!out) throw std::runtime_error("write failed for " + path.string());
    return path;
}

std::vector<RsmRow> rsm_rows(const std::vector<PointResult>& points, std::ostream* log) {
    std::vector<RsmRow> rows;
    const std::vector<std::string> factors{"rep_cnt", "beta", "max_sum_cnt"};
    for (std::size_t base = 0; base + 8 <= points.size(); base += 8) {
        const ExperimentConfig& c = points[base].config;
        std::vector<std::pair<std::string, std::string>> setting{
            {"k", std::to_string(c.deployment.k)},
            {"per", fmt(c.deployment.per)},
            {"lambda_s", fmt(c.lambda_s)}};
        for (const char* response : {"delay_s", "gap"}) {
            std::vector<double> y;
            for (std::size_t m = 0; m < 8; ++m) {
                const auto& e = std::string_view(response) == "gap" ? points[base + m].gap
                                                                    : points[base + m].delay_s;
                if (!e) break;
                y.push_back(e->mean);
            }
            if (y.size() != 8) {
                if (log) *log << "rsm: skipping " << response << " for k=" << c.deployment.k
                              << " per=" << c.deployment.per << " lambda=" << c.lambda_s
                              << " (cell without receptions)\n";
                continue;
            }
            rows.push_back({setting, response, factors, analysis::rsm_fit(3, y)});
        }
    }
    return rows;
}

void add_dtmc_columns(std::vector<PointResult>& points) {
    for (auto& p : points) {
        const sim::SimConfig sc = to_sim_config(p.config);
        const auto h = dtmc::expected_hitting_steps(sc.deployment.loss);
        const double model =
            dtmc::expected_delay_seconds(h.steps, sc.deployment.node_count(), p.config.beta_hz);
        p.extra.emplace_back("dtmc_states", std::to_string(h.states));
        p.extra.emplace_back("dtmc_steps", fmt(h.steps));
        p.extra.emplace_back("dtmc_delay_s", fmt(model));
        p.extra.emplace_back("rel_error",
                             p.delay_s ? fmt((p.delay_s->mean - model) / model) : "NA");
    }
}

/// Walks each K's lambda grid upwards until both capacities are found.
std::vector<PointResult> run_capacity(const std::vector<ExperimentConfig>& grid,
                                      const PresetOptions& o, std::vector<CapacityRow>& rows,
                                      std::ostream* log) {
    std::map<std::size_t, std::vector<ExperimentConfig>> by_k;
    for (const auto& c : grid) by_k[c.deployment.k].push_back(c);

    std::vector<PointResult> evaluated;
    for (const auto& [k, configs] : by_k) {
        std::map<double, std::size_t> cache;  // lambda -> index into evaluated
        auto evaluate = [&](double lambda) -> const PointResult& {
            if (auto it = cache.find(lambda); it != cache.end()) return evaluated[it->second];
            for (const auto& c : configs) {
                if (c.lambda_s == lambda) {
                    if (log) *log << "grid-capacity: k=" << k << " lambda=" << lambda << '\n';
                    evaluated.push_back(run_point(c, o.jobs));
                    cache[lambda] = evaluated.size() - 1;
                    return evaluated.back();
                }
            }
            throw std::logic_error("lambda not in grid");
        };
        std::vector<double> lambdas;
        for (const auto& c : configs) lambdas.push_back(c.lambda_s);
        for (auto kind : {analysis::CapacityKind::Reliability, analysis::CapacityKind::Delay}) {
            auto metric = [&](double lambda) {
                const PointResult& p = evaluate(lambda);
                const auto& e = kind == analysis::CapacityKind::Reliability ? p.gap : p.delay_s;
                if (!e) return analysis::Estimate{INFINITY, 0.0, 0};
                return *e;
            };
            rows.push_back({"k=" + std::to_string(k), k, kind,
                            analysis::capacity_search(metric, kind, lambdas)});
        }
    }
    std::stable_sort(evaluated.begin(), evaluated.end(), [](const auto& a, const auto& b) {
        if (a.config.deployment.k != b.config.deployment.k) {
            return a.config.deployment.k < b.config.deployment.k;
        }
        return a.config.lambda_s < b.config.lambda_s;
    });
    return evaluated;
}

}  // namespace

const std::vector<PresetInfo>& preset_catalog() {
    static const std::vector<PresetInfo> catalog{
        {"line-fixed-p20", "fixed-density line, 20% link loss, K 3..17, with and without summaries"},
        {"line-fixed-p50", "fixed-density line, 50% link loss, K 3..17, summaries on"},
        {"line-fixed-p80", "fixed-density line, 80% link loss, K 3..17, summaries on"},
        {"sensitivity-grid", "fixed-density grid 2^3 designs over repCnt, beta, maxSumCnt; writes rsm.csv"},
        {"flooding-comparison", "fixed-density grid, VarDis against flooding; writes queue.csv"},
        {"line-variable", "variable-density line, K 6..18, periodic and exponential beacons"},
        {"dtmc-validate", "variable-density line, always-repeat VarDis next to the Markov model"},
        {"grid-capacity", "variable-density grid update capacity search; writes capacity.csv"},
    };
    return catalog;
}

std::vector<ExperimentConfig> expand_preset(std::string_view name, const PresetOptions& o) {
    if (!(o.scale > 0.0)) throw std::invalid_argument("scale must be positive");
    std::vector<ExperimentConfig> points;
    if (name == "line-fixed-p20") {
        points = line_fixed(0.2, true, o);
    } else if (name == "line-fixed-p50") {
        points = line_fixed(0.5, false, o);
    } else if (name == "line-fixed-p80") {
        points = line_fixed(0.8, false, o);
    } else if (name == "sensitivity-grid") {
        points = sensitivity_grid(o);
    } else if (name == "flooding-comparison") {
        points = flooding_comparison(o);
    } else if (name == "line-variable") {
        points = line_variable(o);
    } else if (name == "dtmc-validate") {
        points = dtmc_validate(o);
    } else if (name == "grid-capacity") {
        points = grid_capacity(o);
    } else {
        throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
    }
    for (auto& p : points) {
        p.name = std::string(name);
        if (auto problems = validation_problems(p); !problems.empty()) {
            throw ConfigError(ConfigErrc::ValidationError, std::move(problems));
        }
    }
    return points;
}

std::vector<fs::path> run_preset(std::string_view name, const PresetOptions& o,
                                 const fs::path& out_dir, std::ostream* log) {
    const auto points = expand_preset(name, o);
    fs::create_directories(out_dir);
    std::vector<fs::path> files;
    if (log) *log << name << ": " << points.size() << " parameter points\n";

    if (name == "grid-capacity") {
        std::vector<CapacityRow> rows;
        const auto evaluated = run_capacity(points, o, rows, log);
        files.push_back(write_file(out_dir, "metrics.csv",
                                   [&](std::ostream& out) { write_metrics_csv(out, evaluated); }));
        files.push_back(write_file(out_dir, "capacity.csv",
                                   [&](std::ostream& out) { write_capacity_csv(out, rows); }));
        return files;
    }

    auto results = run_points(points, o.jobs);
    if (name == "dtmc-validate") add_dtmc_columns(results);
    files.push_back(write_file(out_dir, "metrics.csv",
                               [&](std::ostream& out) { write_metrics_csv(out, results); }));
    if (name == "sensitivity-grid") {
        const auto rows = rsm_rows(results, log);
        files.push_back(
            write_file(out_dir, "rsm.csv", [&](std::ostream& out) { write_rsm_csv(out, rows); }));
    }
    if (name == "flooding-comparison") {
        files.push_back(write_file(out_dir, "queue.csv",
                                   [&](std::ostream& out) { write_queue_csv(out, results); }));
    }
    return files;
}

std::vector<fs::path> run_config(const ExperimentConfig& config, std::size_t jobs,
                                 const fs::path& out_dir) {
    fs::create_directories(out_dir);
    const std::vector<PointResult> results{run_point(config, jobs)};
    std::vector<fs::path> files;
    files.push_back(write_file(out_dir, "metrics.csv",
                               [&](std::ostream& out) { write_metrics_csv(out, results); }));
    if (config.queue_sample_interval_s > 0.0 && config.protocol == sim::Protocol::Flooding) {
        files.push_back(write_file(out_dir, "queue.csv",
                                   [&](std::ostream& out) { write_queue_csv(out, results); }));
    }
    return files;
}

}  // namespace vardislab::experiment
