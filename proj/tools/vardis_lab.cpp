// vardis-lab: command-line front end for simulations, the Markov model, RSM
// fits and capacity searches.

#include "vardislab/analysis/capacity.hpp"
#include "vardislab/analysis/rsm.hpp"
#include "vardislab/dtmc/markov.hpp"
#include "vardislab/experiment/csv.hpp"
#include "vardislab/experiment/presets.hpp"
#include "vardislab/experiment/runner.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace vardislab;

namespace {

fs::path output_root(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("VARDIS_LAB_OUT"); env && *env) return env;
    return "out";
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

sim::LossMatrix read_loss_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        for (const auto& cell : split(line, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    sim::LossMatrix q(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size()) throw std::runtime_error("loss matrix must be square");
        for (std::size_t j = 0; j < rows.size(); ++j) {
            if (i != j) q.set(i, j, rows[i][j]);
        }
    }
    return q;
}

void print_files(const std::vector<fs::path>& files) {
    for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
}

int run_dtmc(const std::string& line_variable, const std::string& kind, std::size_t k,
             double param, const std::string& loss_file, double beta) {
    sim::LossMatrix q;
    if (!loss_file.empty()) {
        q = read_loss_csv(loss_file);
    } else {
        std::string spec_kind = kind;
        std::size_t spec_k = k;
        if (!line_variable.empty()) {
            spec_kind = "line-variable";
            const auto eq = line_variable.find('=');
            spec_k = std::stoul(eq == std::string::npos ? line_variable
                                                        : line_variable.substr(eq + 1));
        }
        const auto dk = sim::deployment_kind_from_string(spec_kind);
        const bool fixed = dk == sim::DeploymentKind::LineFixed || dk == sim::DeploymentKind::GridFixed;
        if (param <= 0.0) param = fixed ? 0.2 : sim::default_extent_m;
        q = sim::build_deployment(dk, spec_k, param).loss;
    }
    const auto h = dtmc::expected_hitting_steps(q);
    const double seconds = dtmc::expected_delay_seconds(h.steps, q.size(), beta);
    std::printf("nodes %zu\nstates %zu\nsteps %.9g\nseconds %.9g\nresidual %.3g\n", q.size(),
                h.states, h.steps, seconds, h.residual);
    return 0;
}

int run_rsm(const std::string& input) {
    std::ifstream in(input);
    if (!in) throw std::runtime_error("cannot open " + input);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty input");
    const auto header = split(line, ',');
    if (header.size() < 2) throw std::runtime_error("need factor columns and a response column");
    const std::size_t k = header.size() - 1;
    std::map<std::vector<int>, double> cells;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto row = split(line, ',');
        if (row.size() != header.size()) throw std::runtime_error("ragged row: " + line);
        std::vector<int> x;
        for (std::size_t i = 0; i < k; ++i) x.push_back(std::stoi(row[i]));
        cells[x] = std::stod(row[k]);
    }
    const auto m = analysis::rsm_fit(k, cells);
    std::printf("R2_pct,average,min,max");
    for (std::size_t i = 0; i < k; ++i) std::printf(",contrib_pct_%s", header[i].c_str());
    std::printf(",contrib_pct_interactions\n");
    std::printf("%.2f,%.6g,%.6g,%.6g", m.r2_pct, m.intercept, m.min_response, m.max_response);
    for (std::size_t i = 0; i < k; ++i) std::printf(",%.2f", m.terms[i].contribution_pct);
    std::printf(",%.2f\n", m.interaction_contribution_pct());
    std::printf("\nterm,coefficient,contrib_pct\nintercept,%.9g,\n", m.intercept);
    for (const auto& t : m.terms) {
        std::string name = header[t.factors[0]];
        if (t.factors.size() == 2) name += "*" + header[t.factors[1]];
        std::printf("%s,%.9g,%.4f\n", name.c_str(), t.coefficient, t.contribution_pct);
    }
    std::printf("\nSST,%.9g\nSSE,%.9g\n", m.sst, m.sse);
    return 0;
}

int run_capacity(const std::string& config_file, const std::string& kind_name,
                 std::vector<double> grid, std::size_t jobs, const fs::path& out_dir) {
    const auto base = experiment::parse_config_file(config_file);
    if (grid.empty()) grid = analysis::default_lambda_grid();
    std::vector<analysis::CapacityKind> kinds;
    if (kind_name == "reliability" || kind_name == "both") kinds.push_back(analysis::CapacityKind::Reliability);
    if (kind_name == "delay" || kind_name == "both") kinds.push_back(analysis::CapacityKind::Delay);
    if (kinds.empty()) throw std::runtime_error("--kind must be reliability, delay or both");

    std::map<double, experiment::PointResult> cache;
    auto evaluate = [&](double lambda) -> const experiment::PointResult& {
        if (auto it = cache.find(lambda); it != cache.end()) return it->second;
        auto c = base;
        c.lambda_s = lambda;
        std::cerr << "capacity: lambda=" << lambda << '\n';
        return cache.emplace(lambda, experiment::run_point(c, jobs)).first->second;
    };
    std::vector<experiment::CapacityRow> rows;
    for (auto kind : kinds) {
        auto metric = [&](double lambda) {
            const auto& p = evaluate(lambda);
            const auto& e = kind == analysis::CapacityKind::Reliability ? p.gap : p.delay_s;
            return e ? *e : analysis::Estimate{INFINITY, 0.0, 0};
        };
        rows.push_back({base.name, base.deployment.k, kind, analysis::capacity_search(metric, kind, grid)});
        const auto& r = rows.back().result;
        std::cout << analysis::to_string(kind) << " capacity: "
                  << (r.lambda_s ? experiment::format_number(*r.lambda_s) + " s" : "infeasible") << '\n';
    }
    fs::create_directories(out_dir);
    std::vector<experiment::PointResult> points;
    for (auto& [lambda, p] : cache) points.push_back(p);
    std::ofstream metrics(out_dir / "metrics.csv", std::ios::binary);
    experiment::write_metrics_csv(metrics, points);
    std::ofstream capacity(out_dir / "capacity.csv", std::ios::binary);
    experiment::write_capacity_csv(capacity, rows);
    print_files({out_dir / "metrics.csv", out_dir / "capacity.csv"});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"VarDis / beaconing simulation laboratory"};
    app.require_subcommand(1);

    std::string out_flag;
    std::size_t jobs = 1;

    auto* run = app.add_subcommand("run", "run a configuration file or a preset");
    std::string config_file, preset;
    std::uint64_t seed = 1;
    double scale = 1.0, duration = -1.0, warmup = -1.0;
    std::size_t replications = 0;
    auto* config_opt = run->add_option("--config", config_file, "experiment JSON file")->check(CLI::ExistingFile);
    run->add_option("--preset", preset, "preset name (see 'presets list')")->excludes(config_opt);
    auto* seed_opt = run->add_option("--seed", seed, "master seed");
    run->add_option("--jobs", jobs, "parallel replications")->check(CLI::PositiveNumber);
    run->add_option("--out", out_flag, "output directory (default $VARDIS_LAB_OUT or ./out)");
    run->add_option("--scale", scale, "preset measurement-window multiplier")->check(CLI::PositiveNumber);
    run->add_option("--duration", duration, "override simulated seconds per replication");
    run->add_option("--warmup", warmup, "override warm-up seconds");
    run->add_option("--replications", replications, "override replication count");

    auto* dtmc_cmd = app.add_subcommand("dtmc", "expected dissemination time from the Markov model");
    std::string line_variable, kind = "line-variable", loss_file;
    std::size_t k = 6;
    double param = 0.0, beta = 10.0;
    dtmc_cmd->add_option("--line-variable", line_variable, "shorthand: K=<n> on the variable-density line");
    dtmc_cmd->add_option("--deployment", kind, "deployment kind");
    dtmc_cmd->add_option("--k", k, "line length or grid side");
    dtmc_cmd->add_option("--param", param, "link loss (fixed density) or extent in m (variable density)");
    dtmc_cmd->add_option("--loss", loss_file, "square CSV loss matrix instead of a deployment")->check(CLI::ExistingFile);
    dtmc_cmd->add_option("--beta", beta, "beacon rate in Hz")->check(CLI::PositiveNumber);

    auto* rsm_cmd = app.add_subcommand("rsm", "fit a two-level factorial response surface");
    std::string rsm_input;
    rsm_cmd->add_option("--input", rsm_input, "CSV: one column per factor (-1/1), last column the response")
        ->required()
        ->check(CLI::ExistingFile);

    auto* cap_cmd = app.add_subcommand("capacity", "search the update capacity of a configuration");
    std::string cap_config, cap_kind = "both";
    std::vector<double> grid;
    cap_cmd->add_option("--config", cap_config, "base experiment JSON")->required()->check(CLI::ExistingFile);
    cap_cmd->add_option("--kind", cap_kind, "reliability, delay or both");
    cap_cmd->add_option("--grid", grid, "ascending update periods in s");
    cap_cmd->add_option("--jobs", jobs, "parallel replications")->check(CLI::PositiveNumber);
    cap_cmd->add_option("--out", out_flag, "output directory");

    auto* presets_cmd = app.add_subcommand("presets", "preset catalogue");
    presets_cmd->require_subcommand(1);
    auto* presets_list = presets_cmd->add_subcommand("list", "list presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            if (config_file.empty() == preset.empty()) {
                std::cerr << "run: give exactly one of --config or --preset\n";
                return 2;
            }
            if (!preset.empty()) {
                experiment::PresetOptions o;
                o.seed = seed;
                o.jobs = jobs;
                o.scale = scale;
                if (duration >= 0.0) o.duration_s = duration;
                if (warmup >= 0.0) o.warmup_s = warmup;
                if (replications > 0) o.replications = replications;
                print_files(experiment::run_preset(preset, o, output_root(out_flag) / preset, &std::cerr));
            } else {
                auto c = experiment::parse_config_file(config_file);
                if (*seed_opt) c.seed = seed;
                if (duration >= 0.0) c.duration_s = duration;
                if (warmup >= 0.0) c.warmup_s = warmup;
                if (replications > 0) c.replications = replications;
                print_files(experiment::run_config(c, jobs, output_root(out_flag) / c.name));
            }
            return 0;
        }
        if (*dtmc_cmd) return run_dtmc(line_variable, kind, k, param, loss_file, beta);
        if (*rsm_cmd) return run_rsm(rsm_input);
        if (*cap_cmd) {
            const auto base = experiment::parse_config_file(cap_config);
            return run_capacity(cap_config, cap_kind, grid, jobs, output_root(out_flag) / base.name);
        }
        if (*presets_list) {
            for (const auto& p : experiment::preset_catalog()) {
                std::printf("%-20s %s\n", p.name.c_str(), p.description.c_str());
            }
            return 0;
        }
    } catch (const experiment::ConfigError& e) {
        for (const auto& p : e.problems()) std::cerr << "config: " << p << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
