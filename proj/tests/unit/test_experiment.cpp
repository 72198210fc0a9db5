#include "vardislab/experiment/config.hpp"
#include "vardislab/experiment/csv.hpp"
#include "vardislab/experiment/presets.hpp"
#include "vardislab/experiment/runner.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace vardislab;
using namespace vardislab::experiment;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("vardislab-test-" + name);
    fs::remove_all(p);
    return p;
}

bool mentions(const ConfigError& e, const std::string& needle) {
    return std::any_of(e.problems().begin(), e.problems().end(),
                       [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST(Config, MinimalFileTakesDefaults) {
    const auto c = parse_config_text("{}");
    const ExperimentConfig d;
    EXPECT_EQ(c.rep_cnt, d.rep_cnt);
    EXPECT_EQ(c.max_beacon_size, 200U);
    EXPECT_DOUBLE_EQ(c.beta_hz, 10.0);
    EXPECT_TRUE(c.summaries);
    EXPECT_EQ(c.protocol, sim::Protocol::Vardis);
}

TEST(Config, FullDocument) {
    const auto c = parse_config_text(R"({
      "name": "x", "protocol": "vardis-always-repeat", "rep_cnt": 3,
      "deployment": {"kind": "line-variable", "k": 8, "extent_m": 1000},
      "beacon": {"rate_hz": 20, "timing": "exponential", "jitter": 0.05, "max_size": 300},
      "vardis": {"max_sum_cnt": 20, "summaries": false},
      "traffic": {"period_s": 0.5, "distribution": "exponential", "producers": "all", "consumers": [1, 2]},
      "run": {"duration_s": 50, "warmup_s": 5, "replications": 2, "seed": 9}
    })");
    EXPECT_EQ(c.name, "x");
    EXPECT_EQ(c.protocol, sim::Protocol::VardisAlwaysRepeat);
    EXPECT_EQ(c.deployment.kind, sim::DeploymentKind::LineVariable);
    EXPECT_EQ(c.deployment.k, 8U);
    EXPECT_DOUBLE_EQ(c.deployment.extent_m, 1000.0);
    EXPECT_EQ(c.timing, bp::BeaconTiming::Distribution::Exponential);
    EXPECT_EQ(c.max_beacon_size, 300U);
    EXPECT_FALSE(c.summaries);
    EXPECT_EQ(c.producers.mode, NodeSet::Mode::All);
    EXPECT_EQ(c.consumers.nodes, (std::vector<std::size_t>{1, 2}));
    EXPECT_EQ(c.seed, 9U);
    // Round trip through JSON.
    const auto again = parse_config(to_json(c));
    EXPECT_EQ(to_json(again), to_json(c));
}

TEST(Config, UnknownKeyNamed) {
    try {
        (void)parse_config_text(R"({"beacon": {"rate_hz": 10, "ratee": 3}})");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.code(), ConfigErrc::ValidationError);
        EXPECT_TRUE(mentions(e, "beacon.ratee"));
    }
}

TEST(Config, RepCntZeroRejected) {
    try {
        (void)parse_config_text(R"({"rep_cnt": 0})");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.code(), ConfigErrc::ValidationError);
        EXPECT_TRUE(mentions(e, "rep_cnt"));
    }
}

TEST(Config, AllProblemsReported) {
    try {
        (void)parse_config_text(R"({"rep_cnt": 0, "beacon": {"rate_hz": -1}, "bogus": 1})");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_GE(e.problems().size(), 3U);
    }
}

TEST(Config, SyntaxErrorIsParseError) {
    try {
        (void)parse_config_text("{ not json");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.code(), ConfigErrc::ParseError);
    }
}

TEST(Config, NodeOutsideDeploymentRejected) {
    EXPECT_THROW((void)parse_config_text(
                     R"({"deployment": {"k": 4}, "traffic": {"consumers": [7]}})"),
                 ConfigError);
}

TEST(Config, ToSimConfigResolvesReferenceNodes) {
    ExperimentConfig c;
    c.deployment = {sim::DeploymentKind::GridFixed, 3, 0.1, 0};
    const auto s = to_sim_config(c);
    EXPECT_EQ(s.traffic.producers, (std::vector<std::size_t>{2}));
    EXPECT_EQ(s.consumers, (std::vector<std::size_t>{6}));
    EXPECT_EQ(measured_pair(s), (std::pair<std::size_t, std::size_t>{2, 6}));
}

TEST(Csv, FormatNumber) {
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333");
    EXPECT_EQ(format_number(2.0), "2");
    EXPECT_EQ(format_number(std::nan("")), "NA");
}

TEST(Presets, CatalogHasFamilies) {
    const auto& cat = preset_catalog();
    EXPECT_GE(cat.size(), 6U);
    std::set<std::string> names;
    for (const auto& p : cat) names.insert(p.name);
    for (const char* n : {"line-fixed-p20", "sensitivity-grid", "flooding-comparison",
                          "line-variable", "dtmc-validate", "grid-capacity"}) {
        EXPECT_TRUE(names.contains(n)) << n;
    }
    EXPECT_THROW((void)expand_preset("nope", {}), std::invalid_argument);
}

TEST(Presets, LineFixedCoversK3To17) {
    const auto pts = expand_preset("line-fixed-p20", {});
    std::set<std::size_t> ks;
    for (const auto& p : pts) {
        ks.insert(p.deployment.k);
        EXPECT_EQ(p.deployment.kind, sim::DeploymentKind::LineFixed);
        EXPECT_DOUBLE_EQ(p.deployment.per, 0.2);
    }
    EXPECT_EQ(ks.size(), 15U);
    EXPECT_EQ(*ks.begin(), 3U);
    EXPECT_EQ(*ks.rbegin(), 17U);
}

TEST(Presets, OverridesApply) {
    PresetOptions o;
    o.duration_s = 12;
    o.warmup_s = 2;
    o.replications = 1;
    o.seed = 5;
    for (const auto& p : expand_preset("line-variable", o)) {
        EXPECT_DOUBLE_EQ(p.duration_s, 12.0);
        EXPECT_DOUBLE_EQ(p.warmup_s, 2.0);
        EXPECT_EQ(p.replications, 1U);
        EXPECT_EQ(p.seed, 5U);
    }
}

TEST(Presets, DtmcValidateHasModelColumns) {
    PresetOptions o;
    o.duration_s = 20;
    o.warmup_s = 2;
    o.replications = 1;
    o.jobs = 4;
    const auto dir = scratch("dtmc");
    const auto files = run_preset("dtmc-validate", o, dir);
    ASSERT_FALSE(files.empty());
    const std::string text = slurp(dir / "metrics.csv");
    const std::string header = text.substr(0, text.find('\n'));
    for (const char* col : {"delay_mean_s", "dtmc_steps", "dtmc_delay_s", "rel_error"}) {
        EXPECT_NE(header.find(col), std::string::npos) << col;
    }
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 11);
    fs::remove_all(dir);
}

TEST(Runner, FixedSeedIsReproducibleAcrossJobCounts) {
    ExperimentConfig c;
    c.deployment = {sim::DeploymentKind::LineFixed, 4, 0.2, 0};
    c.lambda_s = 1.0;
    c.duration_s = 40;
    c.warmup_s = 5;
    c.replications = 4;
    c.seed = 3;
    const auto a = scratch("a");
    const auto b = scratch("b");
    (void)run_config(c, 1, a);
    (void)run_config(c, 4, b);
    const auto ta = slurp(a / "metrics.csv");
    EXPECT_FALSE(ta.empty());
    EXPECT_EQ(ta, slurp(b / "metrics.csv"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Runner, ReplicationSeedsDiffer) {
    ExperimentConfig c;
    c.deployment = {sim::DeploymentKind::LineFixed, 3, 0.2, 0};
    c.duration_s = 20;
    c.warmup_s = 0;
    const auto r0 = run_replication(c, 0);
    const auto r1 = run_replication(c, 1);
    EXPECT_NE(r0.seed, r1.seed);
    EXPECT_EQ(r0.seed, replication_seed(c.seed, 0));
}
