#include "vardislab/experiment/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace vardislab::experiment {

using nlohmann::json;

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
    std::string out;
    for (const auto& p : problems) {
        if (!out.empty()) out += "; ";
        out += p;
    }
    return out;
}

/// Reads typed fields from one JSON object and records every problem with
/// its path instead of stopping at the first.
class ObjectReader {
public:
    ObjectReader(const json& obj, std::string path, std::vector<std::string>& problems)
        : obj_(obj), path_(std::move(path)), problems_(problems) {
        if (!obj_.is_object()) {
            problems_.push_back(where() + ": expected an object");
            valid_ = false;
        }
    }

    template <typename T>
    void read(const char* key, T& out) {
        known_.insert(key);
        if (!valid_ || !obj_.contains(key)) return;
        const json& v = obj_.at(key);
        try {
            if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) throw std::invalid_argument("expected a boolean");
                out = v.get<bool>();
            } else if constexpr (std::is_integral_v<T>) {
                if (!v.is_number_integer()) throw std::invalid_argument("expected an integer");
                if (v.is_number_unsigned()) {
                    out = static_cast<T>(v.get<std::uint64_t>());
                } else {
                    const auto i = v.get<std::int64_t>();
                    if (i < 0) throw std::invalid_argument("must not be negative");
                    out = static_cast<T>(i);
                }
            } else if constexpr (std::is_floating_point_v<T>) {
                if (!v.is_number()) throw std::invalid_argument("expected a number");
                out = v.get<double>();
            } else {
                if (!v.is_string()) throw std::invalid_argument("expected a string");
                out = v.get<std::string>();
            }
        } catch (const std::exception& e) {
            problems_.push_back(field(key) + ": " + e.what());
        }
    }

    /// Reads a string and maps it through `convert`, which throws on bad input.
    template <typename T, typename F>
    void read_enum(const char* key, T& out, F convert) {
        std::string text;
        bool present = valid_ && obj_.contains(key);
        read(key, text);
        if (!present || text.empty()) return;
        try {
            out = convert(text);
        } catch (const std::exception& e) {
            problems_.push_back(field(key) + ": " + e.what());
        }
    }

    void read_nodes(const char* key, NodeSet& out) {
        known_.insert(key);
        if (!valid_ || !obj_.contains(key)) return;
        const json& v = obj_.at(key);
        if (v.is_string()) {
            const auto s = v.get<std::string>();
            if (s == "reference") {
                out = {NodeSet::Mode::Reference, {}};
            } else if (s == "all") {
                out = {NodeSet::Mode::All, {}};
            } else {
                problems_.push_back(field(key) + ": expected \"reference\", \"all\" or a list");
            }
            return;
        }
        if (!v.is_array()) {
            problems_.push_back(field(key) + ": expected \"reference\", \"all\" or a list");
            return;
        }
        NodeSet set{NodeSet::Mode::List, {}};
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number_unsigned()) {
                problems_.push_back(field(key) + "[" + std::to_string(i) +
                                    "]: expected a node index");
                return;
            }
            set.nodes.push_back(v[i].get<std::size_t>());
        }
        out = std::move(set);
    }

    [[nodiscard]] const json* child(const char* key) {
        known_.insert(key);
        if (!valid_ || !obj_.contains(key)) return nullptr;
        return &obj_.at(key);
    }

    [[nodiscard]] std::string field(const char* key) const {
        return path_.empty() ? std::string(key) : path_ + "." + key;
    }

    void reject_unknown() {
        if (!valid_) return;
        for (const auto& item : obj_.items()) {
            if (!known_.contains(item.key())) {
                problems_.push_back(field(item.key().c_str()) + ": unknown key");
            }
        }
    }

private:
    [[nodiscard]] std::string where() const { return path_.empty() ? "<root>" : path_; }

    const json& obj_;
    std::string path_;
    std::vector<std::string>& problems_;
    std::set<std::string, std::less<>> known_;
    bool valid_ = true;
};

json nodes_to_json(const NodeSet& n) {
    switch (n.mode) {
        case NodeSet::Mode::Reference: return "reference";
        case NodeSet::Mode::All: return "all";
        case NodeSet::Mode::List: return n.nodes;
    }
    return nullptr;
}

bool fixed_density(sim::DeploymentKind kind) {
    return kind == sim::DeploymentKind::LineFixed || kind == sim::DeploymentKind::GridFixed;
}

}  // namespace

ConfigError::ConfigError(ConfigErrc code, std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), code_(code), problems_(std::move(problems)) {}

std::vector<std::size_t> NodeSet::resolve(std::size_t node_count, std::size_t reference) const {
    switch (mode) {
        case Mode::Reference: return {reference};
        case Mode::All: {
            std::vector<std::size_t> all(node_count);
            for (std::size_t i = 0; i < node_count; ++i) all[i] = i;
            return all;
        }
        case Mode::List: return nodes;
    }
    return {};
}

std::string_view to_string(bp::BeaconTiming::Distribution d) {
    return d == bp::BeaconTiming::Distribution::Exponential ? "exponential" : "periodic";
}

bp::BeaconTiming::Distribution timing_from_string(std::string_view s) {
    if (s == "periodic") return bp::BeaconTiming::Distribution::PeriodicJitter;
    if (s == "exponential") return bp::BeaconTiming::Distribution::Exponential;
    throw std::invalid_argument("unknown beacon timing '" + std::string(s) + "'");
}

ExperimentConfig parse_config(const json& doc) {
    ExperimentConfig c;
    std::vector<std::string> problems;
    ObjectReader root(doc, "", problems);
    root.read("name", c.name);
    root.read_enum("protocol", c.protocol, sim::protocol_from_string);
    root.read("rep_cnt", c.rep_cnt);

    if (const json* d = root.child("deployment")) {
        ObjectReader r(*d, "deployment", problems);
        r.read_enum("kind", c.deployment.kind, sim::deployment_kind_from_string);
        r.read("k", c.deployment.k);
        r.read("per", c.deployment.per);
        r.read("extent_m", c.deployment.extent_m);
        r.reject_unknown();
    }
    if (const json* b = root.child("beacon")) {
        ObjectReader r(*b, "beacon", problems);
        r.read("rate_hz", c.beta_hz);
        r.read_enum("timing", c.timing, timing_from_string);
        r.read("jitter", c.jitter);
        r.read("max_size", c.max_beacon_size);
        r.reject_unknown();
    }
    if (const json* v = root.child("vardis")) {
        ObjectReader r(*v, "vardis", problems);
        r.read("max_sum_cnt", c.max_sum_cnt);
        r.read("summaries", c.summaries);
        r.reject_unknown();
    }
    if (const json* t = root.child("traffic")) {
        ObjectReader r(*t, "traffic", problems);
        r.read("period_s", c.lambda_s);
        r.read_enum("distribution", c.update_distribution, sim::update_distribution_from_string);
        r.read_nodes("producers", c.producers);
        r.read_nodes("consumers", c.consumers);
        r.reject_unknown();
    }
    if (const json* f = root.child("flooding")) {
        ObjectReader r(*f, "flooding", problems);
        r.read("mean_backoff_s", c.flood_mean_backoff_s);
        r.reject_unknown();
    }
    if (const json* run = root.child("run")) {
        ObjectReader r(*run, "run", problems);
        r.read("duration_s", c.duration_s);
        r.read("warmup_s", c.warmup_s);
        r.read("replications", c.replications);
        r.read("seed", c.seed);
        r.read("queue_sample_interval_s", c.queue_sample_interval_s);
        r.reject_unknown();
    }
    root.reject_unknown();

    // Fields that failed to parse keep their defaults, so range checks on
    // the rest still apply.
    for (auto& p : validation_problems(c)) problems.push_back(std::move(p));
    if (!problems.empty()) throw ConfigError(ConfigErrc::ValidationError, std::move(problems));
    return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(ConfigErrc::ParseError, {e.what()});
    }
    return parse_config(doc);
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(ConfigErrc::ParseError, {"cannot open " + path.string()});
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str());
}

json to_json(const ExperimentConfig& c) {
    json deployment{{"kind", std::string(sim::to_string(c.deployment.kind))}, {"k", c.deployment.k}};
    if (fixed_density(c.deployment.kind)) {
        deployment["per"] = c.deployment.per;
    } else {
        deployment["extent_m"] = c.deployment.extent_m;
    }
    return json{
        {"name", c.name},
        {"protocol", std::string(sim::to_string(c.protocol))},
        {"rep_cnt", c.rep_cnt},
        {"deployment", deployment},
        {"beacon",
         {{"rate_hz", c.beta_hz},
          {"timing", std::string(to_string(c.timing))},
          {"jitter", c.jitter},
          {"max_size", c.max_beacon_size}}},
        {"vardis", {{"max_sum_cnt", c.max_sum_cnt}, {"summaries", c.summaries}}},
        {"traffic",
         {{"period_s", c.lambda_s},
          {"distribution", std::string(sim::to_string(c.update_distribution))},
          {"producers", nodes_to_json(c.producers)},
          {"consumers", nodes_to_json(c.consumers)}}},
        {"flooding", {{"mean_backoff_s", c.flood_mean_backoff_s}}},
        {"run",
         {{"duration_s", c.duration_s},
          {"warmup_s", c.warmup_s},
          {"replications", c.replications},
          {"seed", c.seed},
          {"queue_sample_interval_s", c.queue_sample_interval_s}}},
    };
}

std::vector<std::string> validation_problems(const ExperimentConfig& c) {
    std::vector<std::string> p;
    const auto& d = c.deployment;
    if (d.k < 2) p.push_back("deployment.k: must be at least 2");
    const bool grid =
        d.kind == sim::DeploymentKind::GridFixed || d.kind == sim::DeploymentKind::GridVariable;
    if (grid && d.k > 255) p.push_back("deployment.k: grid side too large");
    if (!grid && d.k > 4096) p.push_back("deployment.k: line too long");
    if (fixed_density(d.kind) && !(d.per > 0.0 && d.per < 1.0)) {
        p.push_back("deployment.per: must be in (0,1)");
    }
    if (!fixed_density(d.kind) && !(d.extent_m > 0.0)) {
        p.push_back("deployment.extent_m: must be positive");
    }
    if (!(c.beta_hz > 0.0)) p.push_back("beacon.rate_hz: must be positive");
    if (!(c.jitter >= 0.0 && c.jitter < 1.0)) p.push_back("beacon.jitter: must be in [0,1)");
    if (c.max_beacon_size < 64 || c.max_beacon_size > 65535) {
        p.push_back("beacon.max_size: must be in 64..65535");
    }
    if (c.rep_cnt < 1 || c.rep_cnt > proto::max_rep_cnt) p.push_back("rep_cnt: must be in 1..15");
    if (!(c.lambda_s > 0.0)) p.push_back("traffic.period_s: must be positive");
    if (!(c.duration_s >= 0.0)) p.push_back("run.duration_s: must not be negative");
    if (!(c.warmup_s >= 0.0)) p.push_back("run.warmup_s: must not be negative");
    if (c.warmup_s > c.duration_s) p.push_back("run.warmup_s: exceeds run.duration_s");
    if (c.replications < 1) p.push_back("run.replications: must be at least 1");
    if (c.queue_sample_interval_s < 0.0) {
        p.push_back("run.queue_sample_interval_s: must not be negative");
    }
    if (!(c.flood_mean_backoff_s > 0.0)) p.push_back("flooding.mean_backoff_s: must be positive");

    if (d.k >= 2 && d.k <= 4096 && !(grid && d.k > 255)) {
        const std::size_t n = grid ? d.k * d.k : d.k;
        auto check_nodes = [&](const NodeSet& s, const char* field) {
            if (s.mode != NodeSet::Mode::List) return;
            if (s.nodes.empty()) p.push_back(std::string(field) + ": empty node list");
            for (auto i : s.nodes) {
                if (i >= n) {
                    p.push_back(std::string(field) + ": node " + std::to_string(i) +
                                " not in deployment of " + std::to_string(n) + " nodes");
                }
            }
        };
        check_nodes(c.producers, "traffic.producers");
        check_nodes(c.consumers, "traffic.consumers");
    }
    return p;
}

sim::SimConfig to_sim_config(const ExperimentConfig& c) {
    if (auto problems = validation_problems(c); !problems.empty()) {
        throw ConfigError(ConfigErrc::ValidationError, std::move(problems));
    }
    sim::SimConfig s;
    const auto& d = c.deployment;
    s.deployment = sim::build_deployment(d.kind, d.k, fixed_density(d.kind) ? d.per : d.extent_m);
    s.protocol = c.protocol;
    s.timing.distribution = c.timing;
    s.timing.jitter = c.jitter;
    s.timing.rate_hz = c.beta_hz;
    s.max_beacon_size = c.max_beacon_size;
    s.rep_cnt = static_cast<std::uint8_t>(c.rep_cnt);
    s.max_sum_cnt = c.max_sum_cnt;
    s.summaries = c.summaries;
    const std::size_t n = s.deployment.node_count();
    s.traffic.producers = c.producers.resolve(n, s.deployment.reference_producer);
    s.traffic.distribution = c.update_distribution;
    s.traffic.update_period_s = c.lambda_s;
    s.consumers = c.consumers.resolve(n, s.deployment.reference_consumer);
    s.duration_s = c.duration_s;
    s.warmup_s = c.warmup_s;
    s.queue_sample_interval_s = c.queue_sample_interval_s;
    s.flood_mean_backoff_s = c.flood_mean_backoff_s;
    return s;
}

}  // namespace vardislab::experiment
