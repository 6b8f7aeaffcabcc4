#include "kgrule/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

namespace kgrule {

namespace {

std::string trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return std::string(s);
}

std::vector<int> parse_int_list(const std::string& value) {
    std::vector<int> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw std::invalid_argument("empty list element");
        std::size_t used = 0;
        try {
            out.push_back(std::stoi(item, &used));
        } catch (const std::out_of_range&) {
            throw std::invalid_argument("out of range: " + item);
        } catch (const std::invalid_argument&) {
            throw std::invalid_argument("not an integer: " + item);
        }
        if (used != item.size()) throw std::invalid_argument("not an integer: " + item);
    }
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

bool parse_switch(const std::string& value) {
    if (value == "on" || value == "true") return true;
    if (value == "off" || value == "false") return false;
    throw std::invalid_argument("expected on/off");
}

template <typename T>
T parse_number(const std::string& value, T (*convert)(const std::string&, std::size_t*)) {
    std::size_t used = 0;
    T result;
    try {
        result = convert(value, &used);
    } catch (const std::out_of_range&) {
        throw std::invalid_argument("out of range: " + value);
    }
    if (used != value.size()) throw std::invalid_argument("not a number: " + value);
    return result;
}

double to_double(const std::string& s, std::size_t* used) {
    try {
        return std::stod(s, used);
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("not a number: " + s);
    }
}
int to_int(const std::string& s, std::size_t* used) {
    try {
        return std::stoi(s, used);
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("not a number: " + s);
    }
}
std::uint64_t to_u64(const std::string& s, std::size_t* used) {
    if (!s.empty() && s[0] == '-') throw std::invalid_argument("negative");
    try {
        return std::stoull(s, used);
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("not a number: " + s);
    }
}

}  // namespace

EngineConfig parse_config(std::istream& in, std::string_view origin) {
    EngineConfig config;

    const std::unordered_map<std::string, std::function<void(const std::string&)>> setters = {
        {"train", [&](const std::string& v) { config.train = v; }},
        {"valid", [&](const std::string& v) { config.valid = v; }},
        {"test", [&](const std::string& v) { config.test = v; }},
        {"rule_prefix", [&](const std::string& v) { config.rule_prefix = v; }},
        {"rules", [&](const std::string& v) { config.rules = v; }},
        {"predictions", [&](const std::string& v) { config.predictions = v; }},
        {"report", [&](const std::string& v) { config.report = v; }},
        {"snapshots", [&](const std::string& v) { config.snapshots = parse_int_list(v); }},
        {"duration", [&](const std::string& v) { config.duration = parse_number(v, to_double); }},
        {"policy", [&](const std::string& v) { config.policy = v; }},
        {"epsilon", [&](const std::string& v) { config.epsilon = parse_number(v, to_double); }},
        {"reward", [&](const std::string& v) { config.reward = v; }},
        {"span_seconds",
         [&](const std::string& v) { config.span_seconds = parse_number(v, to_double); }},
        {"span_ops", [&](const std::string& v) { config.span_ops = parse_number(v, to_u64); }},
        {"saturation_boundary",
         [&](const std::string& v) { config.saturation_boundary = parse_number(v, to_double); }},
        {"max_length_cyclic",
         [&](const std::string& v) { config.max_length_cyclic = parse_number(v, to_int); }},
        {"max_length_acyclic",
         [&](const std::string& v) { config.max_length_acyclic = parse_number(v, to_int); }},
        {"profile", [&](const std::string& v) { config.profile = v; }},
        {"rule_types", [&](const std::string& v) { config.rule_types = v; }},
        {"min_support",
         [&](const std::string& v) { config.min_support = parse_number(v, to_u64); }},
        {"min_confidence",
         [&](const std::string& v) { config.min_confidence = parse_number(v, to_double); }},
        {"laplace", [&](const std::string& v) { config.laplace = parse_number(v, to_int); }},
        {"sample_anchors",
         [&](const std::string& v) {
             config.sample_anchors = std::uint32_t(parse_number(v, to_u64));
         }},
        {"branch_limit",
         [&](const std::string& v) {
             config.branch_limit = std::uint32_t(parse_number(v, to_u64));
         }},
        {"max_attempts",
         [&](const std::string& v) { config.max_attempts = parse_number(v, to_int); }},
        {"threads", [&](const std::string& v) { config.threads = parse_number(v, to_int); }},
        {"seed", [&](const std::string& v) { config.seed = parse_number(v, to_u64); }},
        {"oi", [&](const std::string& v) { config.oi = parse_switch(v); }},
        {"top_k", [&](const std::string& v) { config.top_k = parse_number(v, to_int); }},
        {"blocking", [&](const std::string& v) { config.blocking = v; }},
        {"k_list", [&](const std::string& v) { config.k_list = parse_int_list(v); }},
        {"per_relation",
         [&](const std::string& v) { config.per_relation = parse_switch(v); }},
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto where = std::string(origin) + ":" + std::to_string(line_no);

        auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(where + ": expected 'key = value'");
        const std::string key = trim(std::string_view(stripped).substr(0, eq));
        const std::string value = trim(std::string_view(stripped).substr(eq + 1));
        if (key.empty()) throw std::runtime_error(where + ": empty key");
        if (value.empty()) throw std::runtime_error(where + ": empty value for '" + key + "'");

        auto it = setters.find(key);
        if (it == setters.end())
            throw std::runtime_error(where + ": unknown key '" + key + "'");
        try {
            it->second(value);
        } catch (const std::exception& e) {
            throw std::runtime_error(where + ": bad value for '" + key + "': " + e.what());
        }
        config.explicit_keys.insert(key);
    }
    return config;
}

EngineConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return parse_config(in, path);
}

void finalize_config(EngineConfig& config) {
    auto fail = [](const std::string& msg) { throw std::runtime_error("config: " + msg); };

    if (!config.profile.empty()) {
        if (config.profile != "wn") fail("unknown profile '" + config.profile + "'");
        if (!config.explicit_keys.count("max_length_cyclic")) config.max_length_cyclic = 5;
    }
    if (config.duration <= 0.0) {
        if (config.snapshots.empty()) fail("either duration or snapshots must be set");
        config.duration = double(*std::max_element(config.snapshots.begin(),
                                                   config.snapshots.end()));
    }
    if (config.threads == 0) {
        config.threads = int(std::thread::hardware_concurrency());
        if (config.threads == 0) config.threads = 1;
    }
    if (config.threads < 0) fail("threads must be >= 0");
    if (config.policy != "greedy" && config.policy != "weighted" && config.policy != "random" &&
        config.policy != "saturation")
        fail("unknown policy '" + config.policy + "'");
    if (config.reward != "s" && config.reward != "s_times_c" &&
        config.reward != "s_times_c_over_2l")
        fail("unknown reward '" + config.reward + "'");
    if (config.blocking != "auto" && config.blocking != "on" && config.blocking != "off")
        fail("blocking must be auto, on or off");
    if (config.epsilon < 0.0 || config.epsilon > 1.0) fail("epsilon must be in [0, 1]");
    if (config.saturation_boundary <= 0.0 || config.saturation_boundary > 1.0)
        fail("saturation_boundary must be in (0, 1]");
    if (config.span_seconds <= 0.0) fail("span_seconds must be positive");
    if (config.max_length_cyclic < 0 || config.max_length_acyclic < 0 ||
        (config.max_length_cyclic == 0 && config.max_length_acyclic == 0))
        fail("at least one of max_length_cyclic/max_length_acyclic must be >= 1");
    if (config.min_confidence < 0.0) fail("min_confidence must be >= 0");
    if (config.laplace < 0) fail("laplace must be >= 0");
    if (config.max_attempts < 1) fail("max_attempts must be >= 1");
    if (config.top_k < 1) fail("top_k must be >= 1");
    for (int k : config.k_list)
        if (k < 1) fail("k_list entries must be >= 1");
    for (int s : config.snapshots)
        if (s < 1) fail("snapshot times must be >= 1");

    for (std::size_t i = 1; i < config.snapshots.size(); ++i)
        if (config.snapshots[i] <= config.snapshots[i - 1])
            fail("snapshot times must be strictly increasing");

    const std::string& types = config.rule_types;
    std::stringstream ss(types);
    std::string item;
    bool any = false;
    while (std::getline(ss, item, ',')) {
        if (item != "b" && item != "uc" && item != "ud")
            fail("rule_types entries must be b, uc or ud");
        any = true;
    }
    if (!any) fail("rule_types must name at least one rule type");
}

}  // namespace kgrule
