#pragma once

// Engine configuration files: one `key = value` per line, `#` starts a
// comment, unknown keys are hard errors. The same file drives learn, apply
// and eval; each subcommand validates the keys it needs.

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

namespace kgrule {

struct EngineConfig {
    // files
    std::string train;
    std::string valid;
    std::string test;
    std::string rule_prefix = "rules";  // learn writes <rule_prefix>-<seconds>
    std::string rules;                  // apply reads this rule file
    std::string predictions;            // apply writes / eval reads
    std::string report;                 // eval output; empty = stdout

    // learning
    std::vector<int> snapshots = {10, 100};
    double duration = 0.0;  // 0 = run until the last snapshot
    std::string policy = "greedy";
    double epsilon = 0.1;
    std::string reward = "s_times_c_over_2l";  // s | s_times_c | s_times_c_over_2l
    double span_seconds = 1.0;
    std::uint64_t span_ops = 0;  // >0 switches spans to fixed operation counts
    double saturation_boundary = 0.99;
    int max_length_cyclic = 3;
    int max_length_acyclic = 1;
    std::string profile;  // "wn" raises max_length_cyclic to 5
    std::string rule_types = "b,uc,ud";
    std::uint64_t min_support = 2;
    double min_confidence = 0.0001;
    int laplace = 5;
    std::uint32_t sample_anchors = 1000;
    std::uint32_t branch_limit = 50;
    int max_attempts = 5;
    int threads = 0;  // 0 = all hardware threads
    std::uint64_t seed = 1;
    bool oi = true;

    // application / evaluation
    int top_k = 100;
    std::string blocking = "auto";  // auto | on | off
    std::vector<int> k_list = {1, 10};
    bool per_relation = false;

    std::set<std::string> explicit_keys;  // keys the file actually set
};

EngineConfig parse_config(std::istream& in, std::string_view origin);
EngineConfig parse_config_file(const std::string& path);

// Cross-key checks and derived defaults (duration from snapshots, wn profile,
// thread autodetection). Throws std::runtime_error on bad combinations.
void finalize_config(EngineConfig& config);

}  // namespace kgrule
