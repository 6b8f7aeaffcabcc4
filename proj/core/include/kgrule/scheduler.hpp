#pragma once

// The anytime learning loop. Mining time is split into spans; before each
// span, the available cores are allocated across path profiles (length +
// cyclicity combinations) by a multi-armed bandit whose reward is computed
// from the rules a profile contributed that were genuinely new in that span.
// Between spans the worker results are merged single-threaded, so a span is
// the unit of consistency: workers only read the store built by earlier
// spans.
//
// Policies: greedy picks argmax Q per core, exploring uniformly with
// probability epsilon; weighted draws each core from P(k) = Q(k)/sum Q;
// random ignores Q; saturation is the bandit-free baseline that alternates
// cyclicity classes span by span and lengthens a class once the fraction of
// already-known rules among its sampled rules exceeds a boundary.

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgrule/graph.hpp"
#include "kgrule/path_sampler.hpp"
#include "kgrule/random.hpp"
#include "kgrule/rule.hpp"
#include "kgrule/scorer.hpp"

namespace kgrule {

enum class RewardStrategy {
    support,                  // sum of support
    support_confidence,       // sum of support * confidence
    support_confidence_decay  // sum of support * confidence / 2^length
};

enum class SchedulingPolicy { greedy, weighted, random, saturation };

struct ScoredRule {
    Rule rule;
    RuleStats stats;
    PathProfile origin;
};

// Insertion-ordered rule collection; a rule's stats freeze at first
// discovery and later sightings of the same rule are dropped.
class RuleStore {
public:
    bool contains(const std::string& key) const { return index_.count(key) > 0; }
    bool insert(const std::string& key, ScoredRule rule);
    const std::vector<ScoredRule>& rules() const { return rules_; }
    std::size_t size() const { return rules_.size(); }
    void write(std::ostream& out, const Dictionaries& dicts) const;

private:
    std::vector<ScoredRule> rules_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Short profile label used in logs: c2 = cyclic length 2, a1 = acyclic 1.
std::string profile_label(const PathProfile& profile);

// All profiles for the given length bounds, ordered by length with cyclic
// before acyclic; this order doubles as the bandit's tie-break preference.
std::vector<PathProfile> make_profiles(int max_cyclic, int max_acyclic);

double reward(std::span<const ScoredRule> new_rules, RewardStrategy strategy);

// Q = span reward / cores the profile had. Zero cores is a caller bug.
double profile_q(double reward_value, int cores);

// Saturation rule: advance once already_known/sampled strictly exceeds the
// boundary; sampling nothing keeps the current length.
bool saturation_advance(std::size_t sampled_distinct, std::size_t already_known,
                        double boundary);

struct SchedulerOptions {
    SchedulingPolicy policy = SchedulingPolicy::greedy;
    double epsilon = 0.1;
    RewardStrategy reward_strategy = RewardStrategy::support_confidence_decay;
    double saturation_boundary = 0.99;
    int max_length_cyclic = 3;
    int max_length_acyclic = 1;
};

// Bandit state across spans. Q values start at +infinity so every profile is
// tried before any measured Q wins an argmax; ties break on profile order.
class ProfileScheduler {
public:
    ProfileScheduler(const SchedulerOptions& opts, int cores);

    const std::vector<PathProfile>& profiles() const { return profiles_; }
    const std::vector<double>& q_values() const { return q_; }

    // Cores per profile for the coming span, aligned with profiles().
    std::vector<int> allocate(Rng& rng);

    // Weighted-policy draw distribution for the current state (exposed for
    // inspection): one-hot on the first untried profile while any Q is still
    // infinite, uniform when all Q are zero, Q/sum(Q) otherwise.
    std::vector<double> weighted_probabilities() const;

    // Span feedback, all vectors aligned with profiles(). `sampled` counts
    // distinct threshold-passing rules seen in the span, `known` those of
    // them that were already in the store.
    void record(const std::vector<int>& allocation, const std::vector<double>& rewards,
                const std::vector<std::size_t>& sampled,
                const std::vector<std::size_t>& known);

private:
    int argmax_q() const;

    SchedulerOptions opts_;
    int cores_;
    std::vector<PathProfile> profiles_;
    std::vector<double> q_;
    // saturation bookkeeping
    int saturation_cyclic_len_ = 1;
    int saturation_acyclic_len_ = 1;
    bool saturation_next_cyclic_ = true;
    int saturation_active_ = -1;  // profile index the current span runs on
};

struct LearnOptions {
    SchedulerOptions scheduler;
    GroundingConfig grounding;  // sampled mode settings used while mining
    std::uint64_t min_support = 2;
    double min_confidence = 0.0001;
    bool learn_binary = true;
    bool learn_unary_constant = true;
    bool learn_unary_dangling = true;
    int max_attempts = 5;
    int threads = 1;
    std::uint64_t seed = 1;
    double duration_seconds = 100.0;
    std::vector<int> snapshot_times;  // ascending, seconds
    // Span accounting: wall-clock spans of span_seconds by default; when
    // span_ops > 0 each worker instead runs exactly span_ops sampling
    // operations per span and the span still advances virtual time by
    // span_seconds, making runs with a fixed seed reproducible.
    double span_seconds = 1.0;
    std::uint64_t span_ops = 0;
};

using SnapshotSink = std::function<void(int seconds, const RuleStore&)>;

// Mines rules until duration_seconds of (virtual) time passed, invoking
// `snapshot` for each requested snapshot time and logging one line per span
// to `progress` (may be null).
RuleStore run_learning(const KnowledgeGraph& train, const LearnOptions& opts,
                       const SnapshotSink& snapshot, std::ostream* progress);

}  // namespace kgrule
