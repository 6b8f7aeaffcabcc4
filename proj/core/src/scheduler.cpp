#include "kgrule/scheduler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "kgrule/generalize.hpp"

namespace kgrule {

bool RuleStore::insert(const std::string& key, ScoredRule rule) {
    auto [it, fresh] = index_.try_emplace(key, rules_.size());
    if (!fresh) return false;
    rules_.push_back(std::move(rule));
    return true;
}

void RuleStore::write(std::ostream& out, const Dictionaries& dicts) const {
    for (const ScoredRule& r : rules_) out << format_rule(r.rule, r.stats, dicts) << '\n';
}

std::string profile_label(const PathProfile& profile) {
    return (profile.cyclic ? "c" : "a") + std::to_string(profile.length);
}

std::vector<PathProfile> make_profiles(int max_cyclic, int max_acyclic) {
    if (max_cyclic < 0 || max_acyclic < 0 || (max_cyclic == 0 && max_acyclic == 0))
        throw std::invalid_argument("profile lengths must cover at least one profile");
    std::vector<PathProfile> out;
    for (int len = 1; len <= std::max(max_cyclic, max_acyclic); ++len) {
        if (len <= max_cyclic) out.push_back({len, true});
        if (len <= max_acyclic) out.push_back({len, false});
    }
    return out;
}

double reward(std::span<const ScoredRule> new_rules, RewardStrategy strategy) {
    double sum = 0.0;
    for (const ScoredRule& r : new_rules) {
        const double s = double(r.stats.support);
        switch (strategy) {
            case RewardStrategy::support:
                sum += s;
                break;
            case RewardStrategy::support_confidence:
                sum += s * r.stats.confidence;
                break;
            case RewardStrategy::support_confidence_decay:
                sum += s * r.stats.confidence / std::exp2(double(r.rule.length()));
                break;
        }
    }
    return sum;
}

double profile_q(double reward_value, int cores) {
    if (cores <= 0) throw std::invalid_argument("profile_q needs at least one core");
    return reward_value / double(cores);
}

bool saturation_advance(std::size_t sampled_distinct, std::size_t already_known,
                        double boundary) {
    if (sampled_distinct == 0) return false;
    return double(already_known) / double(sampled_distinct) > boundary;
}

ProfileScheduler::ProfileScheduler(const SchedulerOptions& opts, int cores)
    : opts_(opts), cores_(cores),
      profiles_(make_profiles(opts.max_length_cyclic, opts.max_length_acyclic)),
      q_(profiles_.size(), std::numeric_limits<double>::infinity()) {
    if (cores < 1) throw std::invalid_argument("scheduler needs at least one core");
    saturation_next_cyclic_ = opts_.max_length_cyclic >= 1;
}

int ProfileScheduler::argmax_q() const {
    int best = 0;
    for (int i = 1; i < int(q_.size()); ++i)
        if (q_[i] > q_[best]) best = i;
    return best;
}

std::vector<double> ProfileScheduler::weighted_probabilities() const {
    std::vector<double> p(q_.size(), 0.0);
    for (std::size_t i = 0; i < q_.size(); ++i)
        if (std::isinf(q_[i])) {
            p[i] = 1.0;  // explore untried profiles first, in profile order
            return p;
        }
    double sum = 0.0;
    for (double q : q_) sum += q;
    if (sum <= 0.0) {
        std::fill(p.begin(), p.end(), 1.0 / double(p.size()));
        return p;
    }
    for (std::size_t i = 0; i < q_.size(); ++i) p[i] = q_[i] / sum;
    return p;
}

std::vector<int> ProfileScheduler::allocate(Rng& rng) {
    std::vector<int> alloc(profiles_.size(), 0);
    switch (opts_.policy) {
        case SchedulingPolicy::greedy: {
            const int best = argmax_q();
            for (int c = 0; c < cores_; ++c) {
                if (uniform_real01(rng) < opts_.epsilon)
                    alloc[uniform_below(rng, profiles_.size())]++;
                else
                    alloc[std::size_t(best)]++;
            }
            break;
        }
        case SchedulingPolicy::weighted: {
            const auto p = weighted_probabilities();
            for (int c = 0; c < cores_; ++c) {
                const double u = uniform_real01(rng);
                double acc = 0.0;
                std::size_t pick = p.size() - 1;
                for (std::size_t i = 0; i < p.size(); ++i) {
                    acc += p[i];
                    if (u < acc) {
                        pick = i;
                        break;
                    }
                }
                alloc[pick]++;
            }
            break;
        }
        case SchedulingPolicy::random:
            for (int c = 0; c < cores_; ++c) alloc[uniform_below(rng, profiles_.size())]++;
            break;
        case SchedulingPolicy::saturation: {
            const int len =
                saturation_next_cyclic_ ? saturation_cyclic_len_ : saturation_acyclic_len_;
            const PathProfile target{len, saturation_next_cyclic_};
            const auto it = std::find(profiles_.begin(), profiles_.end(), target);
            saturation_active_ = int(it - profiles_.begin());
            alloc[std::size_t(saturation_active_)] = cores_;
            break;
        }
    }
    return alloc;
}

void ProfileScheduler::record(const std::vector<int>& allocation,
                              const std::vector<double>& rewards,
                              const std::vector<std::size_t>& sampled,
                              const std::vector<std::size_t>& known) {
    for (std::size_t i = 0; i < profiles_.size(); ++i)
        if (allocation[i] > 0) q_[i] = profile_q(rewards[i], allocation[i]);

    if (opts_.policy != SchedulingPolicy::saturation || saturation_active_ < 0) return;
    const std::size_t i = std::size_t(saturation_active_);
    if (saturation_advance(sampled[i], known[i], opts_.saturation_boundary)) {
        if (profiles_[i].cyclic)
            saturation_cyclic_len_ = std::min(saturation_cyclic_len_ + 1, opts_.max_length_cyclic);
        else
            saturation_acyclic_len_ =
                std::min(saturation_acyclic_len_ + 1, opts_.max_length_acyclic);
    }
    if (opts_.max_length_cyclic >= 1 && opts_.max_length_acyclic >= 1)
        saturation_next_cyclic_ = !saturation_next_cyclic_;
}

namespace {

struct WorkerOutput {
    std::vector<std::pair<std::string, ScoredRule>> found;  // new passing rules
    std::vector<std::string> known_keys;  // sampled rules already in the store
    std::uint64_t ops = 0;
};

void mine_span(const KnowledgeGraph& kg, const PathProfile& profile,
               const LearnOptions& opts, const RuleStore& store, Rng& rng,
               std::chrono::steady_clock::time_point deadline, WorkerOutput& out) {
    std::unordered_set<std::string> seen;  // keys handled by this worker this span
    const bool ops_mode = opts.span_ops > 0;
    for (std::uint64_t done = 0;; ++done) {
        if (ops_mode) {
            if (done >= opts.span_ops) break;
        } else if (std::chrono::steady_clock::now() >= deadline) {
            break;
        }
        ++out.ops;
        // Uniform draw over training triples makes head relations arrive
        // proportionally to their triple counts.
        const Triple& pick = kg.triples()[uniform_below(rng, kg.triple_count())];
        auto path = sample_path(kg, pick.relation, profile, rng, opts.max_attempts);
        if (!path) continue;
        for (Rule& rule : generalize(*path)) {
            bool wanted = false;
            switch (rule.kind) {
                case RuleKind::binary: wanted = opts.learn_binary; break;
                case RuleKind::unary_constant: wanted = opts.learn_unary_constant; break;
                case RuleKind::unary_dangling: wanted = opts.learn_unary_dangling; break;
                case RuleKind::ground: break;
            }
            if (!wanted) continue;
            std::string key = canonical_key(rule);
            if (!seen.insert(key).second) continue;
            if (store.contains(key)) {
                out.known_keys.push_back(std::move(key));
                continue;
            }
            RuleStats stats = score_rule(kg, rule, opts.grounding, rng);
            if (!passes_thresholds(stats, opts.min_support, opts.min_confidence)) continue;
            out.found.emplace_back(std::move(key), ScoredRule{std::move(rule), stats, profile});
        }
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

RuleStore run_learning(const KnowledgeGraph& train, const LearnOptions& opts,
                       const SnapshotSink& snapshot, std::ostream* progress) {
    if (opts.threads < 1) throw std::invalid_argument("learning needs at least one thread");
    if (opts.span_seconds <= 0.0) throw std::invalid_argument("span_seconds must be positive");
    if (opts.duration_seconds <= 0.0) throw std::invalid_argument("duration must be positive");

    std::vector<int> snapshots = opts.snapshot_times;
    std::sort(snapshots.begin(), snapshots.end());

    RuleStore store;
    ProfileScheduler scheduler(opts.scheduler, opts.threads);
    const auto& profiles = scheduler.profiles();
    Rng master = seeded_rng(opts.seed, 0);
    std::vector<Rng> worker_rngs;
    for (int w = 0; w < opts.threads; ++w)
        worker_rngs.push_back(seeded_rng(opts.seed, std::uint64_t(w) + 1));

    const bool ops_mode = opts.span_ops > 0;
    const auto start = std::chrono::steady_clock::now();
    auto wall_elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };
    double virtual_elapsed = 0.0;
    std::size_t next_snapshot = 0;

    if (progress)
        *progress << "# span\telapsed\tallocation\tnew_rules\trewards\tsampled\n";

    for (std::uint64_t span_id = 1; train.triple_count() > 0; ++span_id) {
        const double before = ops_mode ? virtual_elapsed : wall_elapsed();
        if (before >= opts.duration_seconds - 1e-9) break;

        const std::vector<int> alloc = scheduler.allocate(master);
        std::vector<PathProfile> assignment;
        assignment.reserve(std::size_t(opts.threads));
        for (std::size_t i = 0; i < profiles.size(); ++i)
            for (int c = 0; c < alloc[i]; ++c) assignment.push_back(profiles[i]);

        std::vector<WorkerOutput> outputs(std::size_t(opts.threads));
        const auto deadline = std::chrono::steady_clock::now() +
                              std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                  std::chrono::duration<double>(opts.span_seconds));
        if (opts.threads == 1) {
            mine_span(train, assignment[0], opts, store, worker_rngs[0], deadline, outputs[0]);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(std::size_t(opts.threads));
            for (int w = 0; w < opts.threads; ++w)
                pool.emplace_back(mine_span, std::cref(train), assignment[std::size_t(w)],
                                  std::cref(opts), std::cref(store),
                                  std::ref(worker_rngs[std::size_t(w)]), deadline,
                                  std::ref(outputs[std::size_t(w)]));
            for (auto& t : pool) t.join();
        }

        // Single-threaded merge: first sighting of a rule wins, rewards only
        // credit rules that were genuinely new in this span.
        std::vector<double> rewards(profiles.size(), 0.0);
        std::vector<std::size_t> sampled(profiles.size(), 0), known(profiles.size(), 0);
        std::size_t span_new_total = 0;
        for (std::size_t pi = 0; pi < profiles.size(); ++pi) {
            if (alloc[pi] == 0) continue;
            const std::size_t first_new = store.size();
            std::unordered_set<std::string> known_keys;
            for (int w = 0; w < opts.threads; ++w) {
                if (!(assignment[std::size_t(w)] == profiles[pi])) continue;
                auto& output = outputs[std::size_t(w)];
                for (auto& [key, rule] : output.found) store.insert(key, std::move(rule));
                for (auto& key : output.known_keys) known_keys.insert(std::move(key));
            }
            const std::size_t fresh = store.size() - first_new;
            sampled[pi] = fresh + known_keys.size();
            known[pi] = known_keys.size();
            rewards[pi] = reward({store.rules().data() + first_new, fresh},
                                 opts.scheduler.reward_strategy);
            span_new_total += fresh;
        }
        scheduler.record(alloc, rewards, sampled, known);

        virtual_elapsed += opts.span_seconds;
        const double elapsed = ops_mode ? virtual_elapsed : wall_elapsed();

        if (progress) {
            std::string alloc_s, reward_s, sampled_s;
            for (std::size_t i = 0; i < profiles.size(); ++i) {
                if (alloc[i] == 0) continue;
                const std::string label = profile_label(profiles[i]);
                if (!alloc_s.empty()) alloc_s += ',', reward_s += ',', sampled_s += ',';
                alloc_s += label + ":" + std::to_string(alloc[i]);
                reward_s += label + ":" + format_double(rewards[i]);
                sampled_s += label + ":" + std::to_string(sampled[i]);
            }
            *progress << span_id << '\t' << format_double(elapsed) << '\t' << alloc_s << '\t'
                      << span_new_total << '\t' << reward_s << '\t' << sampled_s << '\n';
        }

        while (next_snapshot < snapshots.size() &&
               double(snapshots[next_snapshot]) <= elapsed + 1e-9) {
            snapshot(snapshots[next_snapshot], store);
            ++next_snapshot;
        }
    }

    return store;
}

}  // namespace kgrule
