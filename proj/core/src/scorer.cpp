#include "kgrule/scorer.hpp"

#include <algorithm>
#include <unordered_set>

namespace kgrule {

namespace {

std::uint64_t pack_pair(EntityId a, EntityId b) {
    return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint32_t(b);
}

// Up to `limit` distinct indices from [0, n), sorted. Draws with replacement
// and deduplicates, so fewer than `limit` may come back.
std::vector<std::uint64_t> sampled_indices(Rng& rng, std::uint64_t n, std::uint32_t limit) {
    std::vector<std::uint64_t> picks;
    picks.reserve(limit);
    for (std::uint32_t i = 0; i < limit; ++i) picks.push_back(uniform_below(rng, n));
    std::sort(picks.begin(), picks.end());
    picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
    return picks;
}

struct Enumerator {
    const KnowledgeGraph& kg;
    const Rule& rule;
    const GroundingConfig& cfg;
    Rng& rng;

    std::vector<Term> chain;
    std::vector<EntityId> vals;
    std::vector<EntityId> constants;
    std::unordered_set<std::uint64_t> pairs;  // head bindings seen
    std::uint64_t support = 0;
    bool unary;
    bool prune_anchor = false;

    Enumerator(const KnowledgeGraph& kg_, const Rule& rule_, const GroundingConfig& cfg_,
               Rng& rng_)
        : kg(kg_), rule(rule_), cfg(cfg_), rng(rng_), chain(body_chain(rule_)),
          vals(chain.size(), -1), constants(rule_.constants()),
          unary(rule_.kind != RuleKind::binary) {}

    bool oi_ok(EntityId cand, std::size_t bound) const {
        if (!cfg.object_identity) return true;
        for (std::size_t i = 0; i < bound; ++i)
            if (vals[i] == cand && chain[i].is_variable()) return false;
        for (EntityId c : constants)
            if (c == cand) return false;
        return true;
    }

    EntityId head_value(const Term& t) const {
        if (t.is_constant()) return t.entity();
        return t == chain.front() ? vals.front() : vals.back();
    }

    std::uint64_t head_pair_for_anchor(EntityId v0) const {
        const EntityId x = rule.head.lhs.is_variable() ? v0 : rule.head.lhs.entity();
        const EntityId y = rule.head.rhs.is_variable() ? v0 : rule.head.rhs.entity();
        return pack_pair(x, y);
    }

    void complete() {
        const EntityId x = head_value(rule.head.lhs);
        const EntityId y = head_value(rule.head.rhs);
        if (pairs.insert(pack_pair(x, y)).second &&
            kg.contains(x, rule.head.relation, y))
            ++support;
        // A unary rule's head binding is fixed by the anchor value, so one
        // full grounding settles the whole anchor subtree.
        if (unary) prune_anchor = true;
    }

    void step(std::size_t i) {
        if (i == rule.body.size()) {
            complete();
            return;
        }
        const Atom& atom = rule.body[i];
        const bool in_is_lhs = atom.lhs == chain[i];
        const EntityId in_val = vals[i];
        const Term& out = chain[i + 1];

        if (out.is_constant()) {
            const EntityId c = out.entity();
            const Triple t = in_is_lhs ? Triple{in_val, atom.relation, c}
                                       : Triple{c, atom.relation, in_val};
            if (kg.contains(t)) {
                vals[i + 1] = c;
                step(i + 1);
            }
            return;
        }

        auto cands = in_is_lhs ? kg.objects(in_val, atom.relation)
                               : kg.subjects(in_val, atom.relation);
        auto try_value = [&](EntityId c) {
            if (!oi_ok(c, i + 1)) return;
            vals[i + 1] = c;
            step(i + 1);
        };
        if (cfg.exact || cands.size() <= cfg.branch_limit) {
            for (EntityId c : cands) {
                try_value(c);
                if (prune_anchor) return;
            }
        } else {
            for (std::uint64_t idx : sampled_indices(rng, cands.size(), cfg.branch_limit)) {
                try_value(cands[idx]);
                if (prune_anchor) return;
            }
        }
    }

    void run() {
        const Atom& first = rule.body.front();
        const bool t0_is_lhs = first.lhs == chain.front();
        const Term& t1 = chain[1];

        if (t1.is_constant()) {
            auto anchors = t0_is_lhs ? kg.subjects(t1.entity(), first.relation)
                                     : kg.objects(t1.entity(), first.relation);
            auto visit = [&](EntityId v0) {
                if (!oi_ok(v0, 0)) return;
                if (unary && pairs.count(head_pair_for_anchor(v0))) return;
                vals[0] = v0;
                vals[1] = t1.entity();
                prune_anchor = false;
                step(1);
            };
            if (cfg.exact || anchors.size() <= cfg.sample_anchors) {
                for (EntityId v : anchors) visit(v);
            } else {
                for (std::uint64_t idx : sampled_indices(rng, anchors.size(), cfg.sample_anchors))
                    visit(anchors[idx]);
            }
            return;
        }

        auto anchors = kg.relation_triples(first.relation);
        auto visit = [&](const Triple& t) {
            const EntityId v0 = t0_is_lhs ? t.subject : t.object;
            const EntityId v1 = t0_is_lhs ? t.object : t.subject;
            if (!oi_ok(v0, 0)) return;
            if (unary && pairs.count(head_pair_for_anchor(v0))) return;
            vals[0] = v0;
            if (!oi_ok(v1, 1)) return;
            vals[1] = v1;
            prune_anchor = false;
            step(1);
        };
        if (cfg.exact || anchors.size() <= cfg.sample_anchors) {
            for (const Triple& t : anchors) visit(t);
        } else {
            for (std::uint64_t idx : sampled_indices(rng, anchors.size(), cfg.sample_anchors))
                visit(anchors[idx]);
        }
    }
};

}  // namespace

std::vector<std::pair<EntityId, EntityId>> body_groundings(const KnowledgeGraph& kg,
                                                           const Rule& rule,
                                                           const GroundingConfig& cfg,
                                                           Rng& rng) {
    Enumerator e(kg, rule, cfg, rng);
    e.run();
    std::vector<std::pair<EntityId, EntityId>> out;
    out.reserve(e.pairs.size());
    for (std::uint64_t key : e.pairs)
        out.emplace_back(EntityId(key >> 32), EntityId(key & 0xffffffffu));
    std::sort(out.begin(), out.end());
    return out;
}

RuleStats score_rule(const KnowledgeGraph& kg, const Rule& rule,
                     const GroundingConfig& cfg, Rng& rng) {
    Enumerator e(kg, rule, cfg, rng);
    e.run();
    RuleStats stats;
    stats.support = e.support;
    stats.body_groundings = e.pairs.size();
    stats.confidence =
        smoothed_confidence(stats.support, stats.body_groundings, cfg.pseudo_count);
    return stats;
}

}  // namespace kgrule
