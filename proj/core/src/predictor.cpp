#include "kgrule/predictor.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace kgrule {

RuleIndex::RuleIndex(std::vector<ParsedRule> rules, std::size_t relation_count)
    : rules_(std::move(rules)) {
    std::stable_sort(rules_.begin(), rules_.end(),
                     [](const ParsedRule& a, const ParsedRule& b) {
                         if (a.rule.head.relation != b.rule.head.relation)
                             return a.rule.head.relation < b.rule.head.relation;
                         return a.stats.confidence > b.stats.confidence;
                     });
    offsets_.assign(relation_count + 1, 0);
    for (const ParsedRule& r : rules_) {
        if (std::size_t(r.rule.head.relation) >= relation_count)
            throw std::invalid_argument("rule head relation outside the dictionary");
        offsets_[std::size_t(r.rule.head.relation) + 1]++;
    }
    for (std::size_t i = 0; i < relation_count; ++i) offsets_[i + 1] += offsets_[i];
}

std::span<const ParsedRule> RuleIndex::for_relation(RelationId r) const {
    if (r < 0 || std::size_t(r) + 1 >= offsets_.size()) return {};
    return {rules_.data() + offsets_[std::size_t(r)],
            rules_.data() + offsets_[std::size_t(r) + 1]};
}

namespace {
bool confidences_better(EntityId ea, const std::vector<double>& a, EntityId eb,
                        const std::vector<double>& b);
}

bool candidate_better(const Candidate& a, const Candidate& b) {
    return confidences_better(a.entity, a.confidences, b.entity, b.confidences);
}

namespace {

// DFS over the body chain with one end pre-bound (or anchored enumeration
// when the head variable side is open), collecting values of one chain
// position or just checking satisfiability.
struct ApplyEnum {
    const KnowledgeGraph& kg;
    const Rule& rule;
    bool oi;

    std::vector<Term> chain;
    std::vector<EntityId> vals;  // -1 = unbound
    std::vector<EntityId> constants;
    bool reversed = false;
    int collect_pos = -1;  // -1: existence only
    bool stop = false;
    std::unordered_set<EntityId> found;

    ApplyEnum(const KnowledgeGraph& kg_, const Rule& rule_, bool oi_)
        : kg(kg_), rule(rule_), oi(oi_), chain(body_chain(rule_)),
          vals(chain.size(), -1), constants(rule_.constants()) {}

    bool oi_ok(EntityId cand) const {
        if (!oi) return true;
        for (std::size_t i = 0; i < vals.size(); ++i)
            if (vals[i] == cand && chain[i].is_variable()) return false;
        for (EntityId c : constants)
            if (c == cand) return false;
        return true;
    }

    bool anchored = false;  // chain[0] values come from first-atom anchors

    void complete() {
        if (collect_pos < 0) {
            stop = true;  // one grounding settles an existence query
            return;
        }
        found.insert(vals[std::size_t(collect_pos)]);
        // An anchored subtree shares one chain[0] value; it is proven now.
        if (anchored) stop = true;
    }

    void step(std::size_t k) {
        const std::size_t n = rule.body.size();
        if (k == n) {
            complete();
            return;
        }
        const std::size_t atom_idx = reversed ? n - 1 - k : k;
        const std::size_t in_pos = reversed ? n - k : k;
        const std::size_t out_pos = reversed ? n - 1 - k : k + 1;
        const Atom& atom = rule.body[atom_idx];
        const bool in_is_lhs = atom.lhs == chain[in_pos];
        const EntityId in_val = vals[in_pos];
        const Term& out = chain[out_pos];

        if (out.is_constant()) {
            const EntityId c = out.entity();
            const Triple t = in_is_lhs ? Triple{in_val, atom.relation, c}
                                       : Triple{c, atom.relation, in_val};
            if (kg.contains(t)) {
                vals[out_pos] = c;
                step(k + 1);
                vals[out_pos] = -1;
            }
            return;
        }

        auto cands = in_is_lhs ? kg.objects(in_val, atom.relation)
                               : kg.subjects(in_val, atom.relation);
        for (EntityId c : cands) {
            if (!oi_ok(c)) continue;
            vals[out_pos] = c;
            step(k + 1);
            vals[out_pos] = -1;
            if (stop) return;
        }
    }

    // Enumerates instantiations of the first atom when chain[0] is unbound.
    void run_anchored() {
        anchored = true;
        const Atom& first = rule.body.front();
        const bool t0_is_lhs = first.lhs == chain.front();
        const Term& t1 = chain[1];

        auto visit = [&](EntityId v0, EntityId v1) {
            if (found.count(v0)) return;  // value already proven
            if (!oi_ok(v0)) return;
            vals[0] = v0;
            if (t1.is_variable() && !oi_ok(v1)) {
                vals[0] = -1;
                return;
            }
            vals[1] = v1;
            stop = false;
            step(1);
            vals[0] = vals[1] = -1;
        };

        if (t1.is_constant()) {
            auto anchors = t0_is_lhs ? kg.subjects(t1.entity(), first.relation)
                                     : kg.objects(t1.entity(), first.relation);
            for (EntityId v : anchors) visit(v, t1.entity());
        } else {
            for (const Triple& t : kg.relation_triples(first.relation))
                visit(t0_is_lhs ? t.subject : t.object, t0_is_lhs ? t.object : t.subject);
        }
        stop = false;
    }
};

}  // namespace

namespace {

// True when `a` beats `b` in every possible future, where b may still gain
// entries no larger than `pad` (and a may too: a win decided at a real entry
// of a larger than pad cannot be undone by later growth on either side).
bool beats_padded(const std::vector<double>& a, const std::vector<double>& b, double pad) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double bv = i < b.size() ? b[i] : pad;
        if (a[i] > bv) return true;
        if (a[i] < bv) return false;
    }
    return false;  // a exhausted first: the padded b never loses
}

bool confidences_better(EntityId ea, const std::vector<double>& a, EntityId eb,
                        const std::vector<double>& b) {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i)
        if (a[i] != b[i]) return a[i] > b[i];
    if (a.size() != b.size()) return a.size() > b.size();
    return ea < eb;
}

// Sound early-stop test: the current top-k is final if its internal order is
// robust, the k-th beats every remaining candidate robustly, and no candidate
// first proposed by the remaining rules (confidence <= next_conf) can reach
// the k-th spot.
bool rank_settled(const std::unordered_map<EntityId, std::vector<double>>& agg,
                  std::size_t k, double next_conf) {
    if (agg.size() < k) return false;
    struct Entry {
        EntityId entity;
        const std::vector<double>* confs;
    };
    std::vector<Entry> order;
    order.reserve(agg.size());
    for (const auto& [entity, confs] : agg) order.push_back({entity, &confs});
    std::sort(order.begin(), order.end(), [](const Entry& a, const Entry& b) {
        return confidences_better(a.entity, *a.confs, b.entity, *b.confs);
    });

    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j)
            if (!beats_padded(*order[i].confs, *order[j].confs, next_conf)) return false;
    const std::vector<double>& kth = *order[k - 1].confs;
    for (std::size_t j = k; j < order.size(); ++j)
        if (!beats_padded(kth, *order[j].confs, next_conf)) return false;
    static const std::vector<double> kNewcomer;
    return beats_padded(kth, kNewcomer, next_conf);
}

}  // namespace

std::vector<EntityId> rule_candidates(const KnowledgeGraph& train, const Rule& rule,
                                      const Query& query, bool object_identity) {
    const Atom& head = rule.head;
    const Term known_t = query.open == QuerySide::tail ? head.lhs : head.rhs;
    const Term open_t = query.open == QuerySide::tail ? head.rhs : head.lhs;
    if (known_t.is_constant() && known_t.entity() != query.known) return {};

    ApplyEnum e(train, rule, object_identity);
    const std::size_t n = rule.body.size();

    if (known_t.is_variable()) {
        if (object_identity)
            for (EntityId c : e.constants)
                if (c == query.known) return {};
        const std::size_t pos = e.chain.front() == known_t ? 0 : n;
        e.vals[pos] = query.known;
        e.reversed = (pos == n);
        if (open_t.is_constant()) {
            e.collect_pos = -1;
            e.step(0);
            return e.stop ? std::vector<EntityId>{open_t.entity()} : std::vector<EntityId>{};
        }
        e.collect_pos = int(pos == 0 ? n : 0);
        e.step(0);
    } else {
        // known side is the head constant: the open head variable starts the chain
        e.collect_pos = 0;
        e.run_anchored();
    }
    return {e.found.begin(), e.found.end()};
}

Prediction predict(const KnowledgeGraph& train, const RuleIndex& rules, const Query& query,
                   const ApplyOptions& opts) {
    auto relevant = rules.for_relation(query.relation);
    std::unordered_map<EntityId, std::vector<double>> agg;
    std::unordered_set<EntityId> rejected;

    for (std::size_t group = 0; group < relevant.size();) {
        std::size_t group_end = group;
        const double conf = relevant[group].stats.confidence;
        while (group_end < relevant.size() && relevant[group_end].stats.confidence == conf)
            ++group_end;

        for (std::size_t i = group; i < group_end; ++i) {
            for (EntityId cand :
                 rule_candidates(train, relevant[i].rule, query, opts.object_identity)) {
                if (rejected.count(cand)) continue;
                if (!agg.count(cand)) {
                    const Triple t = query.open == QuerySide::tail
                                         ? Triple{query.known, query.relation, cand}
                                         : Triple{cand, query.relation, query.known};
                    if (train.contains(t) ||
                        (opts.blocking && train.pair_connected(query.known, cand))) {
                        rejected.insert(cand);
                        continue;
                    }
                }
                agg[cand].push_back(conf);
            }
        }
        group = group_end;

        if (group < relevant.size() && agg.size() >= std::size_t(opts.top_k) &&
            rank_settled(agg, std::size_t(opts.top_k), relevant[group].stats.confidence))
            break;
    }

    Prediction out{query, {}};
    out.candidates.reserve(agg.size());
    for (auto& [entity, confs] : agg) out.candidates.push_back({entity, std::move(confs)});
    std::sort(out.candidates.begin(), out.candidates.end(), candidate_better);
    if (out.candidates.size() > std::size_t(opts.top_k))
        out.candidates.resize(std::size_t(opts.top_k));
    return out;
}

std::size_t rewrite_self_loops(std::vector<Triple>& triples, EntityId self_id) {
    std::size_t count = 0;
    for (Triple& t : triples)
        if (t.subject == t.object) {
            t.object = self_id;
            ++count;
        }
    return count;
}

EntityId ensure_self_entity(Dictionaries& dicts) {
    if (dicts.entities.find("self"))
        throw std::runtime_error(
            "the dataset uses the reserved entity name 'self' needed for self-loop rewriting");
    return dicts.entities.intern("self");
}

bool validation_blocks(const KnowledgeGraph& train, std::span<const Triple> valid) {
    if (valid.empty()) return false;
    for (const Triple& t : valid)
        if (train.pair_connected(t.subject, t.object)) return false;
    return true;
}

void write_predictions(std::ostream& out, std::span<const TriplePredictions> predictions,
                       const Dictionaries& dicts, EntityId self_id) {
    char conf_buf[32];
    auto write_side = [&](const char* label, const Prediction& p) {
        out << label;
        std::unordered_set<EntityId> written;
        bool first = true;
        for (const Candidate& c : p.candidates) {
            const EntityId entity = c.entity == self_id ? p.query.known : c.entity;
            if (!written.insert(entity).second) continue;  // self and known collapsing
            std::snprintf(conf_buf, sizeof conf_buf, "%.4f", c.confidences.front());
            out << (first ? " " : "\t") << dicts.entities.name(entity) << '\t' << conf_buf;
            first = false;
        }
        out << '\n';
    };
    for (const TriplePredictions& tp : predictions) {
        out << dicts.entities.name(tp.source.subject) << ' '
            << dicts.relations.name(tp.source.relation) << ' '
            << dicts.entities.name(tp.source.object) << '\n';
        write_side("Heads:", tp.heads);
        write_side("Tails:", tp.tails);
    }
}

}  // namespace kgrule
