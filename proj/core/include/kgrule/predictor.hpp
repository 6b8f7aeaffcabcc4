#pragma once

// Link prediction by rule application. For a query r(known, ?) or r(?, known)
// every rule with head relation r is applied in descending confidence order;
// each applicable rule contributes the entities reachable through its body
// (object identity enforced), and a candidate collects one confidence entry
// per distinct rule that proposed it. Candidates are ranked by comparing
// their descending confidence vectors lexicographically (a candidate that
// runs out of entries loses; final ties break on entity id), which realizes
// max-aggregation with confidence-vector refinement.
//
// Candidates already true in the training graph are dropped. The optional
// blocking filter additionally drops candidates already linked to the query
// entity by any training triple, for datasets whose validation set shows
// that connected pairs never reappear in evaluation.

#include <iosfwd>
#include <string>
#include <vector>

#include "kgrule/graph.hpp"
#include "kgrule/rule.hpp"

namespace kgrule {

enum class QuerySide { head, tail };  // the open position to predict

struct Query {
    RelationId relation;
    EntityId known;
    QuerySide open;
};

struct Candidate {
    EntityId entity;
    std::vector<double> confidences;  // descending
};

struct Prediction {
    Query query;
    std::vector<Candidate> candidates;  // best first, truncated to top_k
};

struct ApplyOptions {
    int top_k = 100;
    bool object_identity = true;
    bool blocking = false;
};

// Rules grouped by head relation, descending confidence within a group.
class RuleIndex {
public:
    explicit RuleIndex(std::vector<ParsedRule> rules, std::size_t relation_count);
    std::span<const ParsedRule> for_relation(RelationId r) const;
    std::size_t size() const { return rules_.size(); }

private:
    std::vector<ParsedRule> rules_;
    std::vector<std::uint32_t> offsets_;
};

// True when a beats b under the ranking comparator.
bool candidate_better(const Candidate& a, const Candidate& b);

Prediction predict(const KnowledgeGraph& train, const RuleIndex& rules, const Query& query,
                   const ApplyOptions& opts);

// Entities a single rule proposes for the query (deduplicated, unordered).
// Exposed for the ranking tests; predict() composes it over all rules.
std::vector<EntityId> rule_candidates(const KnowledgeGraph& train, const Rule& rule,
                                      const Query& query, bool object_identity);

// Self-loops r(c, c) confuse object identity, so graphs are mined and applied
// with them rewritten to r(c, self) where `self` is an entity of its own.
// Returns the number of rewritten triples.
std::size_t rewrite_self_loops(std::vector<Triple>& triples, EntityId self_id);

// Interns the placeholder; a dataset that already uses "self" as a real
// entity name cannot be loaded and is rejected outright.
EntityId ensure_self_entity(Dictionaries& dicts);

// Blocking activates when the validation set demonstrates that already
// connected pairs never show up: no validation triple may connect a pair
// linked in training. An empty validation set proves nothing.
bool validation_blocks(const KnowledgeGraph& train, std::span<const Triple> valid);

// --- prediction file ------------------------------------------------------
//
// Three lines per test triple:
//   subject relation object
//   Heads: entity <TAB> confidence <TAB> entity <TAB> confidence ...
//   Tails: ...
// The head line ranks candidates for r(?, object), the tail line for
// r(subject, ?); each candidate carries its best confidence. Predictions of
// the self placeholder are written as the query's known entity.

struct TriplePredictions {
    Triple source;
    Prediction heads;
    Prediction tails;
};

void write_predictions(std::ostream& out, std::span<const TriplePredictions> predictions,
                       const Dictionaries& dicts, EntityId self_id);

}  // namespace kgrule
