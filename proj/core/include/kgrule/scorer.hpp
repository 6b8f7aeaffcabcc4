#pragma once

// Rule quality measurement. Support counts the distinct head-variable
// bindings whose body grounding also makes the head a known triple; the
// grounding count is the number of distinct head bindings with a satisfiable
// body; confidence divides support by the grounding count damped with a
// pseudo count. Body enumeration walks the body chain as a join, either
// exhaustively (exact) or bounded by anchor and branch sampling. Sampled
// counts are raw counts over the explored substitutions, never extrapolated.
//
// Object identity is enforced during the join: a variable may not bind to an
// entity already bound to another variable of the rule nor to any constant
// appearing in the rule.

#include <utility>
#include <vector>

#include "kgrule/graph.hpp"
#include "kgrule/random.hpp"
#include "kgrule/rule.hpp"

namespace kgrule {

struct GroundingConfig {
    bool exact = false;                   // ignore the two sampling bounds below
    std::uint32_t sample_anchors = 1000;  // instantiations of the first body atom
    std::uint32_t branch_limit = 50;      // successors kept per join step
    int pseudo_count = 5;
    bool object_identity = true;
};

// Distinct head bindings (subject, object) with a satisfiable body; a
// constant head side is materialized into the pair. Sorted for determinism.
std::vector<std::pair<EntityId, EntityId>> body_groundings(const KnowledgeGraph& kg,
                                                           const Rule& rule,
                                                           const GroundingConfig& cfg,
                                                           Rng& rng);

RuleStats score_rule(const KnowledgeGraph& kg, const Rule& rule,
                     const GroundingConfig& cfg, Rng& rng);

}  // namespace kgrule
