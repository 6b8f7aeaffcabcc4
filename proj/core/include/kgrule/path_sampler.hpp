#pragma once

// Random path sampling, the generator feeding rule construction. A path is a
// head triple plus a random walk of n steps starting at one end of that
// triple. Cyclic paths walk n-1 steps and close back to the other end of the
// head triple through the pair index; acyclic paths walk n free steps.
// Only straight paths are returned: no entity appears twice, except that a
// cyclic path ends where the head triple does.

#include <optional>
#include <vector>

#include "kgrule/graph.hpp"
#include "kgrule/random.hpp"

namespace kgrule {

struct PathProfile {
    int length = 1;      // body atoms in the resulting rules, n >= 1
    bool cyclic = false;

    bool operator==(const PathProfile&) const = default;
};

// One walk step. The underlying triple is (from, relation, to) when not
// reversed and (to, relation, from) when the edge was traversed against its
// direction.
struct PathStep {
    RelationId relation;
    EntityId from;
    EntityId to;
    bool reversed;

    Triple triple() const {
        return reversed ? Triple{to, relation, from} : Triple{from, relation, to};
    }
};

struct Path {
    Triple head;
    bool walk_from_subject;       // walk starts at head.subject, else head.object
    std::vector<PathStep> walk;   // exactly profile.length steps
    bool cyclic;

    EntityId walk_start() const { return walk_from_subject ? head.subject : head.object; }
    EntityId other_end() const { return walk_from_subject ? head.object : head.subject; }
};

bool is_straight(const Path& path);

// Samples one path whose head triple is drawn uniformly from the target
// relation's triples. Each attempt picks a head, a walk side and walks
// uniformly over merged outgoing+incoming edges; revisiting an entity or
// failing to close a cycle voids the attempt. Returns nullopt once
// max_attempts attempts failed.
std::optional<Path> sample_path(const KnowledgeGraph& kg, RelationId relation,
                                const PathProfile& profile, Rng& rng,
                                int max_attempts = 5);

}  // namespace kgrule
