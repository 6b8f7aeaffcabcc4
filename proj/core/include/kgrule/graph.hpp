#pragma once

// In-memory knowledge graph: string interning, triple storage and the three
// access paths the mining loop needs -- by-relation triple lists (uniform
// head sampling), per-entity adjacency (random walks and joins) and an
// entity-pair index (cyclic path completion, existence checks).
//
// A graph is immutable once constructed. Splits of one dataset share a
// Dictionaries instance so entity/relation ids agree across train/valid/test.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kgrule {

using EntityId = std::int32_t;
using RelationId = std::int32_t;

struct Triple {
    EntityId subject;
    RelationId relation;
    EntityId object;

    bool operator==(const Triple&) const = default;
    auto operator<=>(const Triple&) const = default;
};

// Dense string interner. Ids are assigned in first-encounter order.
class Dictionary {
public:
    std::int32_t intern(std::string_view name);
    std::optional<std::int32_t> find(std::string_view name) const;
    const std::string& name(std::int32_t id) const;
    std::size_t size() const { return names_.size(); }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::int32_t> ids_;
};

struct Dictionaries {
    Dictionary entities;
    Dictionary relations;
};

// One edge incident to an entity. `reversed == false` means the underlying
// triple is (from, relation, other); reversed means (other, relation, from),
// i.e. the edge is being looked at from its object side.
struct Edge {
    RelationId relation;
    EntityId other;
    bool reversed;
};

// A relation together with the orientation in which it connects a pair:
// forward means p(a, b) is a triple, backward means p(b, a) is.
struct PairRelation {
    RelationId relation;
    bool forward;

    bool operator==(const PairRelation&) const = default;
};

class KnowledgeGraph {
public:
    // Takes ownership of the triples (duplicates are dropped, order is
    // canonicalized) and keeps a shared reference to the dictionaries.
    KnowledgeGraph(std::vector<Triple> triples,
                   std::shared_ptr<const Dictionaries> dicts);

    const std::shared_ptr<const Dictionaries>& dicts() const { return dicts_; }

    std::size_t triple_count() const { return triples_.size(); }
    std::size_t entity_count() const { return dicts_->entities.size(); }
    std::size_t relation_count() const { return dicts_->relations.size(); }

    std::span<const Triple> triples() const { return triples_; }
    std::span<const Triple> relation_triples(RelationId r) const;

    // Adjacency, sorted by (relation, other) so per-relation neighbours can
    // be found with equal_range.
    std::span<const Edge> outgoing(EntityId e) const;
    std::span<const Edge> incoming(EntityId e) const;
    std::size_t degree(EntityId e) const;

    std::span<const EntityId> objects(EntityId subject, RelationId r) const;
    std::span<const EntityId> subjects(EntityId object, RelationId r) const;

    bool contains(EntityId s, RelationId r, EntityId o) const;
    bool contains(const Triple& t) const { return contains(t.subject, t.relation, t.object); }

    // All relations connecting a to b in either orientation. For a == b each
    // self-triple relation is reported once, as forward.
    std::vector<PairRelation> connecting_relations(EntityId a, EntityId b) const;

    // True when some triple links a and b in either direction.
    bool pair_connected(EntityId a, EntityId b) const;

private:
    std::span<const EntityId> neighbor_ids(EntityId e, RelationId r, bool outgoing) const;

    std::shared_ptr<const Dictionaries> dicts_;
    std::vector<Triple> triples_;              // sorted by (relation, subject, object)
    std::vector<std::uint32_t> relation_offsets_;  // size relation_count()+1
    std::vector<Edge> out_edges_, in_edges_;
    std::vector<std::uint32_t> out_offsets_, in_offsets_;  // size entity_count()+1
    // neighbor id arrays parallel to out_edges_/in_edges_ (contiguous per
    // (entity, relation) block thanks to the sort), for span-based lookups
    std::vector<EntityId> out_ids_, in_ids_;
    std::unordered_map<std::uint64_t, std::vector<RelationId>> pairs_;
};

// --- TSV I/O ------------------------------------------------------------
//
// One triple per nonempty line: subject <TAB> relation <TAB> object.
// Malformed lines raise std::runtime_error naming the file and line number.

std::vector<Triple> read_triples(std::istream& in, std::string_view origin,
                                 Dictionaries& dicts);
std::vector<Triple> read_triples_file(const std::string& path, Dictionaries& dicts);

KnowledgeGraph load_graph(const std::string& path,
                          const std::shared_ptr<Dictionaries>& dicts);

void write_triples(std::ostream& out, const KnowledgeGraph& kg);
void write_triples_file(const std::string& path, const KnowledgeGraph& kg);

}  // namespace kgrule
