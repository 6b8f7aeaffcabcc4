#include "kgrule/graph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kgrule {

namespace {

std::uint64_t pair_key(EntityId a, EntityId b) {
    return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint32_t(b);
}

}  // namespace

std::int32_t Dictionary::intern(std::string_view name) {
    auto it = ids_.find(std::string(name));
    if (it != ids_.end()) return it->second;
    auto id = static_cast<std::int32_t>(names_.size());
    names_.emplace_back(name);
    ids_.emplace(names_.back(), id);
    return id;
}

std::optional<std::int32_t> Dictionary::find(std::string_view name) const {
    auto it = ids_.find(std::string(name));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

const std::string& Dictionary::name(std::int32_t id) const {
    if (id < 0 || std::size_t(id) >= names_.size())
        throw std::out_of_range("dictionary id " + std::to_string(id) + " out of range");
    return names_[std::size_t(id)];
}

KnowledgeGraph::KnowledgeGraph(std::vector<Triple> triples,
                               std::shared_ptr<const Dictionaries> dicts)
    : dicts_(std::move(dicts)), triples_(std::move(triples)) {
    // Canonical order makes every index below deterministic regardless of
    // input file order; duplicates collapse silently.
    std::sort(triples_.begin(), triples_.end(), [](const Triple& a, const Triple& b) {
        return std::tie(a.relation, a.subject, a.object) <
               std::tie(b.relation, b.subject, b.object);
    });
    triples_.erase(std::unique(triples_.begin(), triples_.end()), triples_.end());

    const std::size_t n_rel = dicts_->relations.size();
    const std::size_t n_ent = dicts_->entities.size();

    relation_offsets_.assign(n_rel + 1, 0);
    for (const Triple& t : triples_) relation_offsets_[std::size_t(t.relation) + 1]++;
    for (std::size_t r = 0; r < n_rel; ++r) relation_offsets_[r + 1] += relation_offsets_[r];

    out_offsets_.assign(n_ent + 1, 0);
    in_offsets_.assign(n_ent + 1, 0);
    for (const Triple& t : triples_) {
        out_offsets_[std::size_t(t.subject) + 1]++;
        in_offsets_[std::size_t(t.object) + 1]++;
    }
    for (std::size_t e = 0; e < n_ent; ++e) {
        out_offsets_[e + 1] += out_offsets_[e];
        in_offsets_[e + 1] += in_offsets_[e];
    }
    out_edges_.resize(triples_.size());
    in_edges_.resize(triples_.size());
    std::vector<std::uint32_t> out_cursor(out_offsets_.begin(), out_offsets_.end() - 1);
    std::vector<std::uint32_t> in_cursor(in_offsets_.begin(), in_offsets_.end() - 1);
    for (const Triple& t : triples_) {
        out_edges_[out_cursor[std::size_t(t.subject)]++] = {t.relation, t.object, false};
        in_edges_[in_cursor[std::size_t(t.object)]++] = {t.relation, t.subject, true};
        pairs_[pair_key(t.subject, t.object)].push_back(t.relation);
    }
    auto edge_less = [](const Edge& a, const Edge& b) {
        return std::tie(a.relation, a.other) < std::tie(b.relation, b.other);
    };
    for (std::size_t e = 0; e < n_ent; ++e) {
        std::sort(out_edges_.begin() + out_offsets_[e], out_edges_.begin() + out_offsets_[e + 1],
                  edge_less);
        std::sort(in_edges_.begin() + in_offsets_[e], in_edges_.begin() + in_offsets_[e + 1],
                  edge_less);
    }
    out_ids_.resize(out_edges_.size());
    in_ids_.resize(in_edges_.size());
    for (std::size_t i = 0; i < out_edges_.size(); ++i) out_ids_[i] = out_edges_[i].other;
    for (std::size_t i = 0; i < in_edges_.size(); ++i) in_ids_[i] = in_edges_[i].other;
    for (auto& [key, rels] : pairs_) std::sort(rels.begin(), rels.end());
}

std::span<const Triple> KnowledgeGraph::relation_triples(RelationId r) const {
    if (r < 0 || std::size_t(r) >= dicts_->relations.size()) return {};
    return {triples_.data() + relation_offsets_[std::size_t(r)],
            triples_.data() + relation_offsets_[std::size_t(r) + 1]};
}

std::span<const Edge> KnowledgeGraph::outgoing(EntityId e) const {
    if (e < 0 || std::size_t(e) >= dicts_->entities.size()) return {};
    return {out_edges_.data() + out_offsets_[std::size_t(e)],
            out_edges_.data() + out_offsets_[std::size_t(e) + 1]};
}

std::span<const Edge> KnowledgeGraph::incoming(EntityId e) const {
    if (e < 0 || std::size_t(e) >= dicts_->entities.size()) return {};
    return {in_edges_.data() + in_offsets_[std::size_t(e)],
            in_edges_.data() + in_offsets_[std::size_t(e) + 1]};
}

std::size_t KnowledgeGraph::degree(EntityId e) const {
    return outgoing(e).size() + incoming(e).size();
}

std::span<const EntityId> KnowledgeGraph::neighbor_ids(EntityId e, RelationId r,
                                                       bool out) const {
    const auto& offsets = out ? out_offsets_ : in_offsets_;
    const auto& edges = out ? out_edges_ : in_edges_;
    const auto& ids = out ? out_ids_ : in_ids_;
    if (e < 0 || std::size_t(e) >= dicts_->entities.size()) return {};
    auto lo = edges.begin() + offsets[std::size_t(e)];
    auto hi = edges.begin() + offsets[std::size_t(e) + 1];
    auto range = std::equal_range(lo, hi, r, [](const auto& a, const auto& b) {
        if constexpr (std::is_same_v<std::decay_t<decltype(a)>, Edge>)
            return a.relation < b;
        else
            return a < b.relation;
    });
    auto base = ids.data() + (range.first - edges.begin());
    return {base, std::size_t(range.second - range.first)};
}

std::span<const EntityId> KnowledgeGraph::objects(EntityId subject, RelationId r) const {
    return neighbor_ids(subject, r, true);
}

std::span<const EntityId> KnowledgeGraph::subjects(EntityId object, RelationId r) const {
    return neighbor_ids(object, r, false);
}

bool KnowledgeGraph::contains(EntityId s, RelationId r, EntityId o) const {
    auto it = pairs_.find(pair_key(s, o));
    if (it == pairs_.end()) return false;
    return std::binary_search(it->second.begin(), it->second.end(), r);
}

std::vector<PairRelation> KnowledgeGraph::connecting_relations(EntityId a, EntityId b) const {
    std::vector<PairRelation> result;
    if (auto it = pairs_.find(pair_key(a, b)); it != pairs_.end())
        for (RelationId r : it->second) result.push_back({r, true});
    if (a == b) return result;  // self-triples reported once
    if (auto it = pairs_.find(pair_key(b, a)); it != pairs_.end())
        for (RelationId r : it->second) result.push_back({r, false});
    return result;
}

bool KnowledgeGraph::pair_connected(EntityId a, EntityId b) const {
    return pairs_.count(pair_key(a, b)) > 0 ||
           (a != b && pairs_.count(pair_key(b, a)) > 0);
}

std::vector<Triple> read_triples(std::istream& in, std::string_view origin,
                                 Dictionaries& dicts) {
    std::vector<Triple> triples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto t1 = line.find('\t');
        auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        auto t3 = t2 == std::string::npos ? std::string::npos : line.find('\t', t2 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos || t3 != std::string::npos)
            throw std::runtime_error(std::string(origin) + ":" + std::to_string(line_no) +
                                     ": expected 3 tab-separated fields");
        std::string_view s(line.data(), t1);
        std::string_view r(line.data() + t1 + 1, t2 - t1 - 1);
        std::string_view o(line.data() + t2 + 1, line.size() - t2 - 1);
        if (s.empty() || r.empty() || o.empty())
            throw std::runtime_error(std::string(origin) + ":" + std::to_string(line_no) +
                                     ": empty field");
        triples.push_back({dicts.entities.intern(s), dicts.relations.intern(r),
                           dicts.entities.intern(o)});
    }
    return triples;
}

std::vector<Triple> read_triples_file(const std::string& path, Dictionaries& dicts) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_triples(in, path, dicts);
}

KnowledgeGraph load_graph(const std::string& path,
                          const std::shared_ptr<Dictionaries>& dicts) {
    return KnowledgeGraph(read_triples_file(path, *dicts), dicts);
}

void write_triples(std::ostream& out, const KnowledgeGraph& kg) {
    const Dictionaries& d = *kg.dicts();
    for (const Triple& t : kg.triples())
        out << d.entities.name(t.subject) << '\t' << d.relations.name(t.relation) << '\t'
            << d.entities.name(t.object) << '\n';
}

void write_triples_file(const std::string& path, const KnowledgeGraph& kg) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_triples(out, kg);
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace kgrule
