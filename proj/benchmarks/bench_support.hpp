#pragma once

// Synthetic graph used by the benchmarks: a layered random graph with a
// handful of relations, dense enough that walks and joins do real work.

#include <memory>
#include <string>
#include <vector>

#include <kgrule/graph.hpp>
#include <kgrule/random.hpp>

namespace kgbench {

struct BenchGraph {
    std::shared_ptr<kgrule::Dictionaries> dicts;
    std::unique_ptr<kgrule::KnowledgeGraph> kg;
};

inline BenchGraph synthetic_graph(int entities, int relations, int triples,
                                  std::uint64_t seed = 42) {
    auto dicts = std::make_shared<kgrule::Dictionaries>();
    for (int i = 0; i < entities; ++i)
        dicts->entities.intern("e" + std::to_string(i));
    for (int i = 0; i < relations; ++i)
        dicts->relations.intern("r" + std::to_string(i));

    kgrule::Rng rng(seed);
    std::vector<kgrule::Triple> ts;
    ts.reserve(static_cast<std::size_t>(triples));
    for (int i = 0; i < triples; ++i) {
        const auto s = static_cast<kgrule::EntityId>(
            kgrule::uniform_below(rng, static_cast<std::uint64_t>(entities)));
        const auto r = static_cast<kgrule::RelationId>(
            kgrule::uniform_below(rng, static_cast<std::uint64_t>(relations)));
        const auto o = static_cast<kgrule::EntityId>(
            kgrule::uniform_below(rng, static_cast<std::uint64_t>(entities)));
        ts.push_back({s, r, o});
    }
    BenchGraph g;
    g.dicts = dicts;
    g.kg = std::make_unique<kgrule::KnowledgeGraph>(std::move(ts), dicts);
    return g;
}

}  // namespace kgbench
