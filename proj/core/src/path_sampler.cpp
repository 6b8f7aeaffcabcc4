#include "kgrule/path_sampler.hpp"

#include <algorithm>
#include <stdexcept>

namespace kgrule {

bool is_straight(const Path& path) {
    std::vector<EntityId> seq;
    seq.reserve(path.walk.size() + 2);
    seq.push_back(path.other_end());
    seq.push_back(path.walk_start());
    for (const PathStep& step : path.walk) {
        if (step.from != seq.back()) return false;  // disconnected walk
        seq.push_back(step.to);
    }
    const bool closed = seq.front() == seq.back();
    if (path.cyclic != closed) return false;
    for (std::size_t i = 0; i < seq.size(); ++i)
        for (std::size_t j = i + 1; j < seq.size(); ++j) {
            if (i == 0 && j + 1 == seq.size()) continue;  // cyclic endpoints may meet
            if (seq[i] == seq[j]) return false;
        }
    return true;
}

std::optional<Path> sample_path(const KnowledgeGraph& kg, RelationId relation,
                                const PathProfile& profile, Rng& rng,
                                int max_attempts) {
    if (profile.length < 1) throw std::invalid_argument("path profile length must be >= 1");
    auto heads = kg.relation_triples(relation);
    if (heads.empty()) return std::nullopt;

    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        const Triple& head = heads[uniform_below(rng, heads.size())];
        const bool from_subject = (rng() & 1) == 0;
        const EntityId start = from_subject ? head.subject : head.object;
        const EntityId other = from_subject ? head.object : head.subject;
        if (start == other) continue;  // a self-loop head cannot yield a straight path

        Path path{head, from_subject, {}, profile.cyclic};
        path.walk.reserve(std::size_t(profile.length));
        std::vector<EntityId> visited{other, start};
        EntityId cur = start;
        const int free_steps = profile.cyclic ? profile.length - 1 : profile.length;
        bool ok = true;
        for (int i = 0; i < free_steps; ++i) {
            auto outs = kg.outgoing(cur);
            auto ins = kg.incoming(cur);
            const std::size_t degree = outs.size() + ins.size();
            if (degree == 0) {
                ok = false;
                break;
            }
            const std::size_t pick = uniform_below(rng, degree);
            const Edge& e = pick < outs.size() ? outs[pick] : ins[pick - outs.size()];
            if (std::find(visited.begin(), visited.end(), e.other) != visited.end()) {
                ok = false;  // entity revisited: void the attempt
                break;
            }
            path.walk.push_back({e.relation, cur, e.other, e.reversed});
            visited.push_back(e.other);
            cur = e.other;
        }
        if (!ok) continue;

        if (profile.cyclic) {
            // Close the cycle through any triple linking the walk end back to
            // the far end of the head triple -- except the head triple itself.
            auto closers = kg.connecting_relations(cur, other);
            std::erase_if(closers, [&](const PairRelation& pr) {
                Triple t = pr.forward ? Triple{cur, pr.relation, other}
                                      : Triple{other, pr.relation, cur};
                return t == head;
            });
            if (closers.empty()) continue;
            const PairRelation& pick = closers[uniform_below(rng, closers.size())];
            path.walk.push_back({pick.relation, cur, other, !pick.forward});
        }
        return path;
    }
    return std::nullopt;
}

}  // namespace kgrule
