#include "kgrule/generalize.hpp"

#include <algorithm>
#include <stdexcept>

namespace kgrule {

namespace {

// Entity -> variable assignment used while lifting one bottom rule.
struct VarMap {
    std::vector<std::pair<EntityId, int>> vars;

    void assign(EntityId e) { vars.emplace_back(e, int(vars.size())); }
    Term map(EntityId e) const {
        for (const auto& [entity, index] : vars)
            if (entity == e) return Term::var(index);
        return Term::constant(e);
    }
    Atom map_atom(const Atom& a) const {
        return Atom{a.relation, map(a.lhs.entity()), map(a.rhs.entity())};
    }
};

// The entity chain e0..en walked by a bottom rule's body, starting at the
// head entity found in the first atom (the head subject when both appear).
std::vector<EntityId> entity_chain(const Rule& bottom) {
    const EntityId hs = bottom.head.lhs.entity();
    const EntityId ho = bottom.head.rhs.entity();
    const Atom& first = bottom.body.front();
    EntityId e0;
    if (first.contains(Term::constant(hs)))
        e0 = hs;
    else if (first.contains(Term::constant(ho)))
        e0 = ho;
    else
        throw std::invalid_argument("bottom rule body does not touch the head triple");

    std::vector<EntityId> chain{e0};
    for (const Atom& atom : bottom.body) {
        const EntityId a = atom.lhs.entity(), b = atom.rhs.entity();
        if (a == chain.back() && b != chain.back())
            chain.push_back(b);
        else if (b == chain.back() && a != chain.back())
            chain.push_back(a);
        else
            throw std::invalid_argument("bottom rule body is not a connected chain");
    }
    return chain;
}

}  // namespace

Rule bottom_rule(const Path& path) {
    Rule rule{Atom{path.head.relation, Term::constant(path.head.subject),
                   Term::constant(path.head.object)},
              {},
              RuleKind::ground};
    rule.body.reserve(path.walk.size());
    for (const PathStep& step : path.walk) {
        const Triple t = step.triple();
        rule.body.push_back(
            Atom{t.relation, Term::constant(t.subject), Term::constant(t.object)});
    }
    return rule;
}

std::vector<Rule> generalize(const Rule& bottom, bool cyclic) {
    if (bottom.body.empty()) throw std::invalid_argument("bottom rule has an empty body");
    const EntityId hs = bottom.head.lhs.entity();
    const EntityId ho = bottom.head.rhs.entity();
    const std::vector<EntityId> chain = entity_chain(bottom);
    const std::size_t n = bottom.body.size();

    std::vector<Rule> out;

    if (cyclic) {
        if (chain.back() != (chain.front() == hs ? ho : hs))
            throw std::invalid_argument("cyclic bottom rule does not close the cycle");

        // Binary: every chain entity becomes a variable; body in walk order
        // already starts with a head variable.
        {
            VarMap vm;
            vm.assign(hs);
            vm.assign(ho);
            for (std::size_t i = 1; i + 1 < chain.size(); ++i) vm.assign(chain[i]);
            Atom head{bottom.head.relation, vm.map(hs), vm.map(ho)};
            std::vector<Atom> body;
            for (const Atom& a : bottom.body) body.push_back(vm.map_atom(a));
            out.push_back(make_rule(head, std::move(body)));
        }

        // Unary with constant: keep one head entity fixed, lift the rest. The
        // body is ordered so the atom holding the surviving variable comes
        // first, which means reversing the walk when the kept constant sits
        // at the walk's start.
        for (EntityId kept : {ho, hs}) {
            const EntityId lifted = kept == ho ? hs : ho;
            VarMap vm;
            vm.assign(lifted);
            std::vector<Atom> body;
            if (chain.front() == lifted) {
                for (std::size_t i = 1; i + 1 < chain.size(); ++i) vm.assign(chain[i]);
                for (const Atom& a : bottom.body) body.push_back(vm.map_atom(a));
            } else {
                for (std::size_t i = chain.size() - 2; i >= 1; --i) vm.assign(chain[i]);
                for (auto it = bottom.body.rbegin(); it != bottom.body.rend(); ++it)
                    body.push_back(vm.map_atom(*it));
            }
            Atom head{bottom.head.relation,
                      kept == hs ? Term::constant(hs) : vm.map(hs),
                      kept == ho ? Term::constant(ho) : vm.map(ho)};
            out.push_back(make_rule(head, std::move(body)));
        }
        return out;
    }

    // Acyclic: the walk-start head entity becomes the head variable, the
    // other head entity stays constant, interior entities become variables.
    const EntityId e0 = chain.front();
    for (bool dangling : {false, true}) {
        VarMap vm;
        vm.assign(e0);
        for (std::size_t i = 1; i + 1 < chain.size(); ++i) vm.assign(chain[i]);
        if (dangling) vm.assign(chain.back());
        Atom head{bottom.head.relation,
                  e0 == hs ? vm.map(hs) : Term::constant(hs),
                  e0 == ho ? vm.map(ho) : Term::constant(ho)};
        std::vector<Atom> body;
        for (const Atom& a : bottom.body) body.push_back(vm.map_atom(a));
        out.push_back(make_rule(head, std::move(body)));
    }
    return out;
}

}  // namespace kgrule
