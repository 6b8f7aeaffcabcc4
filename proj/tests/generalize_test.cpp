#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include <kgrule/generalize.hpp>
#include <kgrule/path_sampler.hpp>

#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using namespace kgrule;
using kgtest::alpha_canonical;
using kgtest::lattice_survivors;
using kgtest::make_graph;
using kgtest::make_rule;

namespace {

// Builds a Path by hand; steps are given as (relation, from, to, reversed).
Path make_path(const Triple& head, bool from_subject,
               const std::vector<PathStep>& steps, bool cyclic) {
    return Path{head, from_subject, steps, cyclic};
}

std::set<std::string> canonical_set(const std::vector<Rule>& rules) {
    std::set<std::string> keys;
    for (const Rule& r : rules) keys.insert(alpha_canonical(r));
    return keys;
}

}  // namespace

TEST(BottomRule, ReadsAtomsOffThePathInWalkOrder) {
    const auto g = kgtest::language_graph();
    const auto& e = g.dicts->entities;
    const auto& r = g.dicts->relations;
    const auto ed = *e.find("ed"), d = *e.find("d"), lisa = *e.find("lisa"),
               a = *e.find("a");
    const auto speaks = *r.find("speaks"), married = *r.find("married"),
               born = *r.find("born");

    const Path green = make_path({ed, speaks, d}, true,
                                 {{married, ed, lisa, false}, {born, lisa, a, false}},
                                 false);
    const Rule bottom = bottom_rule(green);
    EXPECT_EQ(bottom.kind, RuleKind::ground);
    EXPECT_EQ(bottom.head, (Atom{speaks, Term::constant(ed), Term::constant(d)}));
    ASSERT_EQ(bottom.body.size(), 2u);
    EXPECT_EQ(bottom.body[0], (Atom{married, Term::constant(ed), Term::constant(lisa)}));
    EXPECT_EQ(bottom.body[1], (Atom{born, Term::constant(lisa), Term::constant(a)}));
}

TEST(BottomRule, ReversedStepsFlipAtomArguments) {
    const auto g = make_graph({"x h y", "z p x"});
    const auto& e = g.dicts->entities;
    const auto& r = g.dicts->relations;
    // Walk from x against the direction of p(z, x).
    const Path path = make_path({*e.find("x"), *r.find("h"), *e.find("y")}, true,
                                {{*r.find("p"), *e.find("x"), *e.find("z"), true}},
                                false);
    const Rule bottom = bottom_rule(path);
    ASSERT_EQ(bottom.body.size(), 1u);
    EXPECT_EQ(bottom.body[0], (Atom{*r.find("p"), Term::constant(*e.find("z")),
                                    Term::constant(*e.find("x"))}));
}

TEST(Generalize, AcyclicLengthTwoGivesUcAndUd) {
    auto dicts = Dictionaries{};
    const Rule ground = kgtest::make_ground(dicts, "s(ed,d) <= m(ed,lisa), b(lisa,a)");

    const auto rules = generalize(ground, false);
    ASSERT_EQ(rules.size(), 2u);

    const Rule uc = make_rule(dicts, "s(X,d) <= m(X,A), b(A,a)");
    const Rule ud = make_rule(dicts, "s(X,d) <= m(X,A), b(A,B)");
    EXPECT_EQ(canonical_set(rules),
              (std::set<std::string>{alpha_canonical(uc), alpha_canonical(ud)}));

    const auto kinds = std::set<RuleKind>{rules[0].kind, rules[1].kind};
    EXPECT_EQ(kinds,
              (std::set<RuleKind>{RuleKind::unary_constant, RuleKind::unary_dangling}));
}

TEST(Generalize, AcyclicLengthOneGivesUcAndUd) {
    auto dicts = Dictionaries{};
    const Rule ground = kgtest::make_ground(dicts, "s(ed,d) <= b(ed,a)");

    const auto rules = generalize(ground, false);
    ASSERT_EQ(rules.size(), 2u);
    const Rule uc = make_rule(dicts, "s(X,d) <= b(X,a)");
    const Rule ud = make_rule(dicts, "s(X,d) <= b(X,A)");
    EXPECT_EQ(canonical_set(rules),
              (std::set<std::string>{alpha_canonical(uc), alpha_canonical(ud)}));
}

TEST(Generalize, CyclicGivesOneBinaryAndTwoUnaryConstant) {
    auto dicts = Dictionaries{};
    const Rule ground =
        kgtest::make_ground(dicts, "s(ed,d) <= lives(ed,nl), lang(nl,d)");

    const auto rules = generalize(ground, true);
    ASSERT_EQ(rules.size(), 3u);

    const Rule binary = make_rule(dicts, "s(X,Y) <= lives(X,A), lang(A,Y)");
    const Rule uc_object = make_rule(dicts, "s(X,d) <= lives(X,A), lang(A,d)");
    const Rule uc_subject = make_rule(dicts, "s(ed,Y) <= lang(A,Y), lives(ed,A)");
    EXPECT_EQ(canonical_set(rules),
              (std::set<std::string>{alpha_canonical(binary),
                                     alpha_canonical(uc_object),
                                     alpha_canonical(uc_subject)}));

    int binaries = 0, unary_constants = 0;
    for (const Rule& r : rules) {
        binaries += r.kind == RuleKind::binary;
        unary_constants += r.kind == RuleKind::unary_constant;
    }
    EXPECT_EQ(binaries, 1);
    EXPECT_EQ(unary_constants, 2);
}

TEST(Generalize, CyclicLengthOneKeepsBothHeadSides) {
    auto dicts = Dictionaries{};
    const Rule ground = kgtest::make_ground(dicts, "s(ed,d) <= r(ed,d)");

    const auto rules = generalize(ground, true);
    ASSERT_EQ(rules.size(), 3u);
    const Rule b = make_rule(dicts, "s(X,Y) <= r(X,Y)");
    const Rule uc1 = make_rule(dicts, "s(X,d) <= r(X,d)");
    const Rule uc2 = make_rule(dicts, "s(ed,Y) <= r(ed,Y)");
    EXPECT_EQ(canonical_set(rules),
              (std::set<std::string>{alpha_canonical(b), alpha_canonical(uc1),
                                     alpha_canonical(uc2)}));
}

TEST(Generalize, EveryOutputClassifies) {
    auto dicts = Dictionaries{};
    const Rule ground = kgtest::make_ground(
        dicts, "s(e0,e9) <= r1(e0,e1), r2(e2,e1), r3(e2,e3)");
    for (const Rule& r : generalize(ground, false)) {
        EXPECT_NO_THROW(classify(r.head, r.body));
        EXPECT_EQ(classify(r.head, r.body), r.kind);
    }
}

TEST(Generalize, MatchesLatticeOracleOnFixedExamples) {
    auto dicts = Dictionaries{};
    for (const char* text : {
             "s(ed,d) <= m(ed,lisa), b(lisa,a)",
             "s(ed,d) <= b(ed,a)",
             "s(ed,d) <= m(ed,lisa), b(lisa,q), c(q,w)",
         }) {
        const Rule ground = kgtest::make_ground(dicts, text);
        EXPECT_EQ(canonical_set(generalize(ground, false)), lattice_survivors(ground))
            << text;
    }
    for (const char* text : {
             "s(ed,d) <= lives(ed,nl), lang(nl,d)",
             "s(ed,d) <= r(ed,d)",
             "s(ed,d) <= r1(ed,k1), r2(k1,k2), r3(k2,d)",
         }) {
        const Rule ground = kgtest::make_ground(dicts, text);
        EXPECT_EQ(canonical_set(generalize(ground, true)), lattice_survivors(ground))
            << text;
    }
}

TEST(Generalize, MatchesLatticeOracleOnSampledPaths) {
    // Random graphs, real sampled paths; the lattice oracle must agree with
    // the direct construction on every bottom rule.
    Rng gen(31);
    int checked = 0;
    for (int round = 0; round < 12 && checked < 120; ++round) {
        std::vector<std::string> triples;
        const int entities = 10 + static_cast<int>(uniform_below(gen, 8));
        const int relations = 2 + static_cast<int>(uniform_below(gen, 3));
        const int count = 40 + static_cast<int>(uniform_below(gen, 40));
        for (int i = 0; i < count; ++i) {
            triples.push_back("e" + std::to_string(uniform_below(gen, entities)) +
                              " r" + std::to_string(uniform_below(gen, relations)) +
                              " e" + std::to_string(uniform_below(gen, entities)));
        }
        const auto g = make_graph(triples);
        Rng rng(round + 1);
        for (int len = 1; len <= 3; ++len) {
            for (bool cyclic : {false, true}) {
                for (int i = 0; i < 30; ++i) {
                    const auto path = sample_path(
                        g.graph(), static_cast<RelationId>(uniform_below(rng, relations)),
                        PathProfile{len, cyclic}, rng);
                    if (!path) continue;
                    const Rule bottom = bottom_rule(*path);
                    EXPECT_EQ(canonical_set(generalize(bottom, cyclic)),
                              lattice_survivors(bottom));
                    ++checked;
                }
            }
        }
    }
    EXPECT_GE(checked, 120);
}
