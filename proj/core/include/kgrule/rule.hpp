#pragma once

// Horn rules over binary predicates: a head atom and a body that is a chain
// of atoms produced by generalizing a sampled path. Three shapes exist:
//
//   binary          h(X, Y)  <= chain of all-variable atoms linking X to Y
//   unary_constant  h(X, c)  <= all-variable chain whose last atom carries
//                               one constant
//   unary_dangling  h(X, c)  <= all-variable chain ending in a variable that
//                               occurs nowhere else
//
// Object identity is implicit on every rule: all distinct variables are
// pairwise unequal and no variable may bind to a constant appearing in the
// rule. It is never serialized.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "kgrule/graph.hpp"

namespace kgrule {

// `ground` is the bottom rule read off a sampled path before generalization;
// it never reaches scoring or serialization.
enum class RuleKind { binary, unary_constant, unary_dangling, ground };

// A variable (small index) or an entity constant.
class Term {
public:
    static Term var(int index) { return Term(-index - 1); }
    static Term constant(EntityId e) { return Term(e); }

    bool is_variable() const { return value_ < 0; }
    bool is_constant() const { return value_ >= 0; }
    int var_index() const { return -value_ - 1; }
    EntityId entity() const { return value_; }

    bool operator==(const Term&) const = default;

private:
    explicit Term(std::int32_t v) : value_(v) {}
    std::int32_t value_;
};

struct Atom {
    RelationId relation;
    Term lhs;
    Term rhs;

    bool operator==(const Atom&) const = default;
    bool contains(const Term& t) const { return lhs == t || rhs == t; }
};

struct Rule {
    Atom head;
    std::vector<Atom> body;
    RuleKind kind;

    int length() const { return static_cast<int>(body.size()); }
    bool operator==(const Rule&) const = default;

    // Entity constants appearing anywhere in the rule, deduplicated.
    std::vector<EntityId> constants() const;
    int variable_count() const;
};

struct RuleStats {
    std::uint64_t support = 0;
    std::uint64_t body_groundings = 0;
    double confidence = 0.0;
};

// Laplace-smoothed confidence: support / (body_groundings + pseudo_count).
double smoothed_confidence(std::uint64_t support, std::uint64_t body_groundings,
                           int pseudo_count);

bool passes_thresholds(const RuleStats& stats, std::uint64_t min_support,
                       double min_confidence);

// Determines the rule kind, enforcing the chain shape shared by all three:
// the first body atom contains a head variable, consecutive atoms share a
// variable, and every variable links adjacent atoms only. Throws
// std::invalid_argument for anything that fits no shape.
RuleKind classify(const Atom& head, const std::vector<Atom>& body);

Rule make_rule(Atom head, std::vector<Atom> body);

// The term chain t0..tn the body traverses: t0 is a head variable contained
// in the first atom, atom i links t_{i-1} to t_i, and for binary rules tn is
// the other head variable. Throws std::invalid_argument on non-chain bodies.
std::vector<Term> body_chain(const Atom& head, const std::vector<Atom>& body);
inline std::vector<Term> body_chain(const Rule& rule) {
    return body_chain(rule.head, rule.body);
}

// Alpha-renaming-invariant identity: rules equal up to consistent variable
// renaming share a key, everything else does not.
std::string canonical_key(const Rule& rule);

// --- text format ----------------------------------------------------------
//
//   support <TAB> body_groundings <TAB> confidence <TAB> head <= atom, atom
//
// Confidence with 4 decimal places. Variables render as X and Y in the head
// positions and A, B, C, ... for the rest in order of first appearance; any
// single capital letter is read back as a variable.

std::string format_atom(const Atom& atom, const Dictionaries& dicts,
                        const std::vector<std::string>& var_names);
std::string format_rule(const Rule& rule, const RuleStats& stats,
                        const Dictionaries& dicts);

struct ParsedRule {
    Rule rule;
    RuleStats stats;
};

// Parses one rule line. Entities and relations must already be present in
// the dictionaries (rules reference the graph they were learned on); unknown
// names or malformed syntax raise std::runtime_error mentioning `origin`.
ParsedRule parse_rule(std::string_view line, std::string_view origin,
                      const Dictionaries& dicts);

// One rule per nonempty line, `#` lines are comments.
std::vector<ParsedRule> read_rules(std::istream& in, std::string_view origin,
                                   const Dictionaries& dicts);
std::vector<ParsedRule> read_rules_file(const std::string& path,
                                        const Dictionaries& dicts);

// Display names for the rule's variables, indexed by variable index:
// head variables get X/Y by position, the rest A, B, C ... in order of first
// appearance scanning head then body, left to right.
std::vector<std::string> variable_names(const Rule& rule);

}  // namespace kgrule
