#pragma once

// Turns sampled paths into candidate rules. A path first becomes its bottom
// rule (head triple and walk triples, all constants); generalization then
// lifts entities to variables directly, skipping the intermediate lattice:
//
//   acyclic path  ->  unary_constant (walk end stays constant)
//                     unary_dangling (walk end becomes a one-off variable)
//   cyclic path   ->  binary (everything becomes a variable)
//                     unary_constant twice, one per head entity kept constant
//
// Every other node of the generalization lattice is either subsumed by a
// shorter bottom rule, predicts through a head variable missing from the
// body, carries an atom that adds no constraint, or severs the body chain.
// The emitted rules all keep a head variable in the first body atom, with the
// body reversed where needed to make that hold.

#include <vector>

#include "kgrule/path_sampler.hpp"
#include "kgrule/rule.hpp"

namespace kgrule {

Rule bottom_rule(const Path& path);

std::vector<Rule> generalize(const Rule& bottom, bool cyclic);

inline std::vector<Rule> generalize(const Path& path) {
    return generalize(bottom_rule(path), path.cyclic);
}

}  // namespace kgrule
