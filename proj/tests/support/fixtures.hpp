#pragma once

// Shared test helpers: tiny graph builders and a rule parser that interns
// unseen names on the fly so fixtures stay one-liners.

#include <memory>
#include <string>
#include <vector>

#include <kgrule/graph.hpp>
#include <kgrule/rule.hpp>

namespace kgtest {

struct TestGraph {
    std::shared_ptr<kgrule::Dictionaries> dicts;
    std::unique_ptr<kgrule::KnowledgeGraph> kg;

    const kgrule::KnowledgeGraph& graph() const { return *kg; }
};

// Each element is one triple written "subject relation object".
TestGraph make_graph(const std::vector<std::string>& triples);

// Same, but reusing an existing dictionary set (e.g. to add a test split).
std::unique_ptr<kgrule::KnowledgeGraph> make_graph_with(
    const std::vector<std::string>& triples,
    const std::shared_ptr<kgrule::Dictionaries>& dicts);

// The six-triple language example used across the tests:
//   speaks(ed,d) married(ed,lisa) born(lisa,a) born(ed,a) lives(ed,nl) lang(nl,d)
TestGraph language_graph();

// Parses "speaks(X,Y) <= lives(X,A), lang(A,Y)", interning any unseen
// relation or constant names first. Single capital letters are variables.
kgrule::Rule make_rule(kgrule::Dictionaries& dicts, const std::string& text);

// Parses a fully ground rule like "s(ed,d) <= lives(ed,nl), lang(nl,d)".
// Every argument is treated as an entity, and the result has kind ground.
kgrule::Rule make_ground(kgrule::Dictionaries& dicts, const std::string& text);

// Writes lines to a fresh file under the test temp dir and returns its path.
std::string write_temp_file(const std::string& name,
                            const std::vector<std::string>& lines);

}  // namespace kgtest
