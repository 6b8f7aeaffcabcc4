#include "support/fixtures.hpp"

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kgtest {

using namespace kgrule;

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

bool is_variable_token(const std::string& tok) {
    return tok.size() == 1 && tok[0] >= 'A' && tok[0] <= 'Z';
}

}  // namespace

TestGraph make_graph(const std::vector<std::string>& triples) {
    TestGraph g;
    g.dicts = std::make_shared<Dictionaries>();
    g.kg = make_graph_with(triples, g.dicts);
    return g;
}

std::unique_ptr<KnowledgeGraph> make_graph_with(
    const std::vector<std::string>& triples,
    const std::shared_ptr<Dictionaries>& dicts) {
    std::vector<Triple> parsed;
    parsed.reserve(triples.size());
    for (const std::string& line : triples) {
        const auto parts = split_ws(line);
        if (parts.size() != 3)
            throw std::invalid_argument("fixture triple needs 3 tokens: " + line);
        parsed.push_back(Triple{dicts->entities.intern(parts[0]),
                                dicts->relations.intern(parts[1]),
                                dicts->entities.intern(parts[2])});
    }
    return std::make_unique<KnowledgeGraph>(std::move(parsed), dicts);
}

TestGraph language_graph() {
    return make_graph({
        "ed speaks d",
        "ed married lisa",
        "lisa born a",
        "ed born a",
        "ed lives nl",
        "nl lang d",
    });
}

Rule make_rule(Dictionaries& dicts, const std::string& text) {
    // Pre-intern every identifier so parse_rule's lookups succeed.
    std::string name;
    bool in_relation_position = true;  // next identifier ends at '('
    for (std::size_t i = 0; i <= text.size(); ++i) {
        const char c = i < text.size() ? text[i] : '\0';
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
            c == '-' || c == '\'') {
            name.push_back(c);
            continue;
        }
        if (!name.empty()) {
            if (c == '(') {
                dicts.relations.intern(name);
                in_relation_position = false;
            } else if (!is_variable_token(name) && !in_relation_position) {
                dicts.entities.intern(name);
            }
            name.clear();
        }
        if (c == ')') in_relation_position = true;
    }
    return parse_rule("0\t0\t0.0\t" + text, "fixture", dicts).rule;
}

namespace {

std::string strip(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    std::size_t e = s.find_last_not_of(" \t");
    if (b == std::string::npos) return {};
    return s.substr(b, e - b + 1);
}

Atom parse_ground_atom(Dictionaries& dicts, const std::string& text) {
    const std::size_t open = text.find('(');
    const std::size_t comma = text.find(',', open);
    const std::size_t close = text.rfind(')');
    if (open == std::string::npos || comma == std::string::npos ||
        close == std::string::npos)
        throw std::invalid_argument("fixture atom is malformed: " + text);
    const auto relation = dicts.relations.intern(strip(text.substr(0, open)));
    const auto lhs = dicts.entities.intern(strip(text.substr(open + 1, comma - open - 1)));
    const auto rhs = dicts.entities.intern(strip(text.substr(comma + 1, close - comma - 1)));
    return Atom{relation, Term::constant(lhs), Term::constant(rhs)};
}

}  // namespace

Rule make_ground(Dictionaries& dicts, const std::string& text) {
    const std::size_t arrow = text.find("<=");
    if (arrow == std::string::npos)
        throw std::invalid_argument("fixture rule needs '<=': " + text);
    Rule rule{parse_ground_atom(dicts, strip(text.substr(0, arrow))), {},
              RuleKind::ground};
    std::string rest = text.substr(arrow + 2);
    std::size_t pos = 0;
    while (pos < rest.size()) {
        const std::size_t close = rest.find(')', pos);
        if (close == std::string::npos) break;
        std::size_t begin = rest.find_first_not_of(" \t,", pos);
        rule.body.push_back(
            parse_ground_atom(dicts, rest.substr(begin, close - begin + 1)));
        pos = close + 1;
    }
    if (rule.body.empty())
        throw std::invalid_argument("fixture rule has an empty body: " + text);
    return rule;
}

std::string write_temp_file(const std::string& name,
                            const std::vector<std::string>& lines) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "kgrule-tests";
    fs::create_directories(dir);
    const fs::path path = dir / name;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot create " + path.string());
    for (const std::string& line : lines) out << line << '\n';
    return path.string();
}

}  // namespace kgtest
