#include "kgrule/rule.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace kgrule {

namespace {

// Walks the body as a chain t0 -> t1 -> ... -> tn starting from `start`
// (a head variable). Fills `chain` on success; atoms may be traversed in
// either orientation but each must connect the running endpoint to a fresh
// term.
bool walk_chain(const Term& start, const std::vector<Atom>& body,
                std::vector<Term>& chain) {
    chain.clear();
    chain.push_back(start);
    Term cur = start;
    for (const Atom& atom : body) {
        Term next = atom.lhs;
        if (atom.lhs == cur && !(atom.rhs == cur))
            next = atom.rhs;
        else if (atom.rhs == cur && !(atom.lhs == cur))
            next = atom.lhs;
        else
            return false;
        if (std::find(chain.begin(), chain.end(), next) != chain.end()) return false;
        chain.push_back(next);
        cur = next;
    }
    return true;
}

void append_term(std::string& out, const Term& t, std::vector<int>& var_map) {
    if (t.is_constant()) {
        out += 'c';
        out += std::to_string(t.entity());
        return;
    }
    int idx = t.var_index();
    if (std::size_t(idx) >= var_map.size()) var_map.resize(std::size_t(idx) + 1, -1);
    if (var_map[std::size_t(idx)] < 0) {
        int next = 0;
        for (int v : var_map) next = std::max(next, v + 1);
        var_map[std::size_t(idx)] = next;
    }
    out += 'v';
    out += std::to_string(var_map[std::size_t(idx)]);
}

}  // namespace

std::vector<EntityId> Rule::constants() const {
    std::vector<EntityId> out;
    auto add = [&](const Term& t) {
        if (t.is_constant() &&
            std::find(out.begin(), out.end(), t.entity()) == out.end())
            out.push_back(t.entity());
    };
    add(head.lhs);
    add(head.rhs);
    for (const Atom& a : body) {
        add(a.lhs);
        add(a.rhs);
    }
    return out;
}

int Rule::variable_count() const {
    std::vector<int> seen;
    auto add = [&](const Term& t) {
        if (t.is_variable() &&
            std::find(seen.begin(), seen.end(), t.var_index()) == seen.end())
            seen.push_back(t.var_index());
    };
    add(head.lhs);
    add(head.rhs);
    for (const Atom& a : body) {
        add(a.lhs);
        add(a.rhs);
    }
    return static_cast<int>(seen.size());
}

double smoothed_confidence(std::uint64_t support, std::uint64_t body_groundings,
                           int pseudo_count) {
    double denom = double(body_groundings) + double(pseudo_count);
    if (denom <= 0.0) return 0.0;
    return double(support) / denom;
}

bool passes_thresholds(const RuleStats& stats, std::uint64_t min_support,
                       double min_confidence) {
    return stats.support >= min_support && stats.confidence > min_confidence;
}

std::vector<Term> body_chain(const Atom& head, const std::vector<Atom>& body) {
    if (body.empty()) throw std::invalid_argument("rule has an empty body");

    const bool lhs_var = head.lhs.is_variable();
    const bool rhs_var = head.rhs.is_variable();
    std::vector<Term> chain;

    if (lhs_var && rhs_var) {
        for (const Term& start : {head.lhs, head.rhs}) {
            if (!walk_chain(start, body, chain)) continue;
            if (chain.back() == (start == head.lhs ? head.rhs : head.lhs)) return chain;
        }
        throw std::invalid_argument("body is not a chain linking the two head variables");
    }
    if (!lhs_var && !rhs_var)
        throw std::invalid_argument("head needs at least one variable");

    const Term& head_var = lhs_var ? head.lhs : head.rhs;
    if (!walk_chain(head_var, body, chain))
        throw std::invalid_argument("body is not a chain starting at the head variable");
    return chain;
}

RuleKind classify(const Atom& head, const std::vector<Atom>& body) {
    if (head.lhs.is_variable() && head.rhs.is_variable() && head.lhs == head.rhs)
        throw std::invalid_argument("head uses the same variable twice");

    std::vector<Term> chain = body_chain(head, body);
    for (std::size_t i = 1; i + 1 < chain.size(); ++i)
        if (chain[i].is_constant())
            throw std::invalid_argument("constant in the middle of the body chain");

    if (head.lhs.is_variable() && head.rhs.is_variable()) {
        if (chain.front().is_constant())
            throw std::invalid_argument("two-variable head over a body with constants");
        return RuleKind::binary;
    }
    return chain.back().is_constant() ? RuleKind::unary_constant : RuleKind::unary_dangling;
}

Rule make_rule(Atom head, std::vector<Atom> body) {
    RuleKind kind = classify(head, body);
    return Rule{head, std::move(body), kind};
}

std::string canonical_key(const Rule& rule) {
    std::string key;
    key.reserve(16 + rule.body.size() * 12);
    std::vector<int> var_map;
    auto append_atom = [&](const Atom& a) {
        key += std::to_string(a.relation);
        key += '(';
        append_term(key, a.lhs, var_map);
        key += ',';
        append_term(key, a.rhs, var_map);
        key += ')';
    };
    append_atom(rule.head);
    for (const Atom& a : rule.body) {
        key += '|';
        append_atom(a);
    }
    return key;
}

std::vector<std::string> variable_names(const Rule& rule) {
    int count = 0;
    auto scan_max = [&](const Term& t) {
        if (t.is_variable()) count = std::max(count, t.var_index() + 1);
    };
    scan_max(rule.head.lhs);
    scan_max(rule.head.rhs);
    for (const Atom& a : rule.body) {
        scan_max(a.lhs);
        scan_max(a.rhs);
    }
    const auto slot_count = static_cast<std::size_t>(count);
    std::vector<std::string> names(slot_count);
    if (rule.head.lhs.is_variable()) names[std::size_t(rule.head.lhs.var_index())] = "X";
    if (rule.head.rhs.is_variable()) names[std::size_t(rule.head.rhs.var_index())] = "Y";
    char next = 'A';
    auto assign = [&](const Term& t) {
        if (!t.is_variable()) return;
        std::string& slot = names[std::size_t(t.var_index())];
        if (!slot.empty()) return;
        while (next == 'X' || next == 'Y') ++next;
        if (next > 'Z') throw std::runtime_error("rule has too many variables to render");
        slot = std::string(1, next++);
    };
    for (const Atom& a : rule.body) {
        assign(a.lhs);
        assign(a.rhs);
    }
    return names;
}

std::string format_atom(const Atom& atom, const Dictionaries& dicts,
                        const std::vector<std::string>& var_names) {
    auto term_str = [&](const Term& t) -> std::string {
        if (t.is_constant()) return dicts.entities.name(t.entity());
        return var_names.at(std::size_t(t.var_index()));
    };
    return dicts.relations.name(atom.relation) + "(" + term_str(atom.lhs) + ", " +
           term_str(atom.rhs) + ")";
}

std::string format_rule(const Rule& rule, const RuleStats& stats,
                        const Dictionaries& dicts) {
    auto names = variable_names(rule);
    char conf[32];
    std::snprintf(conf, sizeof conf, "%.4f", stats.confidence);
    std::string out = std::to_string(stats.support) + "\t" +
                      std::to_string(stats.body_groundings) + "\t" + conf + "\t" +
                      format_atom(rule.head, dicts, names) + " <= ";
    for (std::size_t i = 0; i < rule.body.size(); ++i) {
        if (i) out += ", ";
        out += format_atom(rule.body[i], dicts, names);
    }
    return out;
}

namespace {

struct RuleParser {
    std::string_view text;
    std::size_t pos = 0;
    std::string_view origin;
    const Dictionaries& dicts;
    std::vector<std::string> var_names;  // index = variable index

    [[noreturn]] void fail(const std::string& msg) const {
        throw std::runtime_error(std::string(origin) + ": " + msg);
    }
    void skip_spaces() {
        while (pos < text.size() && text[pos] == ' ') ++pos;
    }
    bool eat(std::string_view token) {
        if (text.substr(pos, token.size()) != token) return false;
        pos += token.size();
        return true;
    }
    Term parse_term(std::string_view token) {
        if (token.size() == 1 && token[0] >= 'A' && token[0] <= 'Z') {
            for (std::size_t i = 0; i < var_names.size(); ++i)
                if (var_names[i].size() == 1 && var_names[i][0] == token[0])
                    return Term::var(int(i));
            var_names.emplace_back(token);
            return Term::var(int(var_names.size()) - 1);
        }
        auto id = dicts.entities.find(token);
        if (!id) fail("unknown entity '" + std::string(token) + "'");
        return Term::constant(*id);
    }
    std::string_view take_until(char stop, const char* what) {
        std::size_t start = pos;
        while (pos < text.size() && text[pos] != stop) ++pos;
        if (pos >= text.size()) fail(std::string("expected '") + stop + "' after " + what);
        auto token = text.substr(start, pos - start);
        ++pos;  // consume stop
        while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
        while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
        if (token.empty()) fail(std::string("empty ") + what);
        return token;
    }
    Atom parse_atom() {
        auto rel_name = take_until('(', "relation name");
        auto rel = dicts.relations.find(rel_name);
        if (!rel) fail("unknown relation '" + std::string(rel_name) + "'");
        Term lhs = parse_term(take_until(',', "first argument"));
        Term rhs = parse_term(take_until(')', "second argument"));
        return Atom{*rel, lhs, rhs};
    }
};

}  // namespace

ParsedRule parse_rule(std::string_view line, std::string_view origin,
                      const Dictionaries& dicts) {
    auto fail = [&](const std::string& msg) -> void {
        throw std::runtime_error(std::string(origin) + ": " + msg);
    };

    std::array<std::string_view, 4> fields;
    std::size_t start = 0;
    for (int i = 0; i < 3; ++i) {
        auto tab = line.find('\t', start);
        if (tab == std::string_view::npos) fail("expected 4 tab-separated columns");
        fields[std::size_t(i)] = line.substr(start, tab - start);
        start = tab + 1;
    }
    fields[3] = line.substr(start);
    if (fields[3].find('\t') != std::string_view::npos)
        fail("expected 4 tab-separated columns");

    RuleStats stats;
    try {
        std::size_t used = 0;
        stats.support = std::stoull(std::string(fields[0]), &used);
        if (used != fields[0].size()) throw std::invalid_argument("");
        stats.body_groundings = std::stoull(std::string(fields[1]), &used);
        if (used != fields[1].size()) throw std::invalid_argument("");
        stats.confidence = std::stod(std::string(fields[2]), &used);
        if (used != fields[2].size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
        fail("malformed numeric column");
    }

    RuleParser parser{fields[3], 0, origin, dicts, {}};
    Atom head = parser.parse_atom();
    parser.skip_spaces();
    if (!parser.eat("<=")) parser.fail("expected '<=' after the head atom");
    std::vector<Atom> body;
    for (;;) {
        parser.skip_spaces();
        body.push_back(parser.parse_atom());
        parser.skip_spaces();
        if (parser.pos >= parser.text.size()) break;
        if (!parser.eat(",")) parser.fail("expected ',' between body atoms");
    }

    try {
        return ParsedRule{make_rule(head, std::move(body)), stats};
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }
    // unreachable
    throw std::logic_error("parse_rule");
}

std::vector<ParsedRule> read_rules(std::istream& in, std::string_view origin,
                                   const Dictionaries& dicts) {
    std::vector<ParsedRule> rules;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        rules.push_back(parse_rule(
            line, std::string(origin) + ":" + std::to_string(line_no), dicts));
    }
    return rules;
}

std::vector<ParsedRule> read_rules_file(const std::string& path,
                                        const Dictionaries& dicts) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_rules(in, path, dicts);
}

}  // namespace kgrule
