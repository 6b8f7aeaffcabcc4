#include "kgrule/evaluator.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace kgrule {

namespace {

std::uint64_t side_key(RelationId r, EntityId e) {
    return (std::uint64_t(std::uint32_t(r)) << 32) | std::uint32_t(e);
}

std::vector<EntityId> parse_ranked_line(const std::string& line, std::string_view prefix,
                                        std::string_view origin, std::size_t line_no,
                                        Dictionaries& dicts) {
    if (line.rfind(prefix, 0) != 0)
        throw std::runtime_error(std::string(origin) + ":" + std::to_string(line_no) +
                                 ": expected a line starting with '" + std::string(prefix) +
                                 "'");
    std::string_view rest(line);
    rest.remove_prefix(prefix.size());
    if (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
    std::vector<EntityId> ranked;
    std::size_t field = 0;
    while (!rest.empty()) {
        auto tab = rest.find('\t');
        auto token = rest.substr(0, tab);
        if (field % 2 == 0) {
            if (token.empty())
                throw std::runtime_error(std::string(origin) + ":" + std::to_string(line_no) +
                                         ": empty entity field");
            ranked.push_back(dicts.entities.intern(token));
        }
        ++field;
        if (tab == std::string_view::npos) break;
        rest.remove_prefix(tab + 1);
    }
    if (field % 2 == 1)
        throw std::runtime_error(std::string(origin) + ":" + std::to_string(line_no) +
                                 ": entity without a confidence");
    return ranked;
}

}  // namespace

PredictionSet read_predictions(std::istream& in, std::string_view origin,
                               Dictionaries& dicts) {
    PredictionSet set;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        auto s1 = line.find(' ');
        auto s2 = s1 == std::string::npos ? std::string::npos : line.find(' ', s1 + 1);
        if (s1 == std::string::npos || s2 == std::string::npos ||
            line.find(' ', s2 + 1) != std::string::npos)
            throw std::runtime_error(std::string(origin) + ":" + std::to_string(line_no) +
                                     ": expected 'subject relation object'");
        Triple t{dicts.entities.intern(line.substr(0, s1)),
                 dicts.relations.intern(line.substr(s1 + 1, s2 - s1 - 1)),
                 dicts.entities.intern(line.substr(s2 + 1))};

        std::string heads_line, tails_line;
        if (!std::getline(in, heads_line) || !std::getline(in, tails_line))
            throw std::runtime_error(std::string(origin) + ":" + std::to_string(line_no) +
                                     ": truncated prediction block");
        if (!heads_line.empty() && heads_line.back() == '\r') heads_line.pop_back();
        if (!tails_line.empty() && tails_line.back() == '\r') tails_line.pop_back();

        set.triples.push_back(t);
        set.heads.push_back(parse_ranked_line(heads_line, "Heads:", origin, line_no + 1, dicts));
        set.tails.push_back(parse_ranked_line(tails_line, "Tails:", origin, line_no + 2, dicts));
        line_no += 2;
    }
    return set;
}

PredictionSet read_predictions_file(const std::string& path, Dictionaries& dicts) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_predictions(in, path, dicts);
}

void FilterIndex::add(std::span<const Triple> triples) {
    for (const Triple& t : triples) {
        heads_[side_key(t.relation, t.object)].push_back(t.subject);
        tails_[side_key(t.relation, t.subject)].push_back(t.object);
    }
}

void FilterIndex::finalize() {
    for (auto* index : {&heads_, &tails_})
        for (auto& [key, entities] : *index) {
            std::sort(entities.begin(), entities.end());
            entities.erase(std::unique(entities.begin(), entities.end()), entities.end());
        }
}

std::span<const EntityId> FilterIndex::true_heads(RelationId r, EntityId object) const {
    auto it = heads_.find(side_key(r, object));
    return it == heads_.end() ? std::span<const EntityId>{} : std::span<const EntityId>(it->second);
}

std::span<const EntityId> FilterIndex::true_tails(RelationId r, EntityId subject) const {
    auto it = tails_.find(side_key(r, subject));
    return it == tails_.end() ? std::span<const EntityId>{} : std::span<const EntityId>(it->second);
}

std::optional<int> filtered_rank(std::span<const EntityId> ranked, EntityId gold,
                                 std::span<const EntityId> known_true) {
    int rank = 0;
    for (EntityId e : ranked) {
        if (e == gold) return rank + 1;
        if (!std::binary_search(known_true.begin(), known_true.end(), e)) ++rank;
    }
    return std::nullopt;
}

EvalReport evaluate(const PredictionSet& predictions, std::span<const Triple> test,
                    const FilterIndex& filter, const Dictionaries& dicts,
                    const EvalOptions& opts) {
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_subject;
    for (std::size_t i = 0; i < predictions.triples.size(); ++i)
        by_subject[std::uint64_t(std::uint32_t(predictions.triples[i].subject))].push_back(i);
    auto find_entry = [&](const Triple& t) -> std::optional<std::size_t> {
        auto it = by_subject.find(std::uint64_t(std::uint32_t(t.subject)));
        if (it == by_subject.end()) return std::nullopt;
        for (std::size_t i : it->second)
            if (predictions.triples[i] == t) return i;
        return std::nullopt;
    };

    struct Acc {
        std::vector<std::size_t> hits;
        double rr_sum = 0.0;
        std::size_t cases = 0;
    };
    const std::size_t n_ks = opts.hits_at.size();
    Acc global{std::vector<std::size_t>(n_ks, 0), 0.0, 0};
    std::map<RelationId, Acc> per_relation;

    EvalReport report;
    for (const Triple& t : test) {
        auto entry = find_entry(t);
        if (!entry) ++report.missing;
        auto score_case = [&](std::optional<int> rank) {
            auto apply = [&](Acc& acc) {
                acc.cases += 1;
                if (rank) {
                    for (std::size_t ki = 0; ki < n_ks; ++ki)
                        if (*rank <= opts.hits_at[ki]) acc.hits[ki] += 1;
                    acc.rr_sum += 1.0 / double(*rank);
                }
            };
            apply(global);
            if (opts.per_relation) {
                auto [it, fresh] = per_relation.try_emplace(
                    t.relation, Acc{std::vector<std::size_t>(n_ks, 0), 0.0, 0});
                apply(it->second);
            }
        };
        if (entry) {
            const std::size_t i = *entry;
            score_case(filtered_rank(predictions.heads[i], t.subject,
                                     filter.true_heads(t.relation, t.object)));
            score_case(filtered_rank(predictions.tails[i], t.object,
                                     filter.true_tails(t.relation, t.subject)));
        } else {
            score_case(std::nullopt);
            score_case(std::nullopt);
        }
    }

    auto emit = [&](const Acc& acc, const std::string& suffix) {
        for (std::size_t ki = 0; ki < n_ks; ++ki)
            report.rows.push_back(
                {"hits@" + std::to_string(opts.hits_at[ki]) + suffix,
                 acc.cases == 0 ? 0.0 : 100.0 * double(acc.hits[ki]) / double(acc.cases)});
        report.rows.push_back(
            {"mrr_lb" + suffix, acc.cases == 0 ? 0.0 : acc.rr_sum / double(acc.cases)});
    };
    emit(global, "");
    for (const auto& [relation, acc] : per_relation)
        emit(acc, "[" + dicts.relations.name(relation) + "]");
    report.cases = global.cases;
    return report;
}

void write_report(std::ostream& out, const EvalReport& report) {
    char buf[64];
    for (const MetricRow& row : report.rows) {
        std::snprintf(buf, sizeof buf, row.name.rfind("mrr", 0) == 0 ? "%.4f" : "%.2f",
                      row.value);
        out << row.name << '\t' << buf << '\n';
    }
    out << "cases\t" << report.cases << '\n';
    if (report.missing > 0) out << "missing\t" << report.missing << '\n';
}

}  // namespace kgrule
