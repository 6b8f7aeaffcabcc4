#pragma once

// Filtered link-prediction evaluation. Each test triple yields two cases,
// predicting its subject and its object. The gold entity's rank in the
// prediction list is taken after skipping every other entity that forms a
// known-true triple (train, validation or test). hits@k is the fraction of
// cases ranked within k; the reciprocal-rank metric is a lower bound: a gold
// entity absent from the (truncated) list contributes 0.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgrule/graph.hpp"

namespace kgrule {

// Ranked entity lists read back from a prediction file, aligned 1:1 with the
// file's triples.
struct PredictionSet {
    std::vector<Triple> triples;
    std::vector<std::vector<EntityId>> heads;
    std::vector<std::vector<EntityId>> tails;
};

PredictionSet read_predictions(std::istream& in, std::string_view origin,
                               Dictionaries& dicts);
PredictionSet read_predictions_file(const std::string& path, Dictionaries& dicts);

// Known-true completions per (relation, entity) side, for filtering.
class FilterIndex {
public:
    void add(std::span<const Triple> triples);
    std::span<const EntityId> true_heads(RelationId r, EntityId object) const;
    std::span<const EntityId> true_tails(RelationId r, EntityId subject) const;
    void finalize();  // sort + dedup; call once after the last add

private:
    std::unordered_map<std::uint64_t, std::vector<EntityId>> heads_, tails_;
};

// 1-based rank of gold among `ranked` after dropping other known-true
// entities; nullopt when gold is not in the list.
std::optional<int> filtered_rank(std::span<const EntityId> ranked, EntityId gold,
                                 std::span<const EntityId> known_true);

struct EvalOptions {
    std::vector<int> hits_at = {1, 10};
    bool per_relation = false;
};

struct MetricRow {
    std::string name;
    double value;
};

struct EvalReport {
    std::vector<MetricRow> rows;
    std::size_t cases = 0;
    std::size_t missing = 0;  // test triples without predictions (count as misses)
};

EvalReport evaluate(const PredictionSet& predictions, std::span<const Triple> test,
                    const FilterIndex& filter, const Dictionaries& dicts,
                    const EvalOptions& opts);

// One `name <TAB> value` row per line; hits as percentages with two
// decimals, reciprocal ranks as fractions with four.
void write_report(std::ostream& out, const EvalReport& report);

}  // namespace kgrule
