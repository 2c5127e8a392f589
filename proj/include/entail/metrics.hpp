#pragma once

#include <cstddef>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "entail/corpus.hpp"
#include "entail/prediction.hpp"

namespace entail {

/// Micro-averaged precision, recall and F1 together with the raw counts.
struct EvalResult {
    std::size_t n_retrieved = 0;
    std::size_t n_relevant = 0;
    std::size_t n_correct = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    bool operator==(const EvalResult&) const = default;

    /// P = 0 when nothing is retrieved, R = 0 when nothing is relevant and
    /// F1 = 0 when P + R = 0.
    static EvalResult from_counts(std::size_t retrieved, std::size_t relevant, std::size_t correct);
};

struct EntryBreakdown {
    std::string entry_id;
    std::set<std::string> retrieved;
    std::set<std::string> gold;
    std::set<std::string> correct;
};

/// Counts are summed over all entries of the dataset before dividing.
/// Entries without a prediction count as empty retrievals. Throws DataError
/// for a prediction naming an unknown entry or candidate, for two predictions
/// of the same entry, and for dataset entries without gold labels.
EvalResult evaluate(std::span<const Prediction> predictions, const Dataset& dataset);

/// One row per dataset entry, in dataset order. Same preconditions as evaluate.
std::vector<EntryBreakdown> per_entry_breakdown(std::span<const Prediction> predictions,
                                                const Dataset& dataset);

nlohmann::json to_json(const EvalResult& result);

/// CSV `entry_id,retrieved,gold,correct,n_retrieved,n_gold,n_correct`; the id
/// lists are space-separated.
void write_breakdown_csv(std::span<const EntryBreakdown> rows, std::ostream& out);

}  // namespace entail
