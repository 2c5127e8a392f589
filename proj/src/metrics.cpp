#include "entail/metrics.hpp"

#include <map>
#include <ostream>

#include "entail/errors.hpp"

namespace entail {
namespace {

// Validates predictions against the dataset and returns, per dataset entry,
// the retrieved ids (empty when the entry has no prediction).
std::vector<std::set<std::string>> retrieved_per_entry(std::span<const Prediction> predictions,
                                                       const Dataset& dataset) {
    std::map<std::string_view, std::size_t> index;
    for (std::size_t i = 0; i < dataset.entries.size(); ++i) {
        const auto& entry = dataset.entries[i];
        if (!entry.gold) {
            throw DataError("evaluation: entry " + entry.id + " has no gold labels");
        }
        index.emplace(entry.id, i);
    }
    std::vector<std::set<std::string>> retrieved(dataset.entries.size());
    std::vector<bool> seen(dataset.entries.size(), false);
    for (const auto& prediction : predictions) {
        auto it = index.find(prediction.entry_id);
        if (it == index.end()) {
            throw DataError("evaluation: prediction for unknown entry " + prediction.entry_id);
        }
        if (seen[it->second]) {
            throw DataError("evaluation: more than one prediction for entry " + prediction.entry_id);
        }
        seen[it->second] = true;
        const Entry& entry = dataset.entries[it->second];
        for (const auto& answer : prediction.selected) {
            if (!entry.find_candidate(answer.id)) {
                throw DataError("evaluation: entry " + entry.id + " has no candidate " + answer.id);
            }
            if (!retrieved[it->second].insert(answer.id).second) {
                throw DataError("evaluation: entry " + entry.id + " selects candidate " + answer.id + " twice");
            }
        }
    }
    return retrieved;
}

std::string join_ids(const std::set<std::string>& ids) {
    std::string out;
    for (const auto& id : ids) {
        if (!out.empty()) {
            out.push_back(' ');
        }
        out += id;
    }
    return out;
}

}  // namespace

EvalResult EvalResult::from_counts(std::size_t retrieved, std::size_t relevant, std::size_t correct) {
    EvalResult r;
    r.n_retrieved = retrieved;
    r.n_relevant = relevant;
    r.n_correct = correct;
    r.precision = retrieved > 0 ? static_cast<double>(correct) / static_cast<double>(retrieved) : 0.0;
    r.recall = relevant > 0 ? static_cast<double>(correct) / static_cast<double>(relevant) : 0.0;
    // Harmonic mean of P and R, computed from the counts to avoid rounding.
    r.f1 = correct > 0 ? 2.0 * static_cast<double>(correct) / static_cast<double>(retrieved + relevant) : 0.0;
    return r;
}

EvalResult evaluate(std::span<const Prediction> predictions, const Dataset& dataset) {
    const auto retrieved = retrieved_per_entry(predictions, dataset);
    std::size_t n_retrieved = 0;
    std::size_t n_relevant = 0;
    std::size_t n_correct = 0;
    for (std::size_t i = 0; i < dataset.entries.size(); ++i) {
        const auto& gold = *dataset.entries[i].gold;
        n_relevant += gold.size();
        n_retrieved += retrieved[i].size();
        for (const auto& id : retrieved[i]) {
            n_correct += gold.contains(id) ? 1 : 0;
        }
    }
    return EvalResult::from_counts(n_retrieved, n_relevant, n_correct);
}

std::vector<EntryBreakdown> per_entry_breakdown(std::span<const Prediction> predictions, const Dataset& dataset) {
    auto retrieved = retrieved_per_entry(predictions, dataset);
    std::vector<EntryBreakdown> rows;
    rows.reserve(dataset.entries.size());
    for (std::size_t i = 0; i < dataset.entries.size(); ++i) {
        EntryBreakdown row;
        row.entry_id = dataset.entries[i].id;
        row.gold = *dataset.entries[i].gold;
        for (const auto& id : retrieved[i]) {
            if (row.gold.contains(id)) {
                row.correct.insert(id);
            }
        }
        row.retrieved = std::move(retrieved[i]);
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json to_json(const EvalResult& result) {
    return {{"precision", result.precision},
            {"recall", result.recall},
            {"f1", result.f1},
            {"counts",
             {{"retrieved", result.n_retrieved}, {"relevant", result.n_relevant}, {"correct", result.n_correct}}}};
}

void write_breakdown_csv(std::span<const EntryBreakdown> rows, std::ostream& out) {
    out << "entry_id,retrieved,gold,correct,n_retrieved,n_gold,n_correct\n";
    for (const auto& row : rows) {
        out << row.entry_id << ',' << join_ids(row.retrieved) << ',' << join_ids(row.gold) << ','
            << join_ids(row.correct) << ',' << row.retrieved.size() << ',' << row.gold.size() << ','
            << row.correct.size() << '\n';
    }
}

}  // namespace entail
