#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "entail/corpus.hpp"
#include "entail/prediction.hpp"
#include "entail/run.hpp"
#include "entail/selection.hpp"

namespace entail {

/// The answers one model contributes, per entry. An entry may map to an empty
/// list when the model selected nothing for it.
struct AnswerSet {
    std::string model_id;
    std::map<std::string, std::vector<ScoredCandidate>, std::less<>> answers;

    bool operator==(const AnswerSet&) const = default;
};

AnswerSet answer_set_from_predictions(std::string model_id, std::span<const Prediction> predictions);
AnswerSet answer_set_from_run(const Run& run);

/// Reads a prediction file (3 columns) or a run file (4 columns). With a
/// dataset, entries absent from the file become empty answer lists so that
/// post-selection files with empty selections still cover the dataset.
AnswerSet read_answer_set(const std::filesystem::path& path, const Dataset* dataset = nullptr);

/// Per-entry min-max rescaling to [0, 1]; an all-equal entry maps to 1.0.
AnswerSet normalize_min_max(const AnswerSet& set);

/// Ensembles answer sets entry by entry: concatenate every model's pairs,
/// collapse duplicate candidates keeping the highest score, then run
/// select_answers with `params`. Pooled candidates are fed to selection in
/// candidate-id order so the result does not depend on the order of `sets`.
/// Throws DataError when the sets do not cover the same entries.
std::vector<Prediction> combine(std::span<const AnswerSet> sets, const SelectionParams& params);

}  // namespace entail
