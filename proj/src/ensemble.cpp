#include "entail/ensemble.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "entail/errors.hpp"

namespace entail {

AnswerSet answer_set_from_predictions(std::string model_id, std::span<const Prediction> predictions) {
    AnswerSet set;
    set.model_id = std::move(model_id);
    for (const auto& prediction : predictions) {
        if (!set.answers.emplace(prediction.entry_id, prediction.selected).second) {
            throw DataError("answer set '" + set.model_id + "': entry " + prediction.entry_id + " appears twice");
        }
    }
    return set;
}

AnswerSet answer_set_from_run(const Run& run) {
    AnswerSet set;
    set.model_id = run.model_id;
    for (const auto& [entry, candidates] : run.scores) {
        auto& answers = set.answers[entry];
        for (const auto& [candidate, score] : candidates) {
            answers.push_back({candidate, score});
        }
    }
    return set;
}

AnswerSet read_answer_set(const std::filesystem::path& path, const Dataset* dataset) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot read answer file " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string content = std::move(buffer).str();

    std::size_t columns = 0;
    std::istringstream lines(content);
    for (std::string line; std::getline(lines, line);) {
        if (!line.empty() && line.front() != '#' && line != "\r") {
            columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), '\t')) + 1;
            break;
        }
    }

    std::istringstream stream(content);
    AnswerSet set;
    if (columns == 4) {
        set = answer_set_from_run(read_run(stream, path.string()));
    } else {
        set = answer_set_from_predictions(path.stem().string(), read_predictions(stream, path.string()));
    }
    if (dataset) {
        for (const auto& [entry, answers] : set.answers) {
            if (!dataset->find_entry(entry)) {
                throw DataError(path.string() + ": unknown entry " + entry);
            }
        }
        for (const auto& entry : dataset->entries) {
            set.answers.try_emplace(entry.id);
        }
    }
    return set;
}

AnswerSet normalize_min_max(const AnswerSet& set) {
    AnswerSet out = set;
    for (auto& [entry, answers] : out.answers) {
        if (answers.empty()) {
            continue;
        }
        auto [lo, hi] = std::minmax_element(answers.begin(), answers.end(),
                                            [](const auto& a, const auto& b) { return a.score < b.score; });
        const double min = lo->score;
        const double range = hi->score - min;
        for (auto& answer : answers) {
            answer.score = range > 0.0 ? (answer.score - min) / range : 1.0;
        }
    }
    return out;
}

std::vector<Prediction> combine(std::span<const AnswerSet> sets, const SelectionParams& params) {
    params.validate();
    if (sets.empty()) {
        throw UsageError("ensemble: at least one answer set is required");
    }
    const auto& reference = sets.front();
    for (const auto& set : sets.subspan(1)) {
        for (const auto& [entry, answers] : set.answers) {
            if (!reference.answers.contains(entry)) {
                throw DataError("ensemble: entry " + entry + " is in '" + set.model_id + "' but not in '" +
                                reference.model_id + "'");
            }
        }
        for (const auto& [entry, answers] : reference.answers) {
            if (!set.answers.contains(entry)) {
                throw DataError("ensemble: entry " + entry + " is in '" + reference.model_id + "' but not in '" +
                                set.model_id + "'");
            }
        }
    }

    std::vector<Prediction> predictions;
    predictions.reserve(reference.answers.size());
    for (const auto& [entry, unused] : reference.answers) {
        std::map<std::string, double, std::less<>> pooled;
        for (const auto& set : sets) {
            for (const auto& answer : set.answers.find(entry)->second) {
                auto [it, inserted] = pooled.try_emplace(answer.id, answer.score);
                if (!inserted) {
                    it->second = std::max(it->second, answer.score);
                }
            }
        }
        std::vector<ScoredCandidate> merged;
        merged.reserve(pooled.size());
        for (const auto& [id, score] : pooled) {
            merged.push_back({id, score});
        }
        predictions.push_back({entry, select_answers(merged, params)});
    }
    return predictions;
}

}  // namespace entail
