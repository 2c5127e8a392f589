#include "entail/bm25.hpp"

#include <cmath>
#include <map>
#include <set>
#include <string_view>

#include "entail/errors.hpp"
#include "entail/parallel.hpp"

namespace entail {

void Bm25Params::validate() const {
    if (!(k1 >= 0.0) || !std::isfinite(k1)) {
        throw UsageError("bm25: k1 must be a finite nonnegative number");
    }
    if (!(b >= 0.0 && b <= 1.0)) {
        throw UsageError("bm25: b must lie in [0, 1]");
    }
}

std::vector<ScoreRecord> bm25_score_entry(const Entry& entry, const Bm25Params& params) {
    params.validate();
    const auto query_tokens = tokenize(entry.fragment, params.tokenizer);
    const std::set<std::string> query_terms(query_tokens.begin(), query_tokens.end());

    std::vector<std::map<std::string_view, std::size_t>> term_freqs(entry.candidates.size());
    std::vector<std::size_t> lengths(entry.candidates.size());
    std::vector<std::vector<std::string>> token_storage(entry.candidates.size());
    std::map<std::string_view, std::size_t> doc_freq;
    std::size_t total_length = 0;
    for (std::size_t i = 0; i < entry.candidates.size(); ++i) {
        token_storage[i] = tokenize(entry.candidates[i].text, params.tokenizer);
        lengths[i] = token_storage[i].size();
        total_length += lengths[i];
        for (const auto& token : token_storage[i]) {
            if (query_terms.contains(token)) {
                ++term_freqs[i][token];
            }
        }
        for (const auto& [term, tf] : term_freqs[i]) {
            ++doc_freq[term];
        }
    }

    const auto n_docs = static_cast<double>(entry.candidates.size());
    const double avgdl = entry.candidates.empty() ? 0.0 : static_cast<double>(total_length) / n_docs;

    std::vector<ScoreRecord> records;
    records.reserve(entry.candidates.size());
    for (std::size_t i = 0; i < entry.candidates.size(); ++i) {
        const double norm = avgdl > 0.0 ? static_cast<double>(lengths[i]) / avgdl : 1.0;
        const double length_factor = params.k1 * (1.0 - params.b + params.b * norm);
        double score = 0.0;
        for (const auto& term : query_terms) {
            auto it = term_freqs[i].find(term);
            if (it == term_freqs[i].end()) {
                continue;
            }
            const auto tf = static_cast<double>(it->second);
            const auto df = static_cast<double>(doc_freq.at(term));
            const double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
            score += idf * tf * (params.k1 + 1.0) / (tf + length_factor);
        }
        records.push_back({entry.id, entry.candidates[i].id, score});
    }
    return records;
}

Run bm25_score_dataset(const Dataset& dataset, const Bm25Params& params, std::string model_id,
                       std::size_t threads) {
    params.validate();
    std::vector<std::vector<ScoreRecord>> per_entry(dataset.entries.size());
    parallel_for(dataset.entries.size(), threads,
                 [&](std::size_t i) { per_entry[i] = bm25_score_entry(dataset.entries[i], params); });
    Run run;
    run.model_id = std::move(model_id);
    for (const auto& records : per_entry) {
        for (const auto& record : records) {
            run.insert(record);
        }
    }
    return run;
}

}  // namespace entail
