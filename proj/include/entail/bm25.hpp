#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "entail/corpus.hpp"
#include "entail/run.hpp"
#include "entail/text.hpp"

namespace entail {

/// Okapi BM25 with collection statistics taken from one entry's candidate
/// pool: N is the pool size, df counts pool members containing the term and
/// avgdl is the mean pool document length in tokens.
///
///   score(q, d) = sum over unique t in q of
///       idf(t) * tf(t,d) * (k1 + 1) / (tf(t,d) + k1 * (1 - b + b * |d| / avgdl))
///   idf(t) = ln(1 + (N - df(t) + 0.5) / (df(t) + 0.5))
struct Bm25Params {
    double k1 = 0.9;
    double b = 0.4;
    TokenizerOptions tokenizer;

    void validate() const;
};

/// One record per candidate, in pool order. Scores are finite and >= 0.
std::vector<ScoreRecord> bm25_score_entry(const Entry& entry, const Bm25Params& params);

/// Scores every (entry, candidate) pair. Entries are independent so they are
/// spread over `threads` workers; the result does not depend on the count.
Run bm25_score_dataset(const Dataset& dataset, const Bm25Params& params, std::string model_id,
                       std::size_t threads = 1);

}  // namespace entail
