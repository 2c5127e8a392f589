#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "entail/corpus.hpp"

namespace entail {

struct ScoreRecord {
    std::string entry_id;
    std::string candidate_id;
    double score = 0.0;

    bool operator==(const ScoreRecord&) const = default;
};

using CandidateScores = std::map<std::string, double, std::less<>>;

/// All scores one model produced, keyed entry -> candidate -> score.
/// Scores are always finite and each pair appears once.
struct Run {
    std::string model_id;
    std::map<std::string, CandidateScores, std::less<>> scores;

    bool operator==(const Run&) const = default;

    /// Throws DataError on a duplicate pair or a non-finite score.
    void insert(std::string entry_id, std::string candidate_id, double score);
    void insert(const ScoreRecord& record) { insert(record.entry_id, record.candidate_id, record.score); }

    std::size_t size() const;
    std::vector<ScoreRecord> records() const;
    const CandidateScores* find_entry(std::string_view entry_id) const;
};

/// Shortest decimal string that parses back to exactly `value`.
std::string format_score(double value);
std::optional<double> parse_score(std::string_view text);

/// Run file: `entry<TAB>candidate<TAB>score<TAB>model` per line, `#` comments.
Run read_run(std::istream& in, std::string_view source = "<stream>");
Run read_run(const std::filesystem::path& path);
void write_run(const Run& run, std::ostream& out);
void write_run(const Run& run, const std::filesystem::path& path);

/// Throws DataError unless the run's key set equals the dataset's
/// (entry, candidate) key set exactly. The message names the first gap.
void check_coverage(const Run& run, const Dataset& dataset);

/// Rescales every entry's scores to [0, 1] by (s - min) / (max - min).
/// An entry whose scores are all equal maps to 1.0.
Run normalize_min_max(const Run& run);

}  // namespace entail
