#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace entail {

struct ScoredCandidate {
    std::string id;
    double score = 0.0;

    bool operator==(const ScoredCandidate&) const = default;
};

/// The answer set selected for one entry, in rank order.
struct Prediction {
    std::string entry_id;
    std::vector<ScoredCandidate> selected;

    bool operator==(const Prediction&) const = default;
};

/// Prediction file: `entry<TAB>candidate<TAB>score` per line. Entries whose
/// answer set is empty have no lines. Reading groups lines by entry in order
/// of first appearance.
std::vector<Prediction> read_predictions(std::istream& in, std::string_view source = "<stream>");
std::vector<Prediction> read_predictions(const std::filesystem::path& path);
void write_predictions(std::span<const Prediction> predictions, std::ostream& out);
void write_predictions(std::span<const Prediction> predictions, const std::filesystem::path& path);

}  // namespace entail
