#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "entail/text.hpp"

namespace entail {

enum class Split { train, test };

std::string_view to_string(Split split);
Split parse_split(std::string_view name);

/// A paragraph of a prior decision that may support the entry's fragment.
struct Candidate {
    std::string id;
    std::string text;

    bool operator==(const Candidate&) const = default;
};

/// One base-case fragment with its private candidate pool.
struct Entry {
    std::string id;
    std::string fragment;
    std::vector<Candidate> candidates;
    std::optional<std::set<std::string>> gold;

    bool operator==(const Entry&) const = default;

    const Candidate* find_candidate(std::string_view candidate_id) const;
};

struct Dataset {
    std::vector<Entry> entries;
    Split split = Split::train;

    bool operator==(const Dataset&) const = default;

    const Entry* find_entry(std::string_view entry_id) const;
    std::size_t pair_count() const;
};
/// Dataset-level statistics (pool sizes, positives, token lengths)
/// Dataset-level statistics in the layout of the COLIEE statistics table,
/// plus every invariant violation found.
struct ValidationReport {
    std::size_t n_entries = 0;
    std::size_t n_candidates = 0;
    double mean_candidates = 0.0;
    std::optional<double> mean_positives;
    double mean_fragment_tokens = 0.0;
    double mean_candidate_tokens = 0.0;
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

/// Reads `<root>/<entry_id>/entailed_fragment.txt`,
/// `<root>/<entry_id>/paragraphs/<candidate_id>.txt` and the optional
/// `<root>/labels.json`. Entries and candidates come back in lexicographic
/// filename order. Throws DataError naming the entry on any layout problem.
Dataset load_dataset(const std::filesystem::path& root, Split split);

/// Inverse of load_dataset. The target directory is created if needed;
/// labels.json is written when any entry carries gold labels.
void write_dataset(const Dataset& dataset, const std::filesystem::path& root);

ValidationReport validate_dataset(const Dataset& dataset, const TokenizerOptions& tokenizer = {});

struct SyntheticConfig {
    std::size_t n_entries = 525;
    double mean_candidates = 35.69;
    double mean_positives = 1.14;
    std::size_t vocab_size = 20000;
    std::uint64_t seed = 7;
    Split split = Split::train;

    /// Throws UsageError when a field is out of range.
    void validate() const;
};

/// Named presets matching the per-split sizes of the COLIEE 2021/2022 task 2
/// data: "2021-train", "2021-test", "2022-train", "2022-test".
SyntheticConfig synthetic_preset(std::string_view name);

/// Deterministic for a fixed config. Candidate counts follow a rounded
/// Gaussian (minimum 2), positive counts a floored Poisson whose rate is
/// calibrated so the sample mean tracks mean_positives. Positive paragraphs
/// contain a copy of 30% of the fragment's tokens.
Dataset generate_synthetic(const SyntheticConfig& config);

}  // namespace entail
