#include "entail/corpus.hpp"

#include <algorithm>
#include <array>
#include <iterator>
#include <numeric>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "entail/errors.hpp"

namespace fs = std::filesystem;

namespace entail {
namespace {

constexpr std::string_view kFragmentFile = "entailed_fragment.txt";
constexpr std::string_view kParagraphDir = "paragraphs";
constexpr std::string_view kLabelsFile = "labels.json";

// Mean token lengths of base-case fragments and candidate paragraphs in the
// COLIEE task 2 training data.
constexpr double kFragmentTokens = 37.0;
constexpr double kCandidateTokens = 103.0;
constexpr double kPlantedFraction = 0.3;
constexpr double kZipfExponent = 1.0;

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot read " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string text = std::move(buffer).str();
    if (!text.empty() && text.back() == '\n') {
        text.pop_back();
    }
    return text;
}

void write_text_file(const fs::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    out << text << '\n';
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
}

bool blank(std::string_view text) {
    return std::all_of(text.begin(), text.end(),
                       [](unsigned char c) { return c == ' ' || (c >= '\t' && c <= '\r'); });
}

bool safe_file_stem(std::string_view id) {
    return !id.empty() && id != "." && id != ".." && id.find('/') == std::string_view::npos &&
           id.find('\0') == std::string_view::npos;
}

std::vector<fs::path> sorted_children(const fs::path& dir, bool want_directories) {
    std::vector<fs::path> out;
    for (const auto& item : fs::directory_iterator(dir)) {
        if (want_directories ? item.is_directory() : item.is_regular_file()) {
            out.push_back(item.path());
        }
    }
    std::sort(out.begin(), out.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
    return out;
}

void attach_labels(Dataset& dataset, const fs::path& labels_path) {
    nlohmann::json labels;
    try {
        std::ifstream in(labels_path);
        labels = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed " + labels_path.string() + ": " + e.what());
    }
    if (!labels.is_object()) {
        throw DataError("malformed " + labels_path.string() + ": expected an object of entry_id -> [candidate_id]");
    }
    std::map<std::string, Entry*, std::less<>> by_id;
    for (auto& entry : dataset.entries) {
        by_id.emplace(entry.id, &entry);
    }
    for (const auto& [entry_id, ids] : labels.items()) {
        auto it = by_id.find(entry_id);
        if (it == by_id.end()) {
            throw DataError("entry " + entry_id + ": labels.json names an entry with no directory");
        }
        if (!ids.is_array()) {
            throw DataError("entry " + entry_id + ": malformed labels, expected a list of candidate ids");
        }
        Entry& entry = *it->second;
        std::set<std::string> gold;
        for (const auto& id : ids) {
            if (!id.is_string()) {
                throw DataError("entry " + entry_id + ": malformed labels, candidate ids must be strings");
            }
            std::string candidate_id = id.get<std::string>();
            // COLIEE label files name paragraphs with their ".txt" suffix.
            if (!entry.find_candidate(candidate_id) && candidate_id.ends_with(".txt")) {
                candidate_id.resize(candidate_id.size() - 4);
            }
            if (!entry.find_candidate(candidate_id)) {
                throw DataError("entry " + entry_id + ": label references unknown candidate " +
                                id.get<std::string>());
            }
            gold.insert(std::move(candidate_id));
        }
        entry.gold = std::move(gold);
    }
}

// Bijective base-16 numeral over consonant-vowel syllables: distinct ranks
// give distinct, pronounceable words.
std::string synthetic_word(std::size_t rank) {
    static constexpr std::array<std::string_view, 16> syllables{
        "ka", "lo", "mi", "ne", "ru", "so", "ta", "vi", "be", "do", "fu", "ga", "hi", "jo", "pe", "zu"};
    std::string word;
    std::size_t n = rank + 17;  // at least two syllables
    while (n > 0) {
        --n;
        word.insert(0, syllables[n % 16]);
        n /= 16;
    }
    return word;
}

// Rate for which E[max(1, Poisson(rate))] = rate + exp(-rate) hits the target.
double calibrated_poisson_rate(double target_mean) {
    if (target_mean <= 1.0) {
        return 0.0;
    }
    double lo = 0.0;
    double hi = target_mean;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (mid + std::exp(-mid) < target_mean ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::string zero_padded(std::size_t value, std::size_t width) {
    std::string digits = std::to_string(value);
    return std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

}  // namespace

std::string_view to_string(Split split) { return split == Split::train ? "train" : "test"; }

Split parse_split(std::string_view name) {
    if (name == "train") {
        return Split::train;
    }
    if (name == "test") {
        return Split::test;
    }
    throw UsageError("unknown split '" + std::string(name) + "' (expected train or test)");
}

const Candidate* Entry::find_candidate(std::string_view candidate_id) const {
    auto it = std::find_if(candidates.begin(), candidates.end(),
                           [&](const Candidate& c) { return c.id == candidate_id; });
    return it == candidates.end() ? nullptr : &*it;
}

const Entry* Dataset::find_entry(std::string_view entry_id) const {
    auto it = std::find_if(entries.begin(), entries.end(), [&](const Entry& e) { return e.id == entry_id; });
    return it == entries.end() ? nullptr : &*it;
}

std::size_t Dataset::pair_count() const {
    std::size_t n = 0;
    for (const auto& entry : entries) {
        n += entry.candidates.size();
    }
    return n;
}

Dataset load_dataset(const fs::path& root, Split split) {
    if (!fs::is_directory(root)) {
        throw DataError("dataset root not found: " + root.string());
    }
    Dataset dataset;
    dataset.split = split;
    for (const auto& dir : sorted_children(root, true)) {
        Entry entry;
        entry.id = dir.filename().string();
        const fs::path fragment_path = dir / kFragmentFile;
        if (!fs::is_regular_file(fragment_path)) {
            throw DataError("entry " + entry.id + ": missing " + std::string(kFragmentFile));
        }
        entry.fragment = read_text_file(fragment_path);
        const fs::path paragraphs = dir / kParagraphDir;
        if (fs::is_directory(paragraphs)) {
            for (const auto& file : sorted_children(paragraphs, false)) {
                if (file.extension() != ".txt") {
                    continue;
                }
                Candidate candidate{file.stem().string(), read_text_file(file)};
                if (blank(candidate.text)) {
                    throw DataError("entry " + entry.id + ": candidate " + candidate.id + " is empty");
                }
                entry.candidates.push_back(std::move(candidate));
            }
        }
        if (entry.candidates.empty()) {
            throw DataError("entry " + entry.id + ": empty candidate pool");
        }
        dataset.entries.push_back(std::move(entry));
    }

    const fs::path labels_path = root / kLabelsFile;
    if (fs::is_regular_file(labels_path)) {
        attach_labels(dataset, labels_path);
    }
    if (split == Split::train) {
        for (const auto& entry : dataset.entries) {
            if (!entry.gold) {
                throw DataError("entry " + entry.id + ": no gold labels in a train split");
            }
        }
    }
    return dataset;
}

void write_dataset(const Dataset& dataset, const fs::path& root) {
    if (fs::exists(root) && !(fs::is_directory(root) && fs::is_empty(root))) {
        throw DataError("refusing to write dataset into non-empty path " + root.string());
    }
    fs::create_directories(root);
    nlohmann::json labels = nlohmann::json::object();
    for (const auto& entry : dataset.entries) {
        if (!safe_file_stem(entry.id)) {
            throw DataError("entry id '" + entry.id + "' is not usable as a directory name");
        }
        const fs::path dir = root / entry.id;
        fs::create_directories(dir / kParagraphDir);
        write_text_file(dir / kFragmentFile, entry.fragment);
        for (const auto& candidate : entry.candidates) {
            if (!safe_file_stem(candidate.id)) {
                throw DataError("entry " + entry.id + ": candidate id '" + candidate.id +
                                "' is not usable as a file name");
            }
            write_text_file(dir / kParagraphDir / (candidate.id + ".txt"), candidate.text);
        }
        if (entry.gold) {
            labels[entry.id] = std::vector<std::string>(entry.gold->begin(), entry.gold->end());
        }
    }
    if (!labels.empty()) {
        std::ofstream out(root / kLabelsFile);
        out << labels.dump(2) << '\n';
    }
}

ValidationReport validate_dataset(const Dataset& dataset, const TokenizerOptions& tokenizer) {
    ValidationReport report;
    report.n_entries = dataset.entries.size();
    if (dataset.entries.empty()) {
        report.violations.emplace_back("no entries");
        return report;
    }

    std::set<std::string_view> entry_ids;
    std::size_t fragment_tokens = 0;
    std::size_t candidate_tokens = 0;
    std::size_t positives = 0;
    bool all_labeled = true;
    for (const auto& entry : dataset.entries) {
        if (!entry_ids.insert(entry.id).second) {
            report.violations.push_back("duplicate entry id " + entry.id);
        }
        if (entry.candidates.empty()) {
            report.violations.push_back("entry " + entry.id + ": empty candidate pool");
        }
        fragment_tokens += tokenize(entry.fragment, tokenizer).size();
        std::set<std::string_view> candidate_ids;
        for (const auto& candidate : entry.candidates) {
            if (candidate.id.empty()) {
                report.violations.push_back("entry " + entry.id + ": empty candidate id");
            } else if (!candidate_ids.insert(candidate.id).second) {
                report.violations.push_back("entry " + entry.id + ": duplicate candidate id " + candidate.id);
            }
            if (blank(candidate.text)) {
                report.violations.push_back("entry " + entry.id + ": candidate " + candidate.id + " is empty");
            }
            candidate_tokens += tokenize(candidate.text, tokenizer).size();
        }
        report.n_candidates += entry.candidates.size();
        if (entry.gold) {
            positives += entry.gold->size();
            for (const auto& id : *entry.gold) {
                if (!candidate_ids.contains(id)) {
                    report.violations.push_back("entry " + entry.id + ": gold label " + id +
                                                " is not a candidate");
                }
            }
        } else {
            all_labeled = false;
            if (dataset.split == Split::train) {
                report.violations.push_back("entry " + entry.id + ": no gold labels in a train split");
            }
        }
    }

    const auto n = static_cast<double>(report.n_entries);
    report.mean_candidates = static_cast<double>(report.n_candidates) / n;
    report.mean_fragment_tokens = static_cast<double>(fragment_tokens) / n;
    if (report.n_candidates > 0) {
        report.mean_candidate_tokens =
            static_cast<double>(candidate_tokens) / static_cast<double>(report.n_candidates);
    }
    if (all_labeled) {
        report.mean_positives = static_cast<double>(positives) / n;
    }
    return report;
}

void SyntheticConfig::validate() const {
    if (n_entries == 0) {
        throw UsageError("synthetic config: n_entries must be positive");
    }
    if (!(mean_candidates > 0.0) || !std::isfinite(mean_candidates)) {
        throw UsageError("synthetic config: mean_candidates must be positive");
    }
    if (!(mean_positives > 0.0) || !std::isfinite(mean_positives)) {
        throw UsageError("synthetic config: mean_positives must be positive");
    }
    if (mean_positives > mean_candidates) {
        throw UsageError("synthetic config: mean_positives exceeds mean_candidates");
    }
    if (vocab_size == 0) {
        throw UsageError("synthetic config: vocab_size must be positive");
    }
}

SyntheticConfig synthetic_preset(std::string_view name) {
    SyntheticConfig cfg;
    if (name == "2021-train") {
        cfg.n_entries = 425, cfg.mean_candidates = 35.80, cfg.mean_positives = 1.17;
    } else if (name == "2021-test") {
        cfg.n_entries = 100, cfg.mean_candidates = 35.24, cfg.mean_positives = 1.17, cfg.split = Split::test;
    } else if (name == "2022-train") {
        cfg.n_entries = 525, cfg.mean_candidates = 35.69, cfg.mean_positives = 1.14;
    } else if (name == "2022-test") {
        // Positive rate of the 2022 test split was never published; reuse train's.
        cfg.n_entries = 100, cfg.mean_candidates = 32.78, cfg.mean_positives = 1.14, cfg.split = Split::test;
    } else {
        throw UsageError("unknown preset '" + std::string(name) +
                         "' (expected 2021-train, 2021-test, 2022-train or 2022-test)");
    }
    return cfg;
}

Dataset generate_synthetic(const SyntheticConfig& config) {
    config.validate();
    std::mt19937_64 rng(config.seed);

    std::vector<std::string> vocab(config.vocab_size);
    std::vector<double> weights(config.vocab_size);
    for (std::size_t r = 0; r < config.vocab_size; ++r) {
        vocab[r] = synthetic_word(r);
        weights[r] = 1.0 / std::pow(static_cast<double>(r + 1), kZipfExponent);
    }
    std::discrete_distribution<std::size_t> word_dist(weights.begin(), weights.end());

    std::normal_distribution<double> candidate_count(config.mean_candidates, config.mean_candidates / 4.0);
    std::poisson_distribution<int> positive_count(calibrated_poisson_rate(config.mean_positives));
    std::normal_distribution<double> fragment_len(kFragmentTokens, kFragmentTokens / 3.0);
    std::normal_distribution<double> candidate_len(kCandidateTokens, kCandidateTokens / 3.0);

    auto draw_length = [&](std::normal_distribution<double>& dist, long min_len) {
        return static_cast<std::size_t>(std::max(min_len, std::lround(dist(rng))));
    };
    auto join = [](const std::vector<std::string>& words) {
        std::string text;
        for (const auto& w : words) {
            if (!text.empty()) {
                text.push_back(' ');
            }
            text += w;
        }
        text.push_back('.');
        text[0] = static_cast<char>(text[0] - 'a' + 'A');
        return text;
    };

    Dataset dataset;
    dataset.split = config.split;
    dataset.entries.reserve(config.n_entries);
    const std::size_t id_width = std::max<std::size_t>(3, std::to_string(config.n_entries).size());
    for (std::size_t e = 0; e < config.n_entries; ++e) {
        Entry entry;
        entry.id = zero_padded(e + 1, id_width);

        std::vector<std::string> fragment(draw_length(fragment_len, 5));
        for (auto& w : fragment) {
            w = vocab[word_dist(rng)];
        }
        entry.fragment = join(fragment);

        const std::size_t n_candidates = draw_length(candidate_count, 2);
        const std::size_t n_positive =
            std::min<std::size_t>(n_candidates, std::max(1, positive_count(rng)));
        std::vector<std::size_t> order(n_candidates);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<bool> is_positive(n_candidates, false);
        for (std::size_t i = 0; i < n_positive; ++i) {
            is_positive[order[i]] = true;
        }

        const std::size_t cid_width = std::max<std::size_t>(3, std::to_string(n_candidates).size());
        const auto planted = static_cast<std::size_t>(
            std::ceil(kPlantedFraction * static_cast<double>(fragment.size())));
        std::set<std::string> gold;
        for (std::size_t c = 0; c < n_candidates; ++c) {
            std::vector<std::string> words(draw_length(candidate_len, 10));
            for (auto& w : words) {
                w = vocab[word_dist(rng)];
            }
            std::string id = zero_padded(c + 1, cid_width);
            if (is_positive[c]) {
                std::vector<std::string> copied;
                std::sample(fragment.begin(), fragment.end(), std::back_inserter(copied), planted, rng);
                if (words.size() < copied.size()) {
                    words.resize(copied.size());
                }
                std::copy(copied.begin(), copied.end(),
                          words.end() - static_cast<std::ptrdiff_t>(copied.size()));
                std::shuffle(words.begin(), words.end(), rng);
                gold.insert(id);
            }
            entry.candidates.push_back({std::move(id), join(words)});
        }
        entry.gold = std::move(gold);
        dataset.entries.push_back(std::move(entry));
    }
    return dataset;
}

}  // namespace entail
