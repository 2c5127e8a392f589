#include "entail/run.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "entail/errors.hpp"

namespace entail {
namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        std::size_t tab = line.find('\t', start);
        fields.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
        if (tab == std::string_view::npos) {
            return fields;
        }
        start = tab + 1;
    }
}

bool usable_field(std::string_view field) {
    return !field.empty() && field.find_first_of("\t\n\r") == std::string_view::npos;
}

std::string pair_name(std::string_view entry_id, std::string_view candidate_id) {
    return "(" + std::string(entry_id) + ", " + std::string(candidate_id) + ")";
}

}  // namespace

void Run::insert(std::string entry_id, std::string candidate_id, double score) {
    if (!std::isfinite(score)) {
        throw DataError("non-finite score for pair " + pair_name(entry_id, candidate_id));
    }
    auto entry_it = scores.try_emplace(std::move(entry_id)).first;
    auto [it, inserted] = entry_it->second.try_emplace(std::move(candidate_id), score);
    if (!inserted) {
        throw DataError("duplicate score for pair " + pair_name(entry_it->first, it->first));
    }
}

std::size_t Run::size() const {
    std::size_t n = 0;
    for (const auto& [entry, candidates] : scores) {
        n += candidates.size();
    }
    return n;
}

std::vector<ScoreRecord> Run::records() const {
    std::vector<ScoreRecord> out;
    out.reserve(size());
    for (const auto& [entry, candidates] : scores) {
        for (const auto& [candidate, score] : candidates) {
            out.push_back({entry, candidate, score});
        }
    }
    return out;
}

const CandidateScores* Run::find_entry(std::string_view entry_id) const {
    auto it = scores.find(entry_id);
    return it == scores.end() ? nullptr : &it->second;
}

std::string format_score(double value) {
    char buffer[64];
    auto [end, ec] = std::to_chars(std::begin(buffer), std::end(buffer), value);
    return std::string(buffer, end);
}

std::optional<double> parse_score(std::string_view text) {
    double value = 0.0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size()) {
        return std::nullopt;
    }
    return value;
}

Run read_run(std::istream& in, std::string_view source) {
    Run run;
    std::map<std::pair<std::string, std::string>, std::size_t> first_line;
    bool have_model = false;
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& what) {
        throw DataError(std::string(source) + ":" + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto fields = split_tabs(line);
        if (fields.size() != 4 || fields[0].empty() || fields[1].empty() || fields[3].empty()) {
            fail("malformed run line, expected entry_id<TAB>candidate_id<TAB>score<TAB>model_id");
        }
        const auto score = parse_score(fields[2]);
        if (!score) {
            fail("malformed score '" + std::string(fields[2]) + "'");
        }
        if (!std::isfinite(*score)) {
            fail("non-finite score for pair " + pair_name(fields[0], fields[1]));
        }
        if (!have_model) {
            run.model_id = std::string(fields[3]);
            have_model = true;
        } else if (fields[3] != run.model_id) {
            fail("model_id '" + std::string(fields[3]) + "' differs from '" + run.model_id + "'");
        }
        auto [it, inserted] = first_line.try_emplace({std::string(fields[0]), std::string(fields[1])}, line_no);
        if (!inserted) {
            fail("duplicate pair " + pair_name(fields[0], fields[1]) + " (first seen on line " +
                 std::to_string(it->second) + ")");
        }
        run.insert(std::string(fields[0]), std::string(fields[1]), *score);
    }
    return run;
}

Run read_run(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot read run file " + path.string());
    }
    return read_run(in, path.string());
}

void write_run(const Run& run, std::ostream& out) {
    if (run.size() > 0 && !usable_field(run.model_id)) {
        throw DataError("run model_id must be non-empty and free of tabs and newlines");
    }
    for (const auto& [entry, candidates] : run.scores) {
        for (const auto& [candidate, score] : candidates) {
            if (!usable_field(entry) || !usable_field(candidate)) {
                throw DataError("identifier in pair " + pair_name(entry, candidate) +
                                " is empty or contains a tab or newline");
            }
            out << entry << '\t' << candidate << '\t' << format_score(score) << '\t' << run.model_id << '\n';
        }
    }
}

void write_run(const Run& run, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write run file " + path.string());
    }
    write_run(run, out);
}

void check_coverage(const Run& run, const Dataset& dataset) {
    for (const auto& entry : dataset.entries) {
        const auto* scored = run.find_entry(entry.id);
        if (!scored) {
            throw DataError("run '" + run.model_id + "' has no scores for entry " + entry.id);
        }
        for (const auto& candidate : entry.candidates) {
            if (!scored->contains(candidate.id)) {
                throw DataError("run '" + run.model_id + "' is missing pair " + pair_name(entry.id, candidate.id));
            }
        }
        if (scored->size() != entry.candidates.size()) {
            for (const auto& [candidate, score] : *scored) {
                if (!entry.find_candidate(candidate)) {
                    throw DataError("run '" + run.model_id + "' scores unknown pair " +
                                    pair_name(entry.id, candidate));
                }
            }
        }
    }
    if (run.scores.size() != dataset.entries.size()) {
        for (const auto& [entry, candidates] : run.scores) {
            if (!dataset.find_entry(entry)) {
                throw DataError("run '" + run.model_id + "' scores unknown entry " + entry);
            }
        }
    }
}

Run normalize_min_max(const Run& run) {
    Run out;
    out.model_id = run.model_id;
    for (const auto& [entry, candidates] : run.scores) {
        if (candidates.empty()) {
            continue;
        }
        auto [lo, hi] = std::minmax_element(candidates.begin(), candidates.end(),
                                            [](const auto& a, const auto& b) { return a.second < b.second; });
        const double min = lo->second;
        const double range = hi->second - min;
        auto& target = out.scores[entry];
        for (const auto& [candidate, score] : candidates) {
            target.emplace(candidate, range > 0.0 ? (score - min) / range : 1.0);
        }
    }
    return out;
}

}  // namespace entail
