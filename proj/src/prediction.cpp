#include "entail/prediction.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "entail/errors.hpp"
#include "entail/run.hpp"

namespace entail {

std::vector<Prediction> read_predictions(std::istream& in, std::string_view source) {
    std::vector<Prediction> predictions;
    std::map<std::string, std::size_t, std::less<>> index;
    std::set<std::pair<std::string, std::string>> seen;
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
        const auto first_tab = line.find('\t');
        const auto second_tab = first_tab == std::string::npos ? first_tab : line.find('\t', first_tab + 1);
        if (second_tab == std::string::npos || line.find('\t', second_tab + 1) != std::string::npos ||
            first_tab == 0 || second_tab == first_tab + 1) {
            fail("malformed prediction line, expected entry_id<TAB>candidate_id<TAB>score");
        }
        std::string entry_id = line.substr(0, first_tab);
        std::string candidate_id = line.substr(first_tab + 1, second_tab - first_tab - 1);
        const auto score = parse_score(std::string_view(line).substr(second_tab + 1));
        if (!score || !std::isfinite(*score)) {
            fail("malformed or non-finite score");
        }
        if (!seen.emplace(entry_id, candidate_id).second) {
            fail("duplicate prediction (" + entry_id + ", " + candidate_id + ")");
        }
        auto [it, inserted] = index.try_emplace(entry_id, predictions.size());
        if (inserted) {
            predictions.push_back({entry_id, {}});
        }
        predictions[it->second].selected.push_back({std::move(candidate_id), *score});
    }
    return predictions;
}

std::vector<Prediction> read_predictions(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot read prediction file " + path.string());
    }
    return read_predictions(in, path.string());
}

void write_predictions(std::span<const Prediction> predictions, std::ostream& out) {
    for (const auto& prediction : predictions) {
        for (const auto& answer : prediction.selected) {
            out << prediction.entry_id << '\t' << answer.id << '\t' << format_score(answer.score) << '\n';
        }
    }
}

void write_predictions(std::span<const Prediction> predictions, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write prediction file " + path.string());
    }
    write_predictions(predictions, out);
}

}  // namespace entail
