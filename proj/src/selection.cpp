#include "entail/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "entail/errors.hpp"
#include "entail/parallel.hpp"

namespace entail {
namespace {

// Candidate indices by descending score, ties in input order.
std::vector<std::size_t> rank_order(std::span<const ScoredCandidate> scored) {
    std::vector<std::size_t> order(scored.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scored[a].score > scored[b].score; });
    return order;
}

template <typename T>
void require_increasing(const std::vector<T>& values, const char* name) {
    if (values.empty()) {
        throw UsageError(std::string("grid: ") + name + " list is empty");
    }
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (!(values[i - 1] < values[i])) {
            throw UsageError(std::string("grid: ") + name + " values must be strictly increasing");
        }
    }
}

// Per-entry data for the sweep: scores sorted the same way select_answers
// sorts them, and the running count of gold candidates along that order.
struct RankedEntry {
    std::vector<double> scores;
    std::vector<std::size_t> correct_prefix;
    std::size_t n_gold = 0;
};

std::size_t count_at_least(const std::vector<double>& descending, double threshold) {
    auto it = std::partition_point(descending.begin(), descending.end(),
                                   [&](double s) { return s >= threshold; });
    return static_cast<std::size_t>(it - descending.begin());
}

}  // namespace

void SelectionParams::validate() const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw UsageError("selection: alpha must be a finite nonnegative number");
    }
    if (beta < 1) {
        throw UsageError("selection: beta must be at least 1");
    }
    if (!(gamma >= 0.0 && gamma < 1.0)) {
        throw UsageError("selection: gamma must lie in [0, 1)");
    }
}

nlohmann::json to_json(const SelectionParams& params) {
    return {{"alpha", params.alpha}, {"beta", params.beta}, {"gamma", params.gamma}};
}

SelectionParams selection_params_from_json(const nlohmann::json& json) {
    SelectionParams params;
    try {
        params.alpha = json.at("alpha").get<double>();
        params.beta = json.at("beta").get<std::size_t>();
        params.gamma = json.at("gamma").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("selection parameters: ") + e.what());
    }
    params.validate();
    return params;
}

std::vector<ScoredCandidate> select_answers(std::span<const ScoredCandidate> scored,
                                            const SelectionParams& params) {
    std::vector<ScoredCandidate> selected;
    if (scored.empty()) {
        return selected;
    }
    const auto order = rank_order(scored);
    const double relative_cutoff = params.gamma * scored[order.front()].score;
    // Every rule is monotone in rank, so the selection is a prefix of `order`.
    for (std::size_t rank = 0; rank < order.size() && rank < params.beta; ++rank) {
        const auto& candidate = scored[order[rank]];
        if (params.alpha > 0.0 && !(candidate.score >= params.alpha)) {
            break;
        }
        if (params.gamma > 0.0 && !(candidate.score >= relative_cutoff)) {
            break;
        }
        selected.push_back(candidate);
    }
    return selected;
}

std::vector<Prediction> select_run(const Run& run, const Dataset& dataset, const SelectionParams& params) {
    params.validate();
    check_coverage(run, dataset);
    std::vector<Prediction> predictions;
    predictions.reserve(dataset.entries.size());
    for (const auto& entry : dataset.entries) {
        const auto& scores = *run.find_entry(entry.id);
        std::vector<ScoredCandidate> scored;
        scored.reserve(entry.candidates.size());
        for (const auto& candidate : entry.candidates) {
            scored.push_back({candidate.id, scores.find(candidate.id)->second});
        }
        predictions.push_back({entry.id, select_answers(scored, params)});
    }
    return predictions;
}

void GridSpec::validate() const {
    require_increasing(alphas, "alpha");
    require_increasing(betas, "beta");
    require_increasing(gammas, "gamma");
    for (double a : alphas) {
        SelectionParams{a, 1, 0.0}.validate();
    }
    for (std::size_t b : betas) {
        SelectionParams{0.0, b, 0.0}.validate();
    }
    for (double g : gammas) {
        SelectionParams{0.0, 1, g}.validate();
    }
}

GridSpec GridSpec::standard() {
    return {
        {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9},
        {1, 2, 3, 4, 5, 6, 7, 8, 9, 10},
        {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 0.995, 0.999, 0.9995, 0.9999},
    };
}

GridResult grid_search(const Run& run, const Dataset& dataset, const GridSpec& grid, std::size_t threads) {
    grid.validate();
    check_coverage(run, dataset);

    std::vector<RankedEntry> ranked;
    ranked.reserve(dataset.entries.size());
    std::size_t n_relevant = 0;
    for (const auto& entry : dataset.entries) {
        if (!entry.gold) {
            throw DataError("grid search: entry " + entry.id + " has no gold labels");
        }
        const auto& scores = *run.find_entry(entry.id);
        std::vector<ScoredCandidate> scored;
        for (const auto& candidate : entry.candidates) {
            scored.push_back({candidate.id, scores.find(candidate.id)->second});
        }
        RankedEntry r;
        r.n_gold = entry.gold->size();
        r.correct_prefix.push_back(0);
        for (std::size_t i : rank_order(scored)) {
            r.scores.push_back(scored[i].score);
            r.correct_prefix.push_back(r.correct_prefix.back() + (entry.gold->contains(scored[i].id) ? 1 : 0));
        }
        n_relevant += r.n_gold;
        ranked.push_back(std::move(r));
    }

    GridResult result;
    result.table.resize(grid.size());
    const std::size_t per_alpha = grid.betas.size() * grid.gammas.size();
    parallel_for(result.table.size(), threads, [&](std::size_t row) {
        const SelectionParams params{grid.alphas[row / per_alpha],
                                     grid.betas[(row / grid.gammas.size()) % grid.betas.size()],
                                     grid.gammas[row % grid.gammas.size()]};
        std::size_t retrieved = 0;
        std::size_t correct = 0;
        for (const auto& entry : ranked) {
            std::size_t k = std::min(params.beta, entry.scores.size());
            if (params.alpha > 0.0) {
                k = std::min(k, count_at_least(entry.scores, params.alpha));
            }
            if (params.gamma > 0.0 && !entry.scores.empty()) {
                k = std::min(k, count_at_least(entry.scores, params.gamma * entry.scores.front()));
            }
            retrieved += k;
            correct += entry.correct_prefix[k];
        }
        result.table[row] = {params, EvalResult::from_counts(retrieved, n_relevant, correct)};
    });

    // Sweep order is lexicographic order, so the first maximum wins ties.
    auto best = result.table.begin();
    for (auto it = result.table.begin(); it != result.table.end(); ++it) {
        if (it->eval.f1 > best->eval.f1) {
            best = it;
        }
    }
    result.best = best->params;
    result.best_f1 = best->eval.f1;
    return result;
}

void write_grid_csv(std::span<const GridRow> table, std::ostream& out) {
    out << "alpha,beta,gamma,precision,recall,f1\n";
    for (const auto& row : table) {
        out << format_score(row.params.alpha) << ',' << row.params.beta << ',' << format_score(row.params.gamma)
            << ',' << format_score(row.eval.precision) << ',' << format_score(row.eval.recall) << ','
            << format_score(row.eval.f1) << '\n';
    }
}

}  // namespace entail
