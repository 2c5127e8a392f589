#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

#include "entail/corpus.hpp"
#include "entail/metrics.hpp"
#include "entail/prediction.hpp"
#include "entail/run.hpp"

namespace entail {

/// Answer-selection rules applied to one entry's scored candidates:
///   1. keep scores >= alpha            (disabled when alpha == 0)
///   2. keep the top beta by score      (ties keep input order)
///   3. keep scores >= gamma * top      (disabled when gamma == 0)
/// A candidate is selected when it passes all three.
struct SelectionParams {
    double alpha = 0.0;
    std::size_t beta = 1;
    double gamma = 0.0;

    bool operator==(const SelectionParams&) const = default;

    /// Throws UsageError unless alpha >= 0, beta >= 1 and 0 <= gamma < 1.
    void validate() const;

    /// Pure argmax, i.e. (0, 1, 0).
    static constexpr SelectionParams baseline() { return {0.0, 1, 0.0}; }
};

nlohmann::json to_json(const SelectionParams& params);
SelectionParams selection_params_from_json(const nlohmann::json& json);

/// Returns the selected candidates ordered by descending score, ties in input
/// order. May be empty.
std::vector<ScoredCandidate> select_answers(std::span<const ScoredCandidate> scored,
                                            const SelectionParams& params);

/// Applies select_answers to every entry, feeding candidates in dataset pool
/// order. Throws DataError if the run does not cover the dataset exactly.
std::vector<Prediction> select_run(const Run& run, const Dataset& dataset, const SelectionParams& params);

struct GridSpec {
    std::vector<double> alphas;
    std::vector<std::size_t> betas;
    std::vector<double> gammas;

    /// Throws UsageError on empty or non-increasing lists or values outside
    /// the SelectionParams ranges.
    void validate() const;
    std::size_t size() const { return alphas.size() * betas.size() * gammas.size(); }

    /// alpha 0..0.9 step 0.1, beta 1..10, gamma 0..0.9 step 0.1 followed by
    /// 0.95, 0.99, 0.995, 0.999, 0.9995, 0.9999.
    static GridSpec standard();
};

struct GridRow {
    SelectionParams params;
    EvalResult eval;
};

struct GridResult {
    SelectionParams best;
    double best_f1 = 0.0;
    /// Every triple, alphas outermost and gammas innermost.
    std::vector<GridRow> table;
};

/// Exhaustive sweep over the Cartesian product of the grid, scored by micro
/// F1 on the labeled dataset. The best triple is the earliest row in sweep
/// order among those with maximal F1, which is the lexicographically smallest
/// (alpha, beta, gamma).
GridResult grid_search(const Run& run, const Dataset& dataset, const GridSpec& grid,
                       std::size_t threads = 1);

/// CSV `alpha,beta,gamma,precision,recall,f1`, one line per row.
void write_grid_csv(std::span<const GridRow> table, std::ostream& out);

}  // namespace entail
