#include <doctest.h>

#include <random>

#include "entail/bm25.hpp"
#include "entail/errors.hpp"
#include "entail/selection.hpp"
#include "test_support.hpp"

using namespace entail;
using test::ids_of;
using test::naive_select;
using Ids = std::set<std::string>;

namespace {

std::vector<ScoredCandidate> example() { return {{"c1", 0.9}, {"c2", 0.85}, {"c3", 0.30}}; }

}  // namespace

TEST_CASE("three-rule selection examples") {
    CHECK(ids_of(select_answers(example(), {0.5, 2, 0.9})) == Ids{"c1", "c2"});
    CHECK(ids_of(select_answers(example(), {0.5, 3, 0.9})) == Ids{"c1", "c2"});
    CHECK(ids_of(select_answers(example(), {0.0, 3, 0.0})) == Ids{"c1", "c2", "c3"});
    CHECK(select_answers(example(), {0.95, 3, 0.0}).empty());
    // Rank order, ties in input order.
    const std::vector<ScoredCandidate> tied{{"a", 0.2}, {"b", 0.7}, {"c", 0.7}};
    const auto picked = select_answers(tied, {0.0, 2, 0.0});
    REQUIRE(picked.size() == 2);
    CHECK(picked[0].id == "b");
    CHECK(picked[1].id == "c");
}

TEST_CASE("baseline triple is pure argmax") {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 200; ++i) {
        const auto scores = test::random_scores(rng);
        const auto picked = select_answers(scores, SelectionParams::baseline());
        REQUIRE(picked.size() == 1);
        const auto best = std::max_element(scores.begin(), scores.end(),
                                           [](const auto& a, const auto& b) { return a.score < b.score; });
        CHECK(picked[0].id == best->id);
    }
}

TEST_CASE("comparisons are inclusive") {
    const std::vector<ScoredCandidate> s{{"a", 0.5}, {"b", 0.25}};
    CHECK(ids_of(select_answers(s, {0.5, 5, 0.0})) == Ids{"a"});
    CHECK(ids_of(select_answers(s, {0.0, 5, 0.5})) == Ids{"a", "b"});
    // An exact tie at the top survives gamma = 0.9999.
    const std::vector<ScoredCandidate> top_tie{{"a", 0.8}, {"b", 0.8}, {"c", 0.7999}};
    CHECK(ids_of(select_answers(top_tie, {0.0, 5, 0.9999})) == Ids{"a", "b"});
}

TEST_CASE("zero alpha and gamma disable their rules even for negative scores") {
    const std::vector<ScoredCandidate> s{{"a", -1.0}, {"b", -3.0}};
    CHECK(ids_of(select_answers(s, {0.0, 5, 0.0})) == Ids{"a", "b"});
}

TEST_CASE("selection agrees with naive enumeration and satisfies its properties") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 1000; ++i) {
        const auto scores = test::random_scores(rng);
        const SelectionParams p = test::random_grid_params(rng);
        const auto picked = select_answers(scores, p);
        CHECK(ids_of(picked) == naive_select(scores, p));
        CHECK(select_answers(picked, p) == picked);
        CHECK(picked.size() <= p.beta);

        double top = scores[0].score;
        for (const auto& s : scores) {
            top = std::max(top, s.score);
        }
        if (!picked.empty()) {
            CHECK(picked.front().score == top);
        }
        if (p.alpha > 0.0 && top < p.alpha) {
            CHECK(picked.empty());
        }

        const Ids base = ids_of(picked);
        auto subset = [](const Ids& a, const Ids& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); };
        CHECK(subset(base, ids_of(select_answers(scores, {p.alpha, p.beta + 1, p.gamma}))));
        CHECK(subset(ids_of(select_answers(scores, {p.alpha + 0.05, p.beta, p.gamma})), base));
        CHECK(subset(ids_of(select_answers(scores, {p.alpha, p.beta, std::min(0.9999, p.gamma + 0.05)})), base));
    }
}

TEST_CASE("scaling scores changes nothing when alpha = 0") {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 300; ++i) {
        auto scores = test::random_scores(rng);
        SelectionParams p = test::random_grid_params(rng);
        p.alpha = 0.0;
        const Ids before = ids_of(select_answers(scores, p));
        for (auto& s : scores) {
            s.score *= 4.0;  // power of two keeps products exact
        }
        CHECK(ids_of(select_answers(scores, p)) == before);
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(SelectionParams({-0.1, 1, 0.0}).validate(), UsageError);
    CHECK_THROWS_AS(SelectionParams({0.0, 0, 0.0}).validate(), UsageError);
    CHECK_THROWS_AS(SelectionParams({0.0, 1, 1.0}).validate(), UsageError);
    CHECK(selection_params_from_json(nlohmann::json::parse(R"({"alpha":0,"beta":4,"gamma":0.995})")) ==
          SelectionParams{0.0, 4, 0.995});
    CHECK_THROWS_AS(selection_params_from_json(nlohmann::json::parse(R"({"alpha":0})")), UsageError);
    CHECK(to_json(SelectionParams{0.07, 2, 0.99}).dump() == R"({"alpha":0.07,"beta":2,"gamma":0.99})");
}

TEST_CASE("select_run applies selection per entry") {
    std::mt19937_64 rng(4);
    auto [data, run] = test::random_labeled_run(rng, 2);
    const auto preds = select_run(run, data, SelectionParams::baseline());
    REQUIRE(preds.size() == 2);
    for (const auto& p : preds) {
        CHECK(p.selected.size() == 1);
    }

    Run partial = run;
    partial.scores.erase(data.entries[1].id);
    CHECK_THROWS_WITH_AS(select_run(partial, data, SelectionParams::baseline()),
                         doctest::Contains(data.entries[1].id.c_str()), DataError);
}

TEST_CASE("baseline F1 on a BM25 run equals the top-1 agreement formula") {
    const Dataset data = generate_synthetic({200, 20.0, 1.4, 5000, 13});
    const Run run = bm25_score_dataset(data, {}, "bm25");
    // Independent count: first maximal candidate per entry, hit if gold.
    double hits = 0.0;
    double gold_total = 0.0;
    for (const auto& e : data.entries) {
        const auto& s = run.scores.at(e.id);
        std::string best = e.candidates[0].id;
        for (const auto& c : e.candidates) {
            if (s.at(c.id) > s.at(best)) {
                best = c.id;
            }
        }
        hits += static_cast<double>(e.gold->count(best));
        gold_total += static_cast<double>(e.gold->size());
    }
    const double n = static_cast<double>(data.entries.size());
    const auto result = evaluate(select_run(run, data, SelectionParams::baseline()), data);
    CHECK(result.f1 == doctest::Approx(2.0 * hits / (n + gold_total)).epsilon(1e-12));
}

TEST_CASE("grid spec validation and the standard grid") {
    const auto g = GridSpec::standard();
    CHECK_NOTHROW(g.validate());
    CHECK(g.size() == 10 * 10 * 16);
    CHECK(g.gammas.back() == 0.9999);
    CHECK(g.alphas[3] == 0.3);
    CHECK_THROWS_AS((GridSpec{{}, {1}, {0.0}}.validate()), UsageError);
    CHECK_THROWS_AS((GridSpec{{0.0}, {2, 1}, {0.0}}.validate()), UsageError);
    CHECK_THROWS_AS((GridSpec{{0.0}, {1}, {0.5, 0.5}}.validate()), UsageError);
    CHECK_THROWS_AS((GridSpec{{0.0}, {1}, {1.0}}.validate()), UsageError);
}

TEST_CASE("grid search") {
    std::mt19937_64 rng(77);
    auto [data, run] = test::random_labeled_run(rng, 20);

    SUBCASE("singleton grid") {
        const GridSpec g{{0.1}, {3}, {0.5}};
        const auto r = grid_search(run, data, g);
        CHECK(r.best == SelectionParams{0.1, 3, 0.5});
        REQUIRE(r.table.size() == 1);
        CHECK(r.best_f1 == evaluate(select_run(run, data, r.best), data).f1);
    }
    SUBCASE("matches the brute-force sweep row for row") {
        const GridSpec g{{0.0, 0.3, 0.6}, {1, 2, 4}, {0.0, 0.5, 0.9}};
        const auto r = grid_search(run, data, g);
        const auto oracle = test::naive_grid(run, data, g);
        REQUIRE(r.table.size() == oracle.size());
        std::size_t best_row = 0;
        for (std::size_t i = 0; i < oracle.size(); ++i) {
            CHECK(r.table[i].params == oracle[i].params);
            CHECK(r.table[i].eval.f1 == oracle[i].f1);
            CHECK(r.table[i].eval.n_correct == oracle[i].correct);
            CHECK(r.table[i].eval.n_retrieved == oracle[i].retrieved);
            CHECK(r.table[i].eval.n_relevant == oracle[i].relevant);
            if (oracle[i].f1 > oracle[best_row].f1) {
                best_row = i;
            }
        }
        CHECK(r.best == oracle[best_row].params);
    }
    SUBCASE("standard grid contains the baseline") {
        const auto r = grid_search(run, data, GridSpec::standard());
        CHECK(r.best_f1 >= evaluate(select_run(run, data, SelectionParams::baseline()), data).f1);
        CHECK(grid_search(run, data, GridSpec::standard(), 4).best == r.best);
    }
    SUBCASE("ties resolve to the lexicographically smallest triple") {
        // Every entry has a single candidate, so every triple with alpha <= min score ties.
        Dataset flat;
        Run flat_run;
        for (int e = 0; e < 3; ++e) {
            const std::string id = "e" + std::to_string(e);
            flat.entries.push_back({id, "q", {{"c", "x"}}, Ids{"c"}});
            flat_run.insert(id, "c", 0.8);
        }
        const auto r = grid_search(flat_run, flat, {{0.0, 0.5}, {1, 2}, {0.0, 0.5}}, 3);
        CHECK(r.best == SelectionParams{0.0, 1, 0.0});
        CHECK(r.best_f1 == 1.0);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(grid_search(run, data, {{}, {1}, {0.0}}), UsageError);
        Dataset unlabeled = data;
        unlabeled.entries[3].gold.reset();
        CHECK_THROWS_WITH_AS(grid_search(run, unlabeled, GridSpec::standard()),
                             doctest::Contains(data.entries[3].id.c_str()), DataError);
    }
}

TEST_CASE("grid CSV layout") {
    std::ostringstream out;
    const std::vector<GridRow> rows{{{0.0, 1, 0.995}, EvalResult::from_counts(4, 5, 3)}};
    write_grid_csv(rows, out);
    CHECK(out.str() == "alpha,beta,gamma,precision,recall,f1\n0,1,0.995,0.75,0.6,0.6666666666666666\n");
}
