#include <doctest.h>

#include <algorithm>
#include <random>

#include "entail/ensemble.hpp"
#include "entail/errors.hpp"
#include "test_support.hpp"

using namespace entail;
using Ids = std::set<std::string>;

namespace {

AnswerSet single(const std::string& model, const std::string& entry, std::vector<ScoredCandidate> answers) {
    AnswerSet s;
    s.model_id = model;
    s.answers[entry] = std::move(answers);
    return s;
}

}  // namespace

TEST_CASE("two models contribute one answer each") {
    const std::vector<AnswerSet> sets{single("m1", "e", {{"c1", 0.9}}), single("m2", "e", {{"c2", 0.8}})};
    const auto out = combine(sets, {0.0, 3, 0.5});
    REQUIRE(out.size() == 1);
    CHECK(test::ids_of(out[0].selected) == Ids{"c1", "c2"});
}

TEST_CASE("duplicates keep the highest score") {
    const std::vector<AnswerSet> sets{single("m1", "e", {{"c1", 0.6}}), single("m2", "e", {{"c1", 0.9}})};
    const auto out = combine(sets, {0.0, 3, 0.0});
    REQUIRE(out[0].selected.size() == 1);
    CHECK(out[0].selected[0] == ScoredCandidate{"c1", 0.9});
}

TEST_CASE("coverage mismatch is an error") {
    AnswerSet a = single("m1", "e1", {{"c1", 0.6}});
    AnswerSet b = single("m2", "e2", {{"c1", 0.6}});
    const std::vector<AnswerSet> sets{a, b};
    CHECK_THROWS_WITH_AS(combine(sets, {0.0, 1, 0.0}), doctest::Contains("e2"), DataError);
    CHECK_THROWS_AS(combine(std::span<const AnswerSet>{}, {0.0, 1, 0.0}), UsageError);
}

TEST_CASE("ensemble properties over seeded cases") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 200; ++i) {
        auto [data, run_a] = test::random_labeled_run(rng, 1 + rng() % 6);
        // Second model: same pool, fresh scores.
        Run run_b;
        run_b.model_id = "b";
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (const auto& e : data.entries) {
            for (const auto& c : e.candidates) {
                run_b.insert(e.id, c.id, std::round(unit(rng) * 10.0) / 10.0);
            }
        }
        const SelectionParams pa = test::random_grid_params(rng);
        const SelectionParams pb = test::random_grid_params(rng);
        const SelectionParams pe = test::random_grid_params(rng);
        const auto own_a = select_run(run_a, data, pa);
        const AnswerSet A = answer_set_from_predictions("a", own_a);
        const AnswerSet B = answer_set_from_predictions("b", select_run(run_b, data, pb));

        const std::vector<AnswerSet> just_a{A};
        const std::vector<AnswerSet> a_twice{A, A};
        CHECK(combine(a_twice, pe) == combine(just_a, pe));
        CHECK(combine(just_a, pa) == own_a);

        std::vector<AnswerSet> ab{A, B};
        std::vector<AnswerSet> ba{B, A};
        const auto merged = combine(ab, pe);
        CHECK(merged == combine(ba, pe));

        for (const auto& pred : merged) {
            for (const auto& ans : pred.selected) {
                std::optional<double> best;
                for (const auto* set : {&A, &B}) {
                    for (const auto& x : set->answers.at(pred.entry_id)) {
                        if (x.id == ans.id) {
                            best = std::max(best.value_or(x.score), x.score);
                        }
                    }
                }
                REQUIRE(best.has_value());  // containment
                CHECK(ans.score == *best);  // score provenance
            }
        }
    }
}

TEST_CASE("answer-set files") {
    Dataset data;
    data.split = Split::test;
    data.entries.push_back({"e1", "q", {{"c1", "a"}, {"c2", "b"}}, std::nullopt});
    data.entries.push_back({"e2", "q", {{"c1", "a"}}, std::nullopt});
    test::TempDir dir;

    test::spit(dir / "m1.pred", "e1\tc2\t0.9\n");
    const AnswerSet loose = read_answer_set(dir / "m1.pred");
    CHECK(loose.model_id == "m1");
    CHECK(loose.answers.size() == 1);
    const AnswerSet filled = read_answer_set(dir / "m1.pred", &data);
    CHECK(filled.answers.size() == 2);
    CHECK(filled.answers.at("e2").empty());

    test::spit(dir / "m2.run", "e1\tc1\t0.5\tmono\ne2\tc1\t0.7\tmono\n");
    const AnswerSet from_run = read_answer_set(dir / "m2.run", &data);
    CHECK(from_run.model_id == "mono");
    const std::vector<AnswerSet> sets{filled, from_run};
    const auto out = combine(sets, {0.0, 2, 0.0});
    CHECK(test::ids_of(out[0].selected) == Ids{"c1", "c2"});
    CHECK(test::ids_of(out[1].selected) == Ids{"c1"});

    test::spit(dir / "bad.pred", "e9\tc1\t0.5\n");
    CHECK_THROWS_WITH_AS(read_answer_set(dir / "bad.pred", &data), doctest::Contains("e9"), DataError);
}

TEST_CASE("answer-set normalization") {
    const AnswerSet s = single("bm25", "e", {{"a", 4.0}, {"b", 2.0}, {"c", 3.0}});
    const auto n = normalize_min_max(s);
    CHECK(n.answers.at("e")[0].score == 1.0);
    CHECK(n.answers.at("e")[1].score == 0.0);
    CHECK(n.answers.at("e")[2].score == 0.5);
}
