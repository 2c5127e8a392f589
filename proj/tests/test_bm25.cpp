#include <doctest.h>

#include <cmath>
#include <random>

#include "entail/bm25.hpp"
#include "entail/errors.hpp"
#include "test_support.hpp"

using namespace entail;

namespace {

Entry pool(const std::string& query, const std::vector<std::string>& docs) {
    Entry e{"e", query, {}, std::nullopt};
    for (std::size_t i = 0; i < docs.size(); ++i) {
        e.candidates.push_back({"c" + std::to_string(i), docs[i]});
    }
    return e;
}

std::string random_text(std::mt19937_64& rng, std::size_t max_len) {
    static const std::vector<std::string> words{"contract", "breach", "tort", "duty", "care", "court",
                                                "appeal",   "judge",  "fact", "law",  "party", "claim"};
    std::string out;
    const std::size_t n = rng() % (max_len + 1);
    for (std::size_t i = 0; i < n; ++i) {
        out += words[rng() % words.size()] + (rng() % 4 == 0 ? ", " : " ");
    }
    return out;
}

}  // namespace

TEST_CASE("hand-computed single-term score") {
    // N = 3, df("contract") = 1, every document has length 2 = avgdl.
    const auto scores = bm25_score_entry(pool("contract", {"contract law", "tort law", "equity law"}), {});
    REQUIRE(scores.size() == 3);
    CHECK(scores[0].score == doctest::Approx(std::log(8.0 / 3.0)).epsilon(1e-12));
    CHECK(std::abs(scores[0].score - 0.98083) < 1e-5);
    CHECK(scores[1].score == 0.0);
    CHECK(scores[2].score == 0.0);
}

TEST_CASE("term present in every document keeps a positive idf") {
    const auto scores = bm25_score_entry(pool("contract", {"contract a", "contract b", "contract c"}), {});
    const double idf = std::log(1.0 + 0.5 / 3.5);
    for (const auto& s : scores) {
        CHECK(s.score == doctest::Approx(idf).epsilon(1e-12));
        CHECK(s.score > 0.0);
    }
}

TEST_CASE("repeated query terms count once") {
    const auto once = bm25_score_entry(pool("contract", {"contract law", "tort law"}), {});
    const auto twice = bm25_score_entry(pool("contract contract", {"contract law", "tort law"}), {});
    CHECK(once[0].score == twice[0].score);
}

TEST_CASE("pool of empty-token candidates scores zero without NaN") {
    const auto scores = bm25_score_entry(pool("contract", {"!!!", "---"}), {});
    for (const auto& s : scores) {
        CHECK(s.score == 0.0);
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(bm25_score_entry(pool("a", {"a"}), {-1.0, 0.4, {}}), UsageError);
    CHECK_THROWS_AS(bm25_score_entry(pool("a", {"a"}), {0.9, 1.5, {}}), UsageError);
}

TEST_CASE("scores are finite and nonnegative on random pools") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 300; ++i) {
        std::vector<std::string> docs(1 + rng() % 8);
        for (auto& d : docs) {
            d = random_text(rng, 30);
        }
        Bm25Params params{static_cast<double>(rng() % 30) / 10.0, static_cast<double>(rng() % 11) / 10.0, {}};
        for (const auto& s : bm25_score_entry(pool(random_text(rng, 8), docs), params)) {
            CHECK(std::isfinite(s.score));
            CHECK(s.score >= 0.0);
        }
    }
}

TEST_CASE("adding a non-matching candidate leaves other tf terms alone") {
    // With b = 0 length normalization drops out, and a new document without
    // query terms leaves every df unchanged, so only N moves.
    Bm25Params params{1.2, 0.0, {}};
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        std::vector<std::string> docs(1 + rng() % 6);
        for (auto& d : docs) {
            d = random_text(rng, 20);
        }
        const Entry before = pool("contract breach", docs);
        docs.push_back("unrelated words only");
        const auto a = bm25_score_entry(before, params);
        const auto b = bm25_score_entry(pool("contract breach", docs), params);
        for (std::size_t k = 0; k < a.size(); ++k) {
            // idf grows with N, so scores can only rise; zero stays zero.
            CHECK(b[k].score >= a[k].score);
            CHECK((a[k].score == 0.0) == (b[k].score == 0.0));
        }
        CHECK(b.back().score == 0.0);
    }
}

TEST_CASE("raising tf at fixed pool statistics never lowers the score") {
    // Swap a non-query word for a query word the document already contains:
    // lengths, avgdl and df are unchanged and tf rises by one.
    Bm25Params params;
    const auto base = bm25_score_entry(pool("contract", {"contract law law", "tort fact"}), params);
    const auto more = bm25_score_entry(pool("contract", {"contract contract law", "tort fact"}), params);
    CHECK(more[0].score > base[0].score);
    CHECK(more[1].score == base[1].score);
}

TEST_CASE("dataset scoring covers every pair and ignores thread count") {
    Dataset d;
    d.split = Split::test;
    d.entries.push_back(pool("contract", {"contract a", "b", "c"}));
    d.entries[0].id = "e1";
    d.entries.push_back(pool("tort", {"tort", "x", "y", "tort tort"}));
    d.entries[1].id = "e2";
    const Run run = bm25_score_dataset(d, {}, "bm25");
    CHECK(run.size() == 7);
    CHECK(run.model_id == "bm25");
    CHECK_NOTHROW(check_coverage(run, d));
    CHECK(bm25_score_dataset(d, {}, "bm25") == run);

    const Dataset big = generate_synthetic({60, 20.0, 1.2, 2000, 4});
    CHECK(bm25_score_dataset(big, {}, "m", 1) == bm25_score_dataset(big, {}, "m", 4));
}

TEST_CASE("planted synthetic positives rank first for BM25 at seed 7") {
    SyntheticConfig cfg;
    cfg.seed = 7;
    const Dataset d = generate_synthetic(cfg);
    const Run run = bm25_score_dataset(d, {}, "bm25");
    std::size_t hits = 0;
    for (const auto& e : d.entries) {
        const auto& scores = run.scores.at(e.id);
        std::string best = e.candidates.front().id;
        for (const auto& c : e.candidates) {
            if (scores.at(c.id) > scores.at(best)) {
                best = c.id;
            }
        }
        hits += e.gold->count(best);
    }
    const double rate = static_cast<double>(hits) / static_cast<double>(d.entries.size());
    MESSAGE("gold-first rate: " << rate);
    CHECK(rate >= 0.80);
}
