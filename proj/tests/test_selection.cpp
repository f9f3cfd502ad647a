// Active selection: Explore, Consolidate, closest distinct pairs.
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "fixtures.hpp"
#include "fsc/error.hpp"
#include "fsc/oracle.hpp"
#include "fsc/selection.hpp"

using namespace fsc;

namespace {

GoldOracle gold_oracle(const DocumentSet& docs) {
    return GoldOracle(GoldLabeling::from_documents(docs));
}

// Oracle wrapper that counts queries and can abstain on marked pairs.
class CountingOracle : public PairOracle {
public:
    explicit CountingOracle(PairOracle& inner) : inner_(inner) {}
    int calls = 0;
    std::set<std::pair<std::string, std::string>> abstain_pairs;

    PairJudgment judge(const PairQuery& q) override {
        ++calls;
        if (abstain_pairs.count({q.a, q.b})) {
            PairJudgment j{q, Answer::abstain, "unsure", false};
            return j;
        }
        return inner_.judge(q);
    }

private:
    PairOracle& inner_;
};

}  // namespace

TEST_CASE("explore discovers one neighborhood per gold cluster") {
    const auto fixture = fixtures::make_blobs(40, 4, 5, 11);
    auto gold = gold_oracle(fixture.docs);
    const SelectionResult res = explore(fixture.X, fixture.docs, gold, 60, 0);

    REQUIRE(res.neighborhoods.size() == 4);
    // farthest-first over separable blobs touches each blob once before
    // ever rejoining one, so every neighborhood is label-pure
    const GoldLabeling labels = GoldLabeling::from_documents(fixture.docs);
    std::set<std::string> founders_labels;
    for (const auto& hood : res.neighborhoods) {
        REQUIRE_FALSE(hood.empty());
        const std::string expected = labels.at(hood.front());
        for (const auto& id : hood) CHECK(labels.at(id) == expected);
        founders_labels.insert(expected);
    }
    CHECK(founders_labels.size() == 4);
    CHECK(res.judgments.size() <= 60);
}

TEST_CASE("explore and consolidate respect the budget exactly") {
    const auto fixture = fixtures::make_blobs(30, 3, 4, 13);
    auto gold = gold_oracle(fixture.docs);
    for (const std::size_t budget : {1, 2, 5, 9}) {
        CountingOracle counter(gold);
        const SelectionResult res = explore(fixture.X, fixture.docs, counter, budget, 1);
        CHECK(res.judgments.size() == static_cast<std::size_t>(counter.calls));
        CHECK(res.judgments.size() <= budget);

        CountingOracle counter2(gold);
        auto hoods = res.neighborhoods;
        const SelectionResult grown =
            consolidate(fixture.X, fixture.docs, counter2, std::move(hoods), budget, 2);
        CHECK(grown.judgments.size() <= budget);
        CHECK(grown.judgments.size() == static_cast<std::size_t>(counter2.calls));
    }
    CHECK_THROWS_AS(explore(fixture.X, fixture.docs, gold, 0, 0), parameter_error);
}

TEST_CASE("explore is deterministic per seed") {
    const auto fixture = fixtures::make_blobs(24, 3, 4, 19);
    auto gold = gold_oracle(fixture.docs);
    const SelectionResult a = explore(fixture.X, fixture.docs, gold, 30, 7);
    const SelectionResult b = explore(fixture.X, fixture.docs, gold, 30, 7);
    REQUIRE(a.judgments.size() == b.judgments.size());
    for (std::size_t i = 0; i < a.judgments.size(); ++i) {
        CHECK(a.judgments[i].query.a == b.judgments[i].query.a);
        CHECK(a.judgments[i].query.b == b.judgments[i].query.b);
    }
    CHECK(a.neighborhoods == b.neighborhoods);
}

TEST_CASE("explore on a hand-built line follows farthest-first order") {
    // 1-D points 0, 1, 10, 11, 30; two gold groups {0,1,10,11} vs {30}
    std::vector<std::pair<std::string, std::string>> items = {
        {"p0", "g1"}, {"p1", "g1"}, {"p2", "g1"}, {"p3", "g1"}, {"p4", "g2"}};
    const auto docs = fixtures::tiny_docs(items);
    EmbeddingMatrix X(5, 1);
    const float vals[] = {0.0f, 1.0f, 10.0f, 11.0f, 30.0f};
    for (std::size_t i = 0; i < 5; ++i) X.row(i)[0] = vals[i];
    auto gold = gold_oracle(docs);

    // seed picks some start; farthest-first then walks the extremes. With a
    // generous budget both gold groups must emerge as neighborhoods.
    const SelectionResult res = explore(X, docs, gold, 20, 0);
    REQUIRE(res.neighborhoods.size() == 2);
    std::set<std::set<std::string>> got;
    for (const auto& hood : res.neighborhoods)
        got.insert(std::set<std::string>(hood.begin(), hood.end()));
    CHECK(got == std::set<std::set<std::string>>{{"p0", "p1", "p2", "p3"}, {"p4"}});
}

TEST_CASE("abstain answers do not admit points into neighborhoods") {
    const auto docs = fixtures::tiny_docs({{"a", "g1"}, {"b", "g1"}, {"c", "g1"}});
    EmbeddingMatrix X(3, 1);
    X.row(0)[0] = 0.0f;
    X.row(1)[0] = 1.0f;
    X.row(2)[0] = 5.0f;
    auto gold = gold_oracle(docs);
    CountingOracle counter(gold);
    counter.abstain_pairs = {{"a", "b"}, {"a", "c"}, {"b", "c"}};
    const SelectionResult res = explore(X, docs, counter, 10, 0);
    // every answer abstained: every point founds its own neighborhood
    CHECK(res.neighborhoods.size() == 3);
    for (const auto& hood : res.neighborhoods) CHECK(hood.size() == 1);
}

TEST_CASE("consolidate attaches unassigned points to the right neighborhood") {
    const auto fixture = fixtures::make_blobs(36, 3, 4, 29);
    auto gold = gold_oracle(fixture.docs);
    const SelectionResult explored = explore(fixture.X, fixture.docs, gold, 12, 3);
    REQUIRE_FALSE(explored.neighborhoods.empty());

    auto hoods = explored.neighborhoods;
    const SelectionResult grown =
        consolidate(fixture.X, fixture.docs, gold, std::move(hoods), 200, 3);

    const GoldLabeling labels = GoldLabeling::from_documents(fixture.docs);
    std::size_t members = 0;
    for (const auto& hood : grown.neighborhoods) {
        members += hood.size();
        const std::string expected = labels.at(hood.front());
        for (const auto& id : hood) CHECK(labels.at(id) == expected);  // purity preserved
    }
    // gold answers with a big budget attach almost everything
    CHECK(members > explored.neighborhoods.size());

    CHECK_THROWS_AS(consolidate(fixture.X, fixture.docs, gold, {}, 10, 0), parameter_error);
}

TEST_CASE("consolidate queries ascending centroid distance") {
    // neighborhoods at 0 and 100; the stray point at 40 is closer to 0
    const auto docs = fixtures::tiny_docs(
        {{"n0", "g1"}, {"n1", "g2"}, {"stray", "g2"}});
    EmbeddingMatrix X(3, 1);
    X.row(0)[0] = 0.0f;
    X.row(1)[0] = 100.0f;
    X.row(2)[0] = 40.0f;
    auto gold = gold_oracle(docs);
    CountingOracle counter(gold);
    std::vector<Neighborhood> hoods = {{"n0"}, {"n1"}};
    const SelectionResult res = consolidate(X, docs, counter, std::move(hoods), 10, 0);
    // first query must have gone to the nearer neighborhood (n0): the stray
    // is gold g2, so that answer is cannot-link and a second query follows
    REQUIRE(res.judgments.size() == 2);
    CHECK(res.judgments[0].query.b == "stray");
    CHECK(res.judgments[0].query.a == "n0");
    CHECK(res.judgments[0].answer == Answer::cannot_link);
    CHECK(res.judgments[1].answer == Answer::must_link);
    // stray ends up in n1's neighborhood
    bool found = false;
    for (const auto& hood : res.neighborhoods)
        if (hood.front() == "n1" && hood.size() == 2 && hood[1] == "stray") found = true;
    CHECK(found);
}

TEST_CASE("closest_distinct_pairs ranks cross-surface pairs by distance") {
    std::vector<Document> docs;
    auto add = [&docs](std::string id, std::string surface, float x) {
        Document d;
        d.id = std::move(id);
        d.text = "t";
        d.surface = std::move(surface);
        d.gold = "g";
        docs.push_back(std::move(d));
        return x;
    };
    EmbeddingMatrix X(4, 1);
    X.row(0)[0] = add("m1", "NYC", 0.0f);
    X.row(1)[0] = add("m2", "NYC", 0.5f);
    X.row(2)[0] = add("m3", "New York", 1.0f);
    X.row(3)[0] = add("m4", "Paris", 9.0f);
    const DocumentSet ds(std::move(docs));

    const auto pairs = closest_distinct_pairs(X, ds, 10);
    // same-surface pair (m1,m2) excluded; 5 cross-surface pairs remain
    REQUIRE(pairs.size() == 5);
    CHECK(pairs[0].a == "m2");  // distance 0.5 (m2,m3), the closest
    CHECK(pairs[0].b == "m3");
    CHECK(pairs[1].a == "m1");  // distance 1.0 (m1,m3)
    CHECK(pairs[1].b == "m3");
    for (const auto& p : pairs) CHECK(p.phase == QueryPhase::closest_pair);

    // truncation respects the budget and keeps the closest
    const auto top2 = closest_distinct_pairs(X, ds, 2);
    REQUIRE(top2.size() == 2);
    CHECK(top2[0].a == "m2");
    CHECK(top2[1].a == "m1");

    // ties broken by lexicographic id pair
    EmbeddingMatrix Y(3, 1);  // all at the same spot
    std::vector<Document> eq;
    for (const char* id : {"b", "a", "c"}) {
        Document d;
        d.id = id;
        d.text = "t";
        d.surface = std::string("s_") + id;
        eq.push_back(std::move(d));
    }
    const DocumentSet eqds(std::move(eq));
    const auto tied = closest_distinct_pairs(Y, eqds, 3);
    REQUIRE(tied.size() == 3);
    CHECK(tied[0].a == "a");
    CHECK(tied[0].b == "b");
    CHECK(tied[1].a == "a");
    CHECK(tied[1].b == "c");
    CHECK(tied[2].a == "b");
    CHECK(tied[2].b == "c");
}

TEST_CASE("closest_distinct_pairs validates its inputs") {
    // text-mode dataset: no surfaces
    const auto text_docs = fixtures::tiny_docs({{"a", "g"}, {"b", "g"}});
    EmbeddingMatrix X(2, 1);
    CHECK_THROWS_AS(closest_distinct_pairs(X, text_docs, 5), parameter_error);

    // single distinct surface
    std::vector<Document> docs;
    for (const char* id : {"m1", "m2"}) {
        Document d;
        d.id = id;
        d.text = "t";
        d.surface = "same";
        docs.push_back(std::move(d));
    }
    const DocumentSet ds(std::move(docs));
    CHECK_THROWS_AS(closest_distinct_pairs(X, ds, 5), parameter_error);
}

TEST_CASE("judgments_to_constraints drops abstains and dedups") {
    std::vector<PairJudgment> js;
    js.push_back({PairQuery("a", "b", QueryPhase::explore), Answer::must_link, "yes", false});
    js.push_back({PairQuery("a", "c", QueryPhase::explore), Answer::abstain, "??", false});
    js.push_back({PairQuery("b", "a", QueryPhase::consolidate), Answer::must_link, "yes", true});
    const ConstraintSet cs = judgments_to_constraints(js, ConstraintSource::llm);
    CHECK(cs.size() == 1);
    CHECK(cs.must_links().count({"a", "b"}) == 1);
}
