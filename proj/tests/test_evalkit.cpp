#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fdkit/evalkit.hpp"
#include "fdkit/util.hpp"
#include "support/metric_oracle.hpp"

using namespace fdkit;

namespace {

Label four(int i) { return Label{LabelScheme::Four, i}; }

std::vector<std::pair<Label, std::optional<Label>>> random_pairs(std::mt19937_64& rng,
                                                                 std::size_t n, int k) {
    std::vector<std::pair<Label, std::optional<Label>>> pairs;
    for (std::size_t i = 0; i < n; ++i) {
        const int truth = static_cast<int>(uniform_below(rng, k));
        std::optional<Label> pred;
        const auto roll = uniform_below(rng, 10);
        if (roll < 6) pred = four(truth);                                   // mostly right
        else if (roll < 9) pred = four(static_cast<int>(uniform_below(rng, k)));
        // else unmapped
        pairs.emplace_back(four(truth), pred);
    }
    return pairs;
}

}  // namespace

TEST_CASE("canonical surface forms map to their labels") {
    CHECK(*map_prediction("Inner Race Fault", LabelScheme::Four) == four(1));
    CHECK(*map_prediction("Normal", LabelScheme::Four) == four(0));
    CHECK(*map_prediction("Outer Race Fault", LabelScheme::Four) == four(2));
    CHECK(*map_prediction("Rolling Element Fault", LabelScheme::Four) == four(3));
}

TEST_CASE("wrapping prose and punctuation are stripped") {
    CHECK(*map_prediction("the bearing status is: outer race fault.", LabelScheme::Four) == four(2));
    CHECK(*map_prediction("Diagnosis -> INNER-RACE fault!", LabelScheme::Four) == four(1));
    CHECK(*map_prediction("IRF", LabelScheme::Four) == four(1));
    CHECK(*map_prediction("The bearing is healthy.", LabelScheme::Four) == four(0));
}

TEST_CASE("text without a label cue is unmapped") {
    CHECK(!map_prediction("everything looks interesting", LabelScheme::Four));
    CHECK(!map_prediction("", LabelScheme::Four));
    CHECK(!map_prediction("racecar", LabelScheme::Four));
}

TEST_CASE("multi-label mentions are ambiguous, repeated single-label mentions are not") {
    CHECK(!map_prediction("either inner race fault or outer race fault", LabelScheme::Four));
    CHECK(*map_prediction("inner race fault, yes, an inner race fault (IRF)", LabelScheme::Four) ==
          four(1));
}

TEST_CASE("ten-label scheme needs a size cue") {
    CHECK(*map_prediction("Inner Race Fault (0.021 inch)", LabelScheme::Ten) ==
          Label{LabelScheme::Ten, 3});
    CHECK(*map_prediction("inner race fault, 0.007 inches", LabelScheme::Ten) ==
          Label{LabelScheme::Ten, 1});
    CHECK(*map_prediction("IRF2", LabelScheme::Ten) == Label{LabelScheme::Ten, 2});
    CHECK(*map_prediction("ref3", LabelScheme::Ten) == Label{LabelScheme::Ten, 9});
    CHECK(*map_prediction("Normal", LabelScheme::Ten) == Label{LabelScheme::Ten, 0});
    CHECK(!map_prediction("inner race fault", LabelScheme::Ten));            // no size
    CHECK(!map_prediction("inner race fault 0.007 or 0.014", LabelScheme::Ten));  // conflict
}

TEST_CASE("the shipped synonym table matches the compiled-in default") {
    auto shipped = load_synonyms(std::string(FDKIT_SOURCE_DIR) + "/data/label_synonyms.json");
    CHECK(shipped == default_synonyms());
}

TEST_CASE("all-correct predictions score perfectly") {
    std::vector<std::pair<Label, std::optional<Label>>> pairs;
    for (int c = 0; c < 4; ++c)
        for (int i = 0; i < 3; ++i) pairs.emplace_back(four(c), four(c));
    auto scored = score(pairs);
    CHECK(scored.report.accuracy == 1.0);
    CHECK(scored.report.macro_f1 == 1.0);
    CHECK(scored.report.unmapped_count == 0);
}

TEST_CASE("hand-computed two-class fixture") {
    // truths [A,A,B,B], preds [A,B,B,B]
    std::vector<std::pair<Label, std::optional<Label>>> pairs = {
        {four(0), four(0)}, {four(0), four(1)}, {four(1), four(1)}, {four(1), four(1)}};
    auto scored = score(pairs);
    CHECK(scored.report.accuracy == 0.75);
    CHECK(scored.report.per_class[0].precision == 1.0);
    CHECK(scored.report.per_class[0].recall == 0.5);
    CHECK(scored.report.per_class[0].f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(scored.report.per_class[1].precision == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(scored.report.per_class[1].recall == 1.0);
    CHECK(scored.report.per_class[1].f1 == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(scored.report.macro_f1 == doctest::Approx(11.0 / 15.0).epsilon(1e-15));

    auto o = oracle::brute_force_metrics(pairs);
    CHECK(scored.report.accuracy == o.accuracy);
    CHECK(scored.report.macro_precision == o.macro_precision);
    CHECK(scored.report.macro_recall == o.macro_recall);
    CHECK(scored.report.macro_f1 == o.macro_f1);
}

TEST_CASE("one unmapped among ten otherwise-correct") {
    std::vector<std::pair<Label, std::optional<Label>>> pairs;
    for (int i = 0; i < 10; ++i) pairs.emplace_back(four(i % 4), four(i % 4));
    pairs[7].second = std::nullopt;
    auto scored = score(pairs);
    CHECK(scored.report.accuracy == 0.9);
    CHECK(scored.report.unmapped_count == 1);
}

TEST_CASE("randomized cases match the brute-force oracle exactly") {
    std::mt19937_64 rng(611);
    for (int rep = 0; rep < 20; ++rep) {
        auto pairs = random_pairs(rng, 20 + uniform_below(rng, 60), 2 + rep % 3);
        auto scored = score(pairs);
        auto o = oracle::brute_force_metrics(pairs);
        CHECK(scored.report.accuracy == o.accuracy);
        CHECK(scored.report.macro_precision == o.macro_precision);
        CHECK(scored.report.macro_recall == o.macro_recall);
        CHECK(scored.report.macro_f1 == o.macro_f1);
    }
}

TEST_CASE("metrics are invariant under prediction order") {
    std::mt19937_64 rng(612);
    auto pairs = random_pairs(rng, 50, 4);
    auto a = score(pairs);
    deterministic_shuffle(pairs, rng);
    auto b = score(pairs);
    CHECK(a.report.accuracy == b.report.accuracy);
    CHECK(a.report.macro_f1 == b.report.macro_f1);
    CHECK(a.confusion.counts == b.confusion.counts);
}

TEST_CASE("relabeling classes by a bijection permutes per-class metrics") {
    std::mt19937_64 rng(613);
    auto pairs = random_pairs(rng, 60, 4);
    auto base = score(pairs);
    // bijection i -> 3 - i
    auto relabeled = pairs;
    for (auto& [t, p] : relabeled) {
        t = four(3 - t.index);
        if (p) p = four(3 - p->index);
    }
    auto permuted = score(relabeled);
    CHECK(base.report.accuracy == permuted.report.accuracy);
    REQUIRE(base.report.per_class.size() == permuted.report.per_class.size());
    const std::size_t k = base.report.per_class.size();
    for (std::size_t i = 0; i < k; ++i) {
        CHECK(base.report.per_class[i].precision == permuted.report.per_class[k - 1 - i].precision);
        CHECK(base.report.per_class[i].recall == permuted.report.per_class[k - 1 - i].recall);
        CHECK(base.report.per_class[i].f1 == permuted.report.per_class[k - 1 - i].f1);
    }
}

TEST_CASE("confusion rows sum to the ground-truth counts and trace gives accuracy") {
    std::mt19937_64 rng(614);
    auto pairs = random_pairs(rng, 80, 4);
    auto scored = score(pairs);
    std::map<int, std::uint64_t> truth_counts;
    for (const auto& [t, p] : pairs) truth_counts[t.index]++;
    std::uint64_t trace = 0;
    for (std::size_t i = 0; i < scored.confusion.labels.size(); ++i) {
        std::uint64_t row = 0;
        for (std::uint64_t c : scored.confusion.counts[i]) row += c;
        CHECK(row == truth_counts[label_from_code(scored.confusion.labels[i], LabelScheme::Four).index]);
        trace += scored.confusion.counts[i][i];
    }
    CHECK(scored.report.accuracy ==
          static_cast<double>(trace) / static_cast<double>(pairs.size()));
}

TEST_CASE("per-class f1 is the harmonic mean of precision and recall") {
    std::mt19937_64 rng(615);
    auto pairs = random_pairs(rng, 70, 3);
    auto scored = score(pairs);
    for (const auto& pc : scored.report.per_class) {
        if (pc.precision + pc.recall > 0) {
            CHECK(pc.f1 ==
                  doctest::Approx(2 * pc.precision * pc.recall / (pc.precision + pc.recall))
                      .epsilon(1e-15));
        } else {
            CHECK(pc.f1 == 0.0);
        }
    }
}

TEST_CASE("empty prediction set is an error") {
    CHECK_THROWS_WITH_AS(score({}), doctest::Contains("EmptyInput"), Error);
}

TEST_CASE("degenerate 0/0 classes are flagged") {
    // class 2 never predicted, class 3 never true
    std::vector<std::pair<Label, std::optional<Label>>> pairs = {
        {four(0), four(0)}, {four(2), four(0)}, {four(0), four(3)}};
    auto scored = score(pairs);
    bool flagged = false;
    for (const auto& pc : scored.report.per_class)
        if (pc.degenerate) flagged = true;
    CHECK(flagged);
}

TEST_CASE("report renders to json and csv") {
    std::vector<std::pair<Label, std::optional<Label>>> pairs = {
        {four(0), four(0)}, {four(1), std::nullopt}};
    auto scored = score(pairs);
    auto j = report_to_json(scored);
    CHECK(j["accuracy"] == 0.5);
    CHECK(j["unmapped_count"] == 1);
    CHECK(j["confusion"]["labels"].size() == 2);

    const std::string csv = confusion_to_csv(scored.confusion);
    CHECK(csv.find("Unmapped") != std::string::npos);
    const std::string table = render_report_table(scored);
    CHECK(table.find("accuracy") != std::string::npos);
}
