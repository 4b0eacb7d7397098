#include <doctest.h>

#include <random>

#include "segunc/error.hpp"
#include "segunc/overlap.hpp"
#include "support/oracle.hpp"
#include "support/test_support.hpp"

using namespace segunc;

TEST_CASE("dice and iou hand cases")
{
    SUBCASE("{a, b} vs {b, c}")
    {
        const BinaryMask p(1, 3, {1, 1, 0});
        const BinaryMask g(1, 3, {0, 1, 1});
        CHECK(dice(p, g) == doctest::Approx(0.5));
        CHECK(iou(p, g) == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("identical non-empty masks")
    {
        const BinaryMask m(2, 2, {1, 0, 1, 1});
        CHECK(dice(m, m) == 1.0);
        CHECK(iou(m, m) == 1.0);
    }
    SUBCASE("disjoint")
    {
        const BinaryMask p(1, 2, {1, 0});
        const BinaryMask g(1, 2, {0, 1});
        CHECK(dice(p, g) == 0.0);
        CHECK(iou(p, g) == 0.0);
    }
    SUBCASE("both empty")
    {
        const BinaryMask e(2, 2, {0, 0, 0, 0});
        CHECK(dice(e, e) == 1.0);
        CHECK(iou(e, e) == 1.0);
    }
    SUBCASE("one empty")
    {
        const BinaryMask e(1, 2, {0, 0});
        const BinaryMask g(1, 2, {1, 0});
        CHECK(dice(e, g) == 0.0);
        CHECK(iou(g, e) == 0.0);
    }
    SUBCASE("shape mismatch")
    {
        const BinaryMask a(1, 2, {0, 0});
        const BinaryMask b(2, 1, {0, 0});
        CHECK_THROWS_AS((void)dice(a, b), Error);
    }
}

TEST_CASE("dice/iou agree with set counting and satisfy D = 2J / (1 + J)")
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> rate(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const auto p = segunc::testing::random_mask(rng, 9, 11, rate(rng));
        const auto g = segunc::testing::random_mask(rng, 9, 11, rate(rng));
        const double d = dice(p, g);
        const double j = iou(p, g);
        CHECK(d == doctest::Approx(oracle::dice(p, g)).epsilon(1e-15));
        CHECK(j == doctest::Approx(oracle::iou(p, g)).epsilon(1e-15));
        CHECK(std::abs(d - 2.0 * j / (1.0 + j)) < 1e-12);
        CHECK(d == dice(g, p));
        CHECK(j == iou(g, p));
        CHECK(j <= d);
    }
}

TEST_CASE("confusion counts and binarize")
{
    const ProbabilityMap mean(1, 4, {0.5, 0.49, 0.9, 0.1});
    const auto pred = binarize(mean, 0.5);
    CHECK(pred[0] == 1);
    CHECK(pred[1] == 0);
    const BinaryMask truth(1, 4, {1, 1, 0, 0});
    const auto c = confusion(pred, truth);
    CHECK(c.true_positive == 1);
    CHECK(c.false_negative == 1);
    CHECK(c.false_positive == 1);
    CHECK(c.true_negative == 1);
    const auto e = evaluate_case(mean, truth, 0.5, "x");
    CHECK(e.case_id == "x");
    CHECK(e.dice == doctest::Approx(0.5));
    CHECK(e.iou == doctest::Approx(1.0 / 3.0));
    CHECK(e.pixel_accuracy == doctest::Approx(0.5));
}

TEST_CASE("macro average weights cases equally")
{
    std::vector<CaseEvaluation> cases(2);
    cases[0].dice = 1.0;
    cases[0].iou = 1.0;
    cases[1].dice = 0.5;
    cases[1].iou = 0.25;
    const auto avg = macro_average(cases);
    CHECK(avg.cases == 2);
    CHECK(avg.dice == doctest::Approx(0.75));
    CHECK(avg.iou == doctest::Approx(0.625));
}

TEST_CASE("fold aggregation reproduces the published cross-validation averages")
{
    struct Row {
        const char* name;
        std::vector<double> folds;
        double average;
    };
    const std::vector<Row> rows{
        {"Full", {0.7478, 0.7147, 0.7769, 0.7667, 0.7509}, 0.7514},
        {"A1", {0.7048, 0.7092, 0.6815, 0.7512, 0.7253}, 0.7144},
        {"A2", {0.6927, 0.7366, 0.7324, 0.7260, 0.7016}, 0.7179},
        {"A3", {0.7732, 0.6657, 0.7084, 0.7670, 0.6911}, 0.7211},
    };
    for (const auto& row : rows) {
        CAPTURE(row.name);
        const auto agg = aggregate_folds(row.folds);
        CHECK(std::abs(agg.mean - row.average) < 5e-4);
        CHECK(agg.min <= agg.mean);
        CHECK(agg.mean <= agg.max);
    }
}

TEST_CASE("fold aggregation statistics")
{
    const std::vector<double> folds{0.6, 0.8};
    const auto agg = aggregate_folds(folds);
    CHECK(agg.mean == doctest::Approx(0.7));
    CHECK(agg.std == doctest::Approx(std::sqrt(0.02)));
    const std::vector<double> one{0.4};
    CHECK(aggregate_folds(one).std == 0.0);
    const std::vector<double> none;
    CHECK_THROWS_AS((void)aggregate_folds(none), Error);
}

TEST_CASE("fold_dice_means groups by fold label")
{
    std::vector<CaseEvaluation> cases(3);
    cases[0].case_id = "a";
    cases[0].dice = 0.8;
    cases[1].case_id = "b";
    cases[1].dice = 0.6;
    cases[2].case_id = "c";
    cases[2].dice = 0.5;
    const std::map<std::string, std::string> folds{{"a", "f1"}, {"b", "f1"}, {"c", "f2"}};
    const auto means = fold_dice_means(cases, folds);
    CHECK(means.size() == 2);
    CHECK(means.at("f1") == doctest::Approx(0.7));
    CHECK(means.at("f2") == doctest::Approx(0.5));
    const std::map<std::string, std::string> partial{{"a", "f1"}};
    CHECK_THROWS_AS((void)fold_dice_means(cases, partial), Error);
}
