#include <doctest.h>

#include <numbers>
#include <random>

#include "segunc/aggregate.hpp"
#include "segunc/error.hpp"
#include "segunc/uncertainty.hpp"
#include "support/oracle.hpp"
#include "support/test_support.hpp"

using namespace segunc;

TEST_CASE("binary_entropy reference values")
{
    CHECK(binary_entropy(0.5) == doctest::Approx(0.6931).epsilon(1e-4 / 0.6931));
    CHECK(binary_entropy(0.5) == std::numbers::ln2);
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    // -(0.25 ln 0.25 + 0.75 ln 0.75), evaluated independently in double precision
    CHECK(binary_entropy(0.25) == doctest::Approx(0.5623351446188083).epsilon(1e-14));
    CHECK(binary_entropy(0.25) == doctest::Approx(0.5623).epsilon(1e-4 / 0.5623));
}

TEST_CASE("binary_entropy rejects values outside [0, 1]")
{
    for (double p : {-0.1, 1.0000001, std::nan("")}) {
        try {
            (void)binary_entropy(p);
            FAIL("no throw");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::DomainError);
        }
    }
}

TEST_CASE("binary_entropy is symmetric and bounded")
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int i = 0; i < 100000; ++i) {
        const double p = uni(rng);
        const double h = binary_entropy(p);
        CHECK(h >= 0.0);
        CHECK(h <= std::numbers::ln2);
        CHECK(h == doctest::Approx(binary_entropy(1.0 - p)).epsilon(1e-12));
        CHECK(h == doctest::Approx(oracle::entropy(p)).epsilon(1e-12));
    }
}

TEST_CASE("entropy_map")
{
    SUBCASE("all 0.5 gives ln 2 everywhere")
    {
        const ProbabilityMap m(2, 2, std::vector<double>(4, 0.5));
        for (double v : entropy_map(m).values) {
            CHECK(v == doctest::Approx(0.6931).epsilon(1e-4));
        }
    }
    SUBCASE("saturated maps give zero")
    {
        const ProbabilityMap m(1, 4, {0.0, 1.0, 0.0, 1.0});
        for (double v : entropy_map(m).values) {
            CHECK(v == 0.0);
        }
    }
    SUBCASE("matches the scalar oracle pointwise")
    {
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        std::vector<double> v(1000);
        for (auto& x : v) {
            x = uni(rng);
        }
        const ProbabilityMap m(25, 40, v);
        const auto h = entropy_map(m);
        for (std::size_t i = 0; i < v.size(); ++i) {
            CHECK(h.values[i] == doctest::Approx(oracle::entropy(v[i])).epsilon(1e-12));
        }
    }
}

TEST_CASE("mutual information hand cases")
{
    SUBCASE("identical samples have zero MI")
    {
        const SampleStack s("a", 2, 3, 1, 1, std::vector<float>(6, 0.37F));
        const auto maps = mutual_information_map(s);
        CHECK(maps.mutual_information.values[0] == 0.0);
    }
    SUBCASE("samples {0, 1}: maximal disagreement")
    {
        const SampleStack s("a", 1, 2, 1, 1, {0.0F, 1.0F});
        const auto maps = mutual_information_map(s);
        CHECK(maps.entropy.values[0] == doctest::Approx(0.6931).epsilon(1e-4));
        CHECK(maps.mutual_information.values[0] == doctest::Approx(0.6931).epsilon(1e-4));
    }
    SUBCASE("samples {0.2, 0.8}")
    {
        const SampleStack s("a", 2, 1, 1, 1, {0.2F, 0.8F});
        const auto maps = mutual_information_map(s);
        // ln 2 - H(0.2) = 0.6931472 - 0.5004024
        CHECK(maps.entropy.values[0] == doctest::Approx(0.6931).epsilon(1e-4));
        CHECK(maps.mutual_information.values[0] == doctest::Approx(0.1927).epsilon(1e-4 / 0.1927));
        CHECK(std::abs(maps.mutual_information.values[0] - 0.19274475702175742) < 1e-7);
    }
}

TEST_CASE("MI map matches the brute-force oracle and its invariants")
{
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<std::uint32_t> dim(1, 5);
    for (int trial = 0; trial < 30; ++trial) {
        const auto s = segunc::testing::random_stack(rng, dim(rng), dim(rng), 8, 8);
        const auto maps = mutual_information_map(s);
        const auto h_of_mean = entropy_map(aggregate_mean(s, AggregationMode::Combined));
        const auto per_pass = per_pass_entropy(s);
        for (std::uint32_t r = 0; r < 8; ++r) {
            for (std::uint32_t c = 0; c < 8; ++c) {
                const auto i = r * 8 + c;
                const double mi = maps.mutual_information.values[i];
                const double h = maps.entropy.values[i];
                CHECK(std::abs(mi - oracle::mutual_information(s, r, c)) < 1e-10);
                CHECK(h == h_of_mean.values[i]);
                CHECK(mi >= 0.0);
                CHECK(mi <= h);
                CHECK(h <= std::numbers::ln2);
                double mean_pass = 0.0;
                for (std::size_t j = 0; j < s.sample_count(); ++j) {
                    mean_pass += per_pass.values()[j * s.pixel_count() + i];
                }
                mean_pass /= static_cast<double>(s.sample_count());
                CHECK(h >= mean_pass - 1e-12); // concavity
            }
        }
    }
}

TEST_CASE("MI is zero exactly where all samples agree")
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<float> uni(0.0F, 1.0F);
    const std::uint32_t k = 2;
    const std::uint32_t t = 3;
    const std::uint32_t n = 50;
    std::vector<float> v(k * t * n);
    std::vector<bool> agree(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        agree[i] = i % 2 == 0;
        const float base = uni(rng);
        for (std::uint32_t s = 0; s < k * t; ++s) {
            v[s * n + i] = agree[i] ? base : uni(rng);
        }
    }
    const auto maps = mutual_information_map(SampleStack("a", k, t, 1, n, v));
    for (std::uint32_t i = 0; i < n; ++i) {
        if (agree[i]) {
            CHECK(maps.mutual_information.values[i] < 1e-12);
        } else {
            CHECK(maps.mutual_information.values[i] > 1e-12);
        }
    }
}

TEST_CASE("per_pass_entropy lies in [0, ln 2]")
{
    std::mt19937_64 rng(2);
    const auto s = segunc::testing::random_stack(rng, 2, 2, 4, 4);
    const auto pp = per_pass_entropy(s);
    for (std::size_t i = 0; i < pp.values().size(); ++i) {
        CHECK(pp.values()[i] == doctest::Approx(oracle::entropy(s.values()[i])).epsilon(1e-12));
    }
}

TEST_CASE("bits rescale divides by ln 2")
{
    const SampleStack s("a", 1, 2, 1, 2, {0.2F, 0.0F, 0.8F, 1.0F});
    const auto nats = mutual_information_map(s);
    const auto bits = rescale(nats, LogBase::Bits);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(bits.entropy.values[i] == doctest::Approx(nats.entropy.values[i] / std::numbers::ln2));
        CHECK(bits.mutual_information.values[i] ==
              doctest::Approx(nats.mutual_information.values[i] / std::numbers::ln2));
    }
    CHECK(bits.entropy.values[1] == doctest::Approx(1.0));
}

TEST_CASE("summarize_uncertainty")
{
    SUBCASE("constant field")
    {
        const UncertaintyMaps maps{{1, 3, {0.2, 0.2, 0.2}}, {1, 3, {0.0, 0.0, 0.0}}};
        const auto s = summarize_uncertainty(maps);
        CHECK(s.entropy.mean == 0.2);
        CHECK(s.entropy.std == 0.0);
        CHECK(s.entropy.min == 0.2);
        CHECK(s.entropy.max == 0.2);
        CHECK(s.entropy.count == 3);
    }
    SUBCASE("two pixels {0, ln 2}: population std")
    {
        const UncertaintyMaps maps{{1, 2, {0.0, std::numbers::ln2}}, {1, 2, {0.0, 0.0}}};
        const auto s = summarize_uncertainty(maps);
        CHECK(s.entropy.mean == doctest::Approx(0.3466).epsilon(1e-4 / 0.3466));
        CHECK(s.entropy.std == doctest::Approx(0.3466).epsilon(1e-4 / 0.3466));
    }
    SUBCASE("matches a two-pass oracle across chunk boundaries")
    {
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> uni(0.0, std::numbers::ln2);
        std::vector<double> e(200003);
        std::vector<double> m(e.size());
        for (std::size_t i = 0; i < e.size(); ++i) {
            e[i] = uni(rng);
            m[i] = e[i] * 0.25;
        }
        const UncertaintyMaps maps{{1, static_cast<std::uint32_t>(e.size()), e},
                                   {1, static_cast<std::uint32_t>(m.size()), m}};
        const auto s = summarize_uncertainty(maps);
        const auto oe = oracle::two_pass(e);
        const auto om = oracle::two_pass(m);
        CHECK(s.entropy.mean == doctest::Approx(oe.mean).epsilon(1e-12));
        CHECK(s.entropy.std == doctest::Approx(oe.std).epsilon(1e-10));
        CHECK(s.entropy.min == oe.min);
        CHECK(s.entropy.max == oe.max);
        CHECK(s.mutual_information.mean == doctest::Approx(om.mean).epsilon(1e-12));
        CHECK(s.mutual_information.std == doctest::Approx(om.std).epsilon(1e-10));
        CHECK(s.entropy.min <= s.entropy.mean);
        CHECK(s.entropy.mean <= s.entropy.max);
    }
}

TEST_CASE("summarize_cohort rolls up per-case summaries")
{
    std::vector<UncertaintySummary> cases(3);
    const double means[] = {0.01, 0.03, 0.02};
    const double stds[] = {0.1, 0.2, 0.3};
    for (int i = 0; i < 3; ++i) {
        cases[i].entropy = {10, means[i], 0.0, 0.6 + 0.01 * i, stds[i]};
        cases[i].mutual_information = {10, means[i] / 2, 0.0, 0.4, stds[i] / 2};
    }
    const auto c = summarize_cohort(cases);
    CHECK(c.entropy.cases == 3);
    CHECK(c.entropy.mean_of_means == doctest::Approx(0.02));
    CHECK(c.entropy.median_of_means == doctest::Approx(0.02));
    CHECK(c.entropy.max == doctest::Approx(0.62));
    CHECK(c.entropy.mean_within_case_std == doctest::Approx(0.2));
    CHECK(c.mutual_information.mean_within_case_std == doctest::Approx(0.1));
}
