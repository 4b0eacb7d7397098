#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

#include "segunc/datamodel.hpp"

namespace segunc {

// Entropy of a Bernoulli(p) variable in nats, with 0 log 0 = 0. Caller guarantees
// p in [0, 1]; the result is clamped to ln 2 so rounding never exceeds the maximum.
[[nodiscard]] inline double binary_entropy_unchecked(double p) noexcept
{
    if (p <= 0.0 || p >= 1.0) {
        return 0.0;
    }
    const double h = -(p * std::log(p) + (1.0 - p) * std::log1p(-p));
    return h < std::numbers::ln2 ? h : std::numbers::ln2;
}

// Throws DomainError for p outside [0, 1] (including NaN).
[[nodiscard]] double binary_entropy(double p);

[[nodiscard]] ScalarField entropy_map(const ProbabilityMap& mean);

[[nodiscard]] PerPassEntropyStack per_pass_entropy(const SampleStack& stack);

struct UncertaintyMaps {
    ScalarField entropy;
    ScalarField mutual_information;
};

// Entropy of the flat mean over all K*T samples, and MI = entropy minus the
// mean per-sample entropy, floored at zero.
[[nodiscard]] UncertaintyMaps mutual_information_map(const SampleStack& stack);

enum class LogBase { Nats, Bits };

[[nodiscard]] LogBase parse_log_base(std::string_view name);
[[nodiscard]] std::string_view to_string(LogBase base) noexcept;

// Nats are the native unit; bits divide by ln 2.
[[nodiscard]] double unit_scale(LogBase base) noexcept;
[[nodiscard]] UncertaintyMaps rescale(UncertaintyMaps maps, LogBase base);

struct FieldStats {
    std::size_t count = 0;
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    double std = 0.0; // population
};

// Single pass (Welford) with chunk-ordered merging.
[[nodiscard]] FieldStats field_stats(std::span<const double> values);

struct UncertaintySummary {
    FieldStats entropy;
    FieldStats mutual_information;
};

[[nodiscard]] UncertaintySummary summarize_uncertainty(const UncertaintyMaps& maps);

// Cohort-level roll-up of per-case summaries: mean and median of case means,
// overall range, and the average within-case standard deviation.
struct CohortFieldStats {
    std::size_t cases = 0;
    double mean_of_means = 0.0;
    double median_of_means = 0.0;
    double min = 0.0;
    double max = 0.0;
    double mean_within_case_std = 0.0;
};

struct CohortUncertainty {
    CohortFieldStats entropy;
    CohortFieldStats mutual_information;
};

[[nodiscard]] CohortUncertainty summarize_cohort(std::span<const UncertaintySummary> cases);

} // namespace segunc
