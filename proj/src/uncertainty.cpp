#include "segunc/uncertainty.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <string>

#include "segunc/error.hpp"
#include "segunc/parallel.hpp"

namespace segunc {

double binary_entropy(double p)
{
    if (!(p >= 0.0 && p <= 1.0)) {
        std::ostringstream msg;
        msg << "binary entropy needs p in [0, 1], got " << p;
        throw Error(ErrorCode::DomainError, msg.str());
    }
    return binary_entropy_unchecked(p);
}

ScalarField entropy_map(const ProbabilityMap& mean)
{
    ScalarField field{mean.height(), mean.width(), std::vector<double>(mean.size())};
    for_each_chunk(mean.size(), kDefaultChunk, [&](std::size_t begin, std::size_t end, std::size_t) {
        for (std::size_t i = begin; i < end; ++i) {
            field.values[i] = binary_entropy_unchecked(mean[i]);
        }
    });
    return field;
}

PerPassEntropyStack per_pass_entropy(const SampleStack& stack)
{
    const auto values = stack.values();
    std::vector<double> out(values.size());
    for_each_chunk(values.size(), kDefaultChunk, [&](std::size_t begin, std::size_t end, std::size_t) {
        for (std::size_t i = begin; i < end; ++i) {
            out[i] = binary_entropy_unchecked(values[i]);
        }
    });
    return PerPassEntropyStack(stack.members(), stack.passes(), stack.height(), stack.width(),
                               std::move(out));
}

UncertaintyMaps mutual_information_map(const SampleStack& stack)
{
    const auto pixels = stack.pixel_count();
    const auto samples = stack.sample_count();
    UncertaintyMaps maps{
        {stack.height(), stack.width(), std::vector<double>(pixels, 0.0)},
        {stack.height(), stack.width(), std::vector<double>(pixels, 0.0)},
    };
    auto& entropy = maps.entropy.values;
    auto& mi = maps.mutual_information.values;

    for_each_chunk(pixels, kDefaultChunk, [&](std::size_t begin, std::size_t end, std::size_t) {
        // entropy[] holds the running probability sum, mi[] the per-sample entropy sum.
        for (std::size_t s = 0; s < samples; ++s) {
            const auto slice = stack.sample(s);
            for (std::size_t i = begin; i < end; ++i) {
                const double p = slice[i];
                entropy[i] += p;
                mi[i] += binary_entropy_unchecked(p);
            }
        }
        const auto n = static_cast<double>(samples);
        for (std::size_t i = begin; i < end; ++i) {
            const double h = binary_entropy_unchecked(entropy[i] / n);
            entropy[i] = h;
            mi[i] = std::max(0.0, h - mi[i] / n);
        }
    });
    return maps;
}

LogBase parse_log_base(std::string_view name)
{
    if (name == "nats") {
        return LogBase::Nats;
    }
    if (name == "bits") {
        return LogBase::Bits;
    }
    throw Error(ErrorCode::InvalidConfig, "unknown log base '" + std::string(name) + "'");
}

std::string_view to_string(LogBase base) noexcept
{
    return base == LogBase::Bits ? "bits" : "nats";
}

double unit_scale(LogBase base) noexcept
{
    return base == LogBase::Bits ? 1.0 / std::numbers::ln2 : 1.0;
}

UncertaintyMaps rescale(UncertaintyMaps maps, LogBase base)
{
    if (base == LogBase::Nats) {
        return maps;
    }
    const double factor = unit_scale(base);
    for (auto* field : {&maps.entropy, &maps.mutual_information}) {
        for (auto& v : field->values) {
            v *= factor;
        }
    }
    return maps;
}

namespace {

struct Welford {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();

    void add(double x)
    {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
        min = std::min(min, x);
        max = std::max(max, x);
    }

    void merge(const Welford& other)
    {
        if (other.n == 0) {
            return;
        }
        if (n == 0) {
            *this = other;
            return;
        }
        const auto total = static_cast<double>(n + other.n);
        const double delta = other.mean - mean;
        mean += delta * static_cast<double>(other.n) / total;
        m2 += other.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(other.n) / total;
        n += other.n;
        min = std::min(min, other.min);
        max = std::max(max, other.max);
    }
};

} // namespace

FieldStats field_stats(std::span<const double> values)
{
    if (values.empty()) {
        return {};
    }
    std::vector<Welford> partial(chunk_count(values.size(), kDefaultChunk));
    for_each_chunk(values.size(), kDefaultChunk,
                   [&](std::size_t begin, std::size_t end, std::size_t c) {
                       for (std::size_t i = begin; i < end; ++i) {
                           partial[c].add(values[i]);
                       }
                   });
    Welford total;
    for (const auto& p : partial) {
        total.merge(p);
    }
    FieldStats stats;
    stats.count = total.n;
    // Clamp so min <= mean <= max survives rounding.
    stats.mean = std::clamp(total.mean, total.min, total.max);
    stats.min = total.min;
    stats.max = total.max;
    stats.std = std::sqrt(std::max(0.0, total.m2 / static_cast<double>(total.n)));
    return stats;
}

UncertaintySummary summarize_uncertainty(const UncertaintyMaps& maps)
{
    return {field_stats(maps.entropy.values), field_stats(maps.mutual_information.values)};
}

namespace {

CohortFieldStats cohort_stats(std::span<const UncertaintySummary> cases,
                              FieldStats UncertaintySummary::*member)
{
    CohortFieldStats out;
    out.cases = cases.size();
    if (cases.empty()) {
        return out;
    }
    std::vector<double> means;
    means.reserve(cases.size());
    out.min = std::numeric_limits<double>::infinity();
    out.max = -std::numeric_limits<double>::infinity();
    double std_sum = 0.0;
    for (const auto& c : cases) {
        const auto& s = c.*member;
        means.push_back(s.mean);
        out.min = std::min(out.min, s.min);
        out.max = std::max(out.max, s.max);
        std_sum += s.std;
    }
    double mean_sum = 0.0;
    for (double m : means) {
        mean_sum += m;
    }
    const auto n = static_cast<double>(cases.size());
    out.mean_of_means = mean_sum / n;
    out.mean_within_case_std = std_sum / n;
    std::sort(means.begin(), means.end());
    const auto mid = means.size() / 2;
    out.median_of_means = means.size() % 2 == 1 ? means[mid] : 0.5 * (means[mid - 1] + means[mid]);
    return out;
}

} // namespace

CohortUncertainty summarize_cohort(std::span<const UncertaintySummary> cases)
{
    return {cohort_stats(cases, &UncertaintySummary::entropy),
            cohort_stats(cases, &UncertaintySummary::mutual_information)};
}

} // namespace segunc
