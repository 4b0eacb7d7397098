#include "segunc/aggregate.hpp"

#include <algorithm>
#include <sstream>
#include <string>

#include "segunc/error.hpp"
#include "segunc/parallel.hpp"

namespace segunc {

AggregationMode parse_mode(std::string_view name)
{
    if (name == "mc" || name == "mc_dropout") {
        return AggregationMode::McDropout;
    }
    if (name == "ensemble" || name == "deep_ensemble") {
        return AggregationMode::DeepEnsemble;
    }
    if (name == "combined") {
        return AggregationMode::Combined;
    }
    throw Error(ErrorCode::InvalidConfig, "unknown aggregation mode '" + std::string(name) + "'");
}

std::string_view to_string(AggregationMode mode) noexcept
{
    switch (mode) {
    case AggregationMode::McDropout: return "mc";
    case AggregationMode::DeepEnsemble: return "ensemble";
    case AggregationMode::Combined: return "combined";
    }
    return "unknown";
}

void check_mode(const SampleStack& stack, AggregationMode mode)
{
    const bool ok = (mode == AggregationMode::McDropout && stack.members() == 1) ||
                    (mode == AggregationMode::DeepEnsemble && stack.passes() == 1) ||
                    mode == AggregationMode::Combined;
    if (!ok) {
        std::ostringstream msg;
        msg << "mode " << to_string(mode) << " requires "
            << (mode == AggregationMode::McDropout ? "K=1" : "T=1") << ", stack '"
            << stack.case_id() << "' has K=" << stack.members() << " T=" << stack.passes();
        throw Error(ErrorCode::ModeShapeMismatch, msg.str());
    }
}

ProbabilityMap aggregate_mean(const SampleStack& stack, AggregationMode mode)
{
    check_mode(stack, mode);
    const auto pixels = stack.pixel_count();
    const auto samples = stack.sample_count();
    std::vector<double> mean(pixels, 0.0);
    for_each_chunk(pixels, kDefaultChunk, [&](std::size_t begin, std::size_t end, std::size_t) {
        for (std::size_t s = 0; s < samples; ++s) {
            const auto slice = stack.sample(s);
            for (std::size_t i = begin; i < end; ++i) {
                mean[i] += static_cast<double>(slice[i]);
            }
        }
        const auto n = static_cast<double>(samples);
        for (std::size_t i = begin; i < end; ++i) {
            mean[i] /= n;
        }
    });
    return ProbabilityMap(stack.height(), stack.width(), std::move(mean));
}

ProbabilityMap per_sample_slice(const SampleStack& stack, std::uint32_t member, std::uint32_t pass)
{
    if (member >= stack.members() || pass >= stack.passes()) {
        std::ostringstream msg;
        msg << "slice (" << member << ", " << pass << ") outside K=" << stack.members()
            << " T=" << stack.passes();
        throw Error(ErrorCode::IndexOutOfRange, msg.str());
    }
    const auto slice = stack.sample(static_cast<std::size_t>(member) * stack.passes() + pass);
    return ProbabilityMap(stack.height(), stack.width(),
                          std::vector<double>(slice.begin(), slice.end()));
}

} // namespace segunc
