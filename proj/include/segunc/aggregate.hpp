#pragma once

#include <cstdint>
#include <string_view>

#include "segunc/datamodel.hpp"

namespace segunc {

enum class AggregationMode {
    McDropout,    // K = 1, average over T passes
    DeepEnsemble, // T = 1, average over K members
    Combined,     // any K, T: (1/K) sum_k (1/T) sum_t
};

[[nodiscard]] AggregationMode parse_mode(std::string_view name);
[[nodiscard]] std::string_view to_string(AggregationMode mode) noexcept;

// Throws ModeShapeMismatch if the stack's K/T are not valid for `mode`.
void check_mode(const SampleStack& stack, AggregationMode mode);

// Per-pixel mean over all K*T samples. Stacks are rectangular (equal T per
// member), so the nested mean equals the flat one.
[[nodiscard]] ProbabilityMap aggregate_mean(const SampleStack& stack, AggregationMode mode);

[[nodiscard]] ProbabilityMap per_sample_slice(const SampleStack& stack, std::uint32_t member,
                                              std::uint32_t pass);

} // namespace segunc
