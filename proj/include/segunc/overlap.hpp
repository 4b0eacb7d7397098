#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segunc/datamodel.hpp"
#include "segunc/uncertainty.hpp"

namespace segunc {

struct ConfusionCounts {
    std::uint64_t true_positive = 0;
    std::uint64_t false_positive = 0;
    std::uint64_t false_negative = 0;
    std::uint64_t true_negative = 0;
};

[[nodiscard]] ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& truth);

// Both return 1 when prediction and truth are both empty.
[[nodiscard]] double dice(const BinaryMask& pred, const BinaryMask& truth);
[[nodiscard]] double iou(const BinaryMask& pred, const BinaryMask& truth);
[[nodiscard]] double dice(const ConfusionCounts& c) noexcept;
[[nodiscard]] double iou(const ConfusionCounts& c) noexcept;

[[nodiscard]] BinaryMask binarize(const ProbabilityMap& mean, double threshold);

struct CaseEvaluation {
    std::string case_id;
    double dice = 0.0;
    double iou = 0.0;
    double pixel_accuracy = 0.0;
    std::optional<UncertaintySummary> uncertainty;
};

[[nodiscard]] CaseEvaluation evaluate_case(const ProbabilityMap& mean, const BinaryMask& truth,
                                           double threshold = 0.5, std::string case_id = {});

// Unweighted (macro) averages over cases.
struct CaseAverages {
    std::size_t cases = 0;
    double dice = 0.0;
    double iou = 0.0;
    double pixel_accuracy = 0.0;
};

[[nodiscard]] CaseAverages macro_average(std::span<const CaseEvaluation> cases);

struct FoldAggregate {
    std::vector<double> fold_means;
    double mean = 0.0;
    double std = 0.0; // sample (n - 1); 0 for a single fold
    double min = 0.0;
    double max = 0.0;
};

// Throws EmptyInput for an empty list.
[[nodiscard]] FoldAggregate aggregate_folds(std::span<const double> fold_means);

// Per-fold macro-averaged Dice, folds ordered by label. Cases missing from the
// mapping throw EmptyInput naming the case.
[[nodiscard]] std::map<std::string, double>
fold_dice_means(std::span<const CaseEvaluation> cases,
                const std::map<std::string, std::string>& fold_of_case);

} // namespace segunc
