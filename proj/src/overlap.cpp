#include "segunc/overlap.hpp"

#include <algorithm>
#include <cmath>

#include "segunc/error.hpp"

namespace segunc {

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& truth)
{
    require_same_shape(pred.height(), pred.width(), truth.height(), truth.width(),
                       "prediction vs ground-truth mask");
    ConfusionCounts c;
    const auto p = pred.values();
    const auto g = truth.values();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const unsigned code = (p[i] << 1U) | g[i];
        switch (code) {
        case 0b11: ++c.true_positive; break;
        case 0b10: ++c.false_positive; break;
        case 0b01: ++c.false_negative; break;
        default: ++c.true_negative; break;
        }
    }
    return c;
}

double dice(const ConfusionCounts& c) noexcept
{
    const auto denom = 2 * c.true_positive + c.false_positive + c.false_negative;
    if (denom == 0) {
        return 1.0;
    }
    return static_cast<double>(2 * c.true_positive) / static_cast<double>(denom);
}

double iou(const ConfusionCounts& c) noexcept
{
    const auto uni = c.true_positive + c.false_positive + c.false_negative;
    if (uni == 0) {
        return 1.0;
    }
    return static_cast<double>(c.true_positive) / static_cast<double>(uni);
}

double dice(const BinaryMask& pred, const BinaryMask& truth)
{
    return dice(confusion(pred, truth));
}

double iou(const BinaryMask& pred, const BinaryMask& truth)
{
    return iou(confusion(pred, truth));
}

BinaryMask binarize(const ProbabilityMap& mean, double threshold)
{
    std::vector<std::uint8_t> out(mean.size());
    for (std::size_t i = 0; i < mean.size(); ++i) {
        out[i] = mean[i] >= threshold ? 1 : 0;
    }
    return BinaryMask(mean.height(), mean.width(), std::move(out));
}

CaseEvaluation evaluate_case(const ProbabilityMap& mean, const BinaryMask& truth,
                             double threshold, std::string case_id)
{
    require_same_shape(mean.height(), mean.width(), truth.height(), truth.width(),
                       "probability map vs ground-truth mask");
    const auto c = confusion(binarize(mean, threshold), truth);
    CaseEvaluation eval;
    eval.case_id = std::move(case_id);
    eval.dice = dice(c);
    eval.iou = iou(c);
    eval.pixel_accuracy = static_cast<double>(c.true_positive + c.true_negative) /
                          static_cast<double>(mean.size());
    return eval;
}

CaseAverages macro_average(std::span<const CaseEvaluation> cases)
{
    CaseAverages avg;
    avg.cases = cases.size();
    if (cases.empty()) {
        return avg;
    }
    for (const auto& c : cases) {
        avg.dice += c.dice;
        avg.iou += c.iou;
        avg.pixel_accuracy += c.pixel_accuracy;
    }
    const auto n = static_cast<double>(cases.size());
    avg.dice /= n;
    avg.iou /= n;
    avg.pixel_accuracy /= n;
    return avg;
}

FoldAggregate aggregate_folds(std::span<const double> fold_means)
{
    if (fold_means.empty()) {
        throw Error(ErrorCode::EmptyInput, "fold aggregation needs at least one fold");
    }
    FoldAggregate agg;
    agg.fold_means.assign(fold_means.begin(), fold_means.end());
    const auto [lo, hi] = std::minmax_element(fold_means.begin(), fold_means.end());
    agg.min = *lo;
    agg.max = *hi;
    double sum = 0.0;
    for (double v : fold_means) {
        sum += v;
    }
    const auto n = static_cast<double>(fold_means.size());
    agg.mean = std::clamp(sum / n, agg.min, agg.max);
    if (fold_means.size() > 1) {
        double ss = 0.0;
        for (double v : fold_means) {
            ss += (v - agg.mean) * (v - agg.mean);
        }
        agg.std = std::sqrt(ss / (n - 1.0));
    }
    return agg;
}

std::map<std::string, double> fold_dice_means(std::span<const CaseEvaluation> cases,
                                              const std::map<std::string, std::string>& fold_of_case)
{
    std::map<std::string, std::pair<double, std::size_t>> sums;
    for (const auto& c : cases) {
        const auto it = fold_of_case.find(c.case_id);
        if (it == fold_of_case.end()) {
            throw Error(ErrorCode::EmptyInput, "case '" + c.case_id + "' has no fold assignment");
        }
        auto& [sum, count] = sums[it->second];
        sum += c.dice;
        ++count;
    }
    std::map<std::string, double> out;
    for (const auto& [fold, acc] : sums) {
        out[fold] = acc.first / static_cast<double>(acc.second);
    }
    return out;
}

} // namespace segunc
