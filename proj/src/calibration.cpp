#include "segunc/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "segunc/error.hpp"
#include "segunc/parallel.hpp"

namespace segunc {

void BinningConfig::validate() const
{
    std::ostringstream msg;
    if (bin_count < 1) {
        msg << "bin count must be at least 1";
    } else if (!(range_low >= 0.0 && range_low < range_high && range_high <= 1.0)) {
        msg << "bin range must satisfy 0 <= low < high <= 1, got [" << range_low << ", "
            << range_high << "]";
    } else if (!(threshold >= 0.0 && threshold <= 1.0)) {
        msg << "threshold must lie in [0, 1], got " << threshold;
    } else {
        return;
    }
    throw Error(ErrorCode::InvalidConfig, msg.str());
}

std::uint32_t bin_index(double confidence, const BinningConfig& cfg) noexcept
{
    const double scaled = (confidence - cfg.range_low) / (cfg.range_high - cfg.range_low) *
                          static_cast<double>(cfg.bin_count);
    if (!(scaled > 0.0)) {
        return 0;
    }
    auto idx = std::min<std::uint64_t>(static_cast<std::uint64_t>(scaled), cfg.bin_count - 1);
    // Settle rounding against the edges as reported in BinRecord.
    const double width = (cfg.range_high - cfg.range_low) / cfg.bin_count;
    if (idx + 1 < cfg.bin_count && confidence >= cfg.range_low + width * static_cast<double>(idx + 1)) {
        ++idx;
    } else if (idx > 0 && confidence < cfg.range_low + width * static_cast<double>(idx)) {
        --idx;
    }
    return static_cast<std::uint32_t>(idx);
}

std::optional<double> BinRecord::accuracy() const
{
    if (count == 0) {
        return std::nullopt;
    }
    return static_cast<double>(correct) / static_cast<double>(count);
}

std::optional<double> BinRecord::confidence() const
{
    if (count == 0) {
        return std::nullopt;
    }
    return std::clamp(confidence_sum / static_cast<double>(count), 0.0, 1.0);
}

void CalibrationReport::finalize()
{
    if (total_pixels == 0) {
        ece = 0.0;
        pixel_accuracy = 0.0;
        return;
    }
    // sum_m |B_m|/N * |acc_m - conf_m| == sum_m |correct_m - conf_sum_m| / N
    double gap = 0.0;
    for (const auto& bin : bins) {
        gap += std::abs(static_cast<double>(bin.correct) - bin.confidence_sum);
    }
    const auto n = static_cast<double>(total_pixels);
    ece = std::clamp(gap / n, 0.0, 1.0);
    pixel_accuracy = static_cast<double>(correct_pixels) / n;
}

ScalarField confidence_map(const ProbabilityMap& mean)
{
    ScalarField field{mean.height(), mean.width(), std::vector<double>(mean.size())};
    for (std::size_t i = 0; i < mean.size(); ++i) {
        field.values[i] = std::max(mean[i], 1.0 - mean[i]);
    }
    return field;
}

CalibrationReport empty_report(const BinningConfig& cfg)
{
    cfg.validate();
    CalibrationReport report;
    report.config = cfg;
    report.bins.resize(cfg.bin_count);
    const double width = (cfg.range_high - cfg.range_low) / static_cast<double>(cfg.bin_count);
    for (std::uint32_t m = 0; m < cfg.bin_count; ++m) {
        report.bins[m].low = cfg.range_low + width * m;
        report.bins[m].high = m + 1 == cfg.bin_count ? cfg.range_high : cfg.range_low + width * (m + 1);
    }
    return report;
}

namespace {

void accumulate(CalibrationReport& into, const CalibrationReport& from)
{
    for (std::size_t m = 0; m < into.bins.size(); ++m) {
        into.bins[m].count += from.bins[m].count;
        into.bins[m].correct += from.bins[m].correct;
        into.bins[m].confidence_sum += from.bins[m].confidence_sum;
    }
    into.total_pixels += from.total_pixels;
    into.foreground_pixels += from.foreground_pixels;
    into.predicted_foreground += from.predicted_foreground;
    into.correct_pixels += from.correct_pixels;
}

} // namespace

CalibrationReport compute_ece(const ProbabilityMap& mean, const BinaryMask& truth,
                              const BinningConfig& cfg, const std::string& case_id)
{
    require_same_shape(mean.height(), mean.width(), truth.height(), truth.width(),
                       "probability map vs ground-truth mask");
    auto report = empty_report(cfg);
    report.case_id = case_id;

    std::vector<CalibrationReport> partial(chunk_count(mean.size(), kDefaultChunk), report);
    for_each_chunk(mean.size(), kDefaultChunk, [&](std::size_t begin, std::size_t end, std::size_t c) {
        auto& local = partial[c];
        for (std::size_t i = begin; i < end; ++i) {
            const double p = mean[i];
            const double conf = std::max(p, 1.0 - p);
            const bool predicted = p >= cfg.threshold;
            const bool actual = truth[i];
            const bool correct = predicted == actual;
            auto& bin = local.bins[bin_index(conf, cfg)];
            ++bin.count;
            bin.correct += correct ? 1 : 0;
            bin.confidence_sum += conf;
            local.foreground_pixels += actual ? 1 : 0;
            local.predicted_foreground += predicted ? 1 : 0;
            local.correct_pixels += correct ? 1 : 0;
        }
        local.total_pixels = end - begin;
    });
    for (const auto& p : partial) {
        accumulate(report, p);
    }
    report.finalize();
    return report;
}

CalibrationReport pool_calibration(std::span<const CalibrationReport> reports)
{
    if (reports.empty()) {
        throw Error(ErrorCode::EmptyInput, "no calibration reports to pool");
    }
    auto pooled = empty_report(reports.front().config);
    pooled.scope = "pooled";
    for (const auto& r : reports) {
        if (!(r.config == pooled.config) || r.bins.size() != pooled.bins.size()) {
            throw Error(ErrorCode::ConfigMismatch,
                        "report '" + r.case_id + "' uses a different binning configuration");
        }
        accumulate(pooled, r);
    }
    pooled.finalize();
    return pooled;
}

} // namespace segunc
