#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segunc/datamodel.hpp"

namespace segunc {

struct BinningConfig {
    std::uint32_t bin_count = 30;
    double range_low = 0.5;
    double range_high = 1.0;
    double threshold = 0.5; // y_hat = (p >= threshold)

    // Throws InvalidConfig unless bin_count >= 1, 0 <= low < high <= 1, threshold in [0, 1].
    void validate() const;

    bool operator==(const BinningConfig&) const = default;
};

// Bins are [low, high) except the last, which is closed. Confidences outside the
// configured range are assigned to the nearest end bin so every pixel is counted.
[[nodiscard]] std::uint32_t bin_index(double confidence, const BinningConfig& cfg) noexcept;

struct BinRecord {
    double low = 0.0;
    double high = 0.0;
    std::uint64_t count = 0;
    std::uint64_t correct = 0;
    double confidence_sum = 0.0;

    // Empty bins have neither.
    [[nodiscard]] std::optional<double> accuracy() const;
    [[nodiscard]] std::optional<double> confidence() const;
    [[nodiscard]] double midpoint() const noexcept { return 0.5 * (low + high); }
};

struct CalibrationReport {
    BinningConfig config;
    std::string scope = "case"; // "case" or "pooled"
    std::string case_id;
    std::vector<BinRecord> bins;
    std::uint64_t total_pixels = 0;
    std::uint64_t foreground_pixels = 0; // ground-truth foreground
    std::uint64_t predicted_foreground = 0;
    std::uint64_t correct_pixels = 0;
    double ece = 0.0;
    double pixel_accuracy = 0.0; // 0 when there are no pixels

    // Recomputes ece and pixel_accuracy from the bin sums.
    void finalize();
};

[[nodiscard]] ScalarField confidence_map(const ProbabilityMap& mean);

// A report with all bins present and zero counts; the identity for pooling.
[[nodiscard]] CalibrationReport empty_report(const BinningConfig& cfg);

[[nodiscard]] CalibrationReport compute_ece(const ProbabilityMap& mean, const BinaryMask& truth,
                                            const BinningConfig& cfg = {},
                                            const std::string& case_id = {});

// Sums per-bin counts and confidence/accuracy sums, then recomputes ECE. Throws
// ConfigMismatch if the inputs were binned differently, EmptyInput for no reports.
[[nodiscard]] CalibrationReport pool_calibration(std::span<const CalibrationReport> reports);

} // namespace segunc
