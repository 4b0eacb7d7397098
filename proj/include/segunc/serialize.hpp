#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "segunc/calibration.hpp"
#include "segunc/overlap.hpp"
#include "segunc/synthgen.hpp"
#include "segunc/uncertainty.hpp"

namespace segunc {

void to_json(nlohmann::json& j, const BinningConfig& cfg);
void from_json(const nlohmann::json& j, BinningConfig& cfg);
void to_json(nlohmann::json& j, const CalibrationReport& report);
void from_json(const nlohmann::json& j, CalibrationReport& report);
void to_json(nlohmann::json& j, const FieldStats& stats);
void to_json(nlohmann::json& j, const UncertaintySummary& summary);
void to_json(nlohmann::json& j, const CohortFieldStats& stats);
void to_json(nlohmann::json& j, const CohortUncertainty& cohort);
void to_json(nlohmann::json& j, const CaseEvaluation& eval);
void to_json(nlohmann::json& j, const CaseAverages& avg);
void to_json(nlohmann::json& j, const FoldAggregate& agg);
void to_json(nlohmann::json& j, const SynthSpec& spec);

// bin_low,bin_high,bin_mid,conf,acc,count; conf/acc empty for empty bins.
void write_reliability_csv(std::ostream& out, const CalibrationReport& report);

inline constexpr const char* kCaseCsvHeader =
    "case_id,fold,dice,iou,pixel_accuracy,mean_entropy,std_entropy,mean_mi,std_mi";

// `fold` may be empty. Uncertainty columns are empty when absent.
void write_case_csv(std::ostream& out, std::span<const CaseEvaluation> cases,
                    const std::map<std::string, std::string>& fold_of_case);

// Minimal CSV reader: comma separated, no quoting, first row is the header.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    [[nodiscard]] std::size_t column(const std::string& name) const; // throws ParseError
};

[[nodiscard]] CsvTable read_csv(const std::filesystem::path& path);

[[nodiscard]] double parse_double(const std::string& text, const std::string& context);

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);
[[nodiscard]] nlohmann::json read_json_file(const std::filesystem::path& path);

} // namespace segunc
