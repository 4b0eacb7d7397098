#include "segunc/serialize.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "segunc/error.hpp"

namespace segunc {

namespace {

nlohmann::json optional_number(const std::optional<double>& v)
{
    return v ? nlohmann::json(*v) : nlohmann::json();
}

std::string format_number(double v)
{
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

} // namespace

void to_json(nlohmann::json& j, const BinningConfig& cfg)
{
    j = {{"bin_count", cfg.bin_count},
         {"range_low", cfg.range_low},
         {"range_high", cfg.range_high},
         {"threshold", cfg.threshold}};
}

void from_json(const nlohmann::json& j, BinningConfig& cfg)
{
    cfg.bin_count = j.at("bin_count").get<std::uint32_t>();
    cfg.range_low = j.at("range_low").get<double>();
    cfg.range_high = j.at("range_high").get<double>();
    cfg.threshold = j.at("threshold").get<double>();
}

void to_json(nlohmann::json& j, const CalibrationReport& report)
{
    auto bins = nlohmann::json::array();
    for (const auto& b : report.bins) {
        bins.push_back({{"bin_low", b.low},
                        {"bin_high", b.high},
                        {"count", b.count},
                        {"correct", b.correct},
                        {"confidence_sum", b.confidence_sum},
                        {"accuracy", optional_number(b.accuracy())},
                        {"confidence", optional_number(b.confidence())}});
    }
    j = {{"scope", report.scope},
         {"case_id", report.case_id},
         {"config", report.config},
         {"bin_edges", "[low, high) except the last bin, which is closed"},
         {"ece", report.ece},
         {"total_pixels", report.total_pixels},
         {"foreground_pixels", report.foreground_pixels},
         {"background_pixels", report.total_pixels - report.foreground_pixels},
         {"predicted_foreground", report.predicted_foreground},
         {"correct_pixels", report.correct_pixels},
         {"pixel_accuracy", report.pixel_accuracy},
         {"bins", bins}};
}

void from_json(const nlohmann::json& j, CalibrationReport& report)
{
    report.scope = j.at("scope").get<std::string>();
    report.case_id = j.value("case_id", std::string{});
    report.config = j.at("config").get<BinningConfig>();
    report.total_pixels = j.at("total_pixels").get<std::uint64_t>();
    report.foreground_pixels = j.at("foreground_pixels").get<std::uint64_t>();
    report.predicted_foreground = j.at("predicted_foreground").get<std::uint64_t>();
    report.correct_pixels = j.at("correct_pixels").get<std::uint64_t>();
    report.bins.clear();
    for (const auto& b : j.at("bins")) {
        BinRecord rec;
        rec.low = b.at("bin_low").get<double>();
        rec.high = b.at("bin_high").get<double>();
        rec.count = b.at("count").get<std::uint64_t>();
        rec.correct = b.at("correct").get<std::uint64_t>();
        rec.confidence_sum = b.at("confidence_sum").get<double>();
        report.bins.push_back(rec);
    }
    report.finalize();
}

void to_json(nlohmann::json& j, const FieldStats& stats)
{
    j = {{"count", stats.count},
         {"mean", stats.mean},
         {"min", stats.min},
         {"max", stats.max},
         {"std", stats.std}};
}

void to_json(nlohmann::json& j, const UncertaintySummary& summary)
{
    j = {{"entropy", summary.entropy}, {"mutual_information", summary.mutual_information}};
}

void to_json(nlohmann::json& j, const CohortFieldStats& stats)
{
    j = {{"cases", stats.cases},
         {"mean_of_case_means", stats.mean_of_means},
         {"median_of_case_means", stats.median_of_means},
         {"min", stats.min},
         {"max", stats.max},
         {"mean_within_case_std", stats.mean_within_case_std}};
}

void to_json(nlohmann::json& j, const CohortUncertainty& cohort)
{
    j = {{"entropy", cohort.entropy}, {"mutual_information", cohort.mutual_information}};
}

void to_json(nlohmann::json& j, const CaseEvaluation& eval)
{
    j = {{"case_id", eval.case_id},
         {"dice", eval.dice},
         {"iou", eval.iou},
         {"pixel_accuracy", eval.pixel_accuracy}};
    if (eval.uncertainty) {
        j["uncertainty"] = *eval.uncertainty;
    }
}

void to_json(nlohmann::json& j, const CaseAverages& avg)
{
    j = {{"averaging", "macro (unweighted mean over cases)"},
         {"cases", avg.cases},
         {"dice", avg.dice},
         {"iou", avg.iou},
         {"pixel_accuracy", avg.pixel_accuracy}};
}

void to_json(nlohmann::json& j, const FoldAggregate& agg)
{
    j = {{"fold_means", agg.fold_means},
         {"mean", agg.mean},
         {"std", agg.std},
         {"std_normalization", "sample (n-1)"},
         {"min", agg.min},
         {"max", agg.max}};
}

void to_json(nlohmann::json& j, const SynthSpec& spec)
{
    j = {{"case_id", spec.case_id},
         {"height", spec.height},
         {"width", spec.width},
         {"k", spec.k},
         {"t", spec.t},
         {"seed", spec.seed},
         {"regime", std::string(to_string(spec.regime))},
         {"gamma", spec.gamma},
         {"noise_scale", spec.noise_scale},
         {"rng", "mt19937_64(seed); uniform ((x>>11)+0.5)*2^-53; Box-Muller normals"}};
}

void write_reliability_csv(std::ostream& out, const CalibrationReport& report)
{
    out << "bin_low,bin_high,bin_mid,conf,acc,count\n";
    for (const auto& b : report.bins) {
        out << format_number(b.low) << ',' << format_number(b.high) << ','
            << format_number(b.midpoint()) << ',';
        if (b.count > 0) {
            out << format_number(*b.confidence()) << ',' << format_number(*b.accuracy());
        } else {
            out << ',';
        }
        out << ',' << b.count << '\n';
    }
}

void write_case_csv(std::ostream& out, std::span<const CaseEvaluation> cases,
                    const std::map<std::string, std::string>& fold_of_case)
{
    out << kCaseCsvHeader << '\n';
    for (const auto& c : cases) {
        const auto fold = fold_of_case.find(c.case_id);
        out << c.case_id << ',' << (fold == fold_of_case.end() ? "" : fold->second) << ','
            << format_number(c.dice) << ',' << format_number(c.iou) << ','
            << format_number(c.pixel_accuracy) << ',';
        if (c.uncertainty) {
            out << format_number(c.uncertainty->entropy.mean) << ','
                << format_number(c.uncertainty->entropy.std) << ','
                << format_number(c.uncertainty->mutual_information.mean) << ','
                << format_number(c.uncertainty->mutual_information.std);
        } else {
            out << ",,,";
        }
        out << '\n';
    }
}

std::size_t CsvTable::column(const std::string& name) const
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return i;
        }
    }
    throw Error(ErrorCode::ParseError, "CSV has no column '" + name + "'");
}

CsvTable read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    }
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ss(line);
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        if (!line.empty() && line.back() == ',') {
            cells.emplace_back();
        }
        return cells;
    };
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (first) {
            table.header = split(line);
            first = false;
        } else {
            auto row = split(line);
            if (row.size() != table.header.size()) {
                throw Error(ErrorCode::ParseError, path.string() + ": row '" + line + "' has " +
                                                       std::to_string(row.size()) + " cells, expected " +
                                                       std::to_string(table.header.size()));
            }
            table.rows.push_back(std::move(row));
        }
    }
    if (first) {
        throw Error(ErrorCode::ParseError, path.string() + ": empty CSV");
    }
    return table;
}

double parse_double(const std::string& text, const std::string& context)
{
    double value = 0.0;
    const auto* begin = text.data();
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw Error(ErrorCode::ParseError, context + ": '" + text + "' is not a number");
    }
    return value;
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j)
{
    std::ofstream out(path);
    out << j.dump(2) << '\n';
    if (!out) {
        throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    }
}

nlohmann::json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
}

} // namespace segunc
