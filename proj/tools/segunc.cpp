// segunc: aggregate stochastic segmentation predictions, map their uncertainty,
// measure calibration and overlap, and audit datasets for duplicates.
//
// Exit codes: 0 success, 2 validation or usage error, 1 internal error.
// Diagnostics go to stderr as `error[<Code>]: <message>`.

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "segunc/aggregate.hpp"
#include "segunc/calibration.hpp"
#include "segunc/dedup.hpp"
#include "segunc/error.hpp"
#include "segunc/image_io.hpp"
#include "segunc/overlap.hpp"
#include "segunc/parallel.hpp"
#include "segunc/pmap.hpp"
#include "segunc/serialize.hpp"
#include "segunc/synthgen.hpp"
#include "segunc/uncertainty.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace segunc;

namespace {

constexpr const char* kManifestName = "run_manifest.json";

std::string utc_now()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Collects what a subcommand did and writes one manifest per output directory,
// after every other output.
class RunManifest {
public:
    explicit RunManifest(std::string subcommand)
        : subcommand_(std::move(subcommand)), started_(utc_now()) {}

    json& config() { return config_; }
    void input(const fs::path& p) { inputs_.push_back(p.generic_string()); }
    void output(const fs::path& p)
    {
        outputs_.push_back(p.generic_string());
        auto dir = p.parent_path();
        dirs_.insert(dir.empty() ? fs::path(".") : dir);
    }

    void write() const
    {
        const json manifest = {
            {"tool", "segunc"},
            {"version", SEGUNC_VERSION},
            {"subcommand", subcommand_},
            {"config", config_},
            {"inputs", inputs_},
            {"outputs", outputs_},
            {"threads", worker_count()},
            {"schemas",
             {{"pmap", "PMAP1 v1"},
              {"calibration", "segunc.calibration/1"},
              {"uncertainty", "segunc.uncertainty/1"},
              {"evaluation", "segunc.evaluation/1"},
              {"fold_report", "segunc.fold-report/1"},
              {"dedup_audit", "segunc.dedup-audit/1"}}},
            {"started_at", started_},
            {"finished_at", utc_now()},
        };
        for (const auto& dir : dirs_) {
            write_json_file(dir / kManifestName, manifest);
        }
    }

private:
    std::string subcommand_;
    std::string started_;
    json config_ = json::object();
    std::vector<std::string> inputs_;
    std::vector<std::string> outputs_;
    std::set<fs::path> dirs_;
};

void ensure_parent(const fs::path& p)
{
    if (p.has_parent_path()) {
        fs::create_directories(p.parent_path());
    }
}

bool has_extension(const fs::path& p, const char* ext)
{
    return p.extension() == ext;
}

// Entropy/MI export: .pgm is 16-bit with [0, ln 2 in the chosen unit] -> [0, 65535];
// anything else is a raw float32 dump with a JSON sidecar.
void write_uncertainty_field(const ScalarField& field, const fs::path& path, LogBase base,
                             const std::string& quantity)
{
    ensure_parent(path);
    if (has_extension(path, ".pgm")) {
        const double top = std::numbers::ln2 * unit_scale(base);
        std::vector<std::uint16_t> pixels(field.size());
        for (std::size_t i = 0; i < field.size(); ++i) {
            const double scaled = std::clamp(field.values[i] / top, 0.0, 1.0) * 65535.0;
            pixels[i] = static_cast<std::uint16_t>(std::lround(scaled));
        }
        write_pgm16(path, field.height, field.width, pixels);
    } else {
        write_raw_f32(path, field.height, field.width, field.values,
                      quantity + " (" + std::string(to_string(base)) + ")");
    }
}

// Prediction inputs: a PMAP stack, or a float32 mean map with sidecar.
struct Prediction {
    std::string case_id;
    ProbabilityMap mean;
    std::optional<UncertaintySummary> uncertainty;
};

Prediction load_prediction(const fs::path& path, AggregationMode mode)
{
    if (has_extension(path, ".pmap")) {
        const auto stack = read_sample_stack(path);
        auto mean = aggregate_mean(stack, mode);
        return {stack.case_id(), std::move(mean), summarize_uncertainty(mutual_information_map(stack))};
    }
    auto field = read_raw_f32(path);
    try {
        return {path.stem().string(), ProbabilityMap(field.height, field.width, std::move(field.values)),
                std::nullopt};
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

struct CasePair {
    std::string case_id;
    fs::path prediction;
    fs::path truth;
};

std::map<std::string, fs::path> files_by_stem(const fs::path& dir, std::initializer_list<const char*> exts)
{
    if (!fs::is_directory(dir)) {
        throw Error(ErrorCode::IoFailure, dir.string() + " is not a directory");
    }
    std::map<std::string, fs::path> out;
    for (const auto& item : fs::directory_iterator(dir)) {
        if (!item.is_regular_file()) {
            continue;
        }
        for (const char* ext : exts) {
            if (item.path().extension() == ext) {
                const auto stem = item.path().stem().string();
                if (out.contains(stem)) {
                    throw Error(ErrorCode::OrphanFile, "ambiguous case '" + stem + "' in " + dir.string());
                }
                out[stem] = item.path();
            }
        }
    }
    return out;
}

// Pairs predictions with masks by filename stem; any unmatched file is an error.
std::vector<CasePair> pair_cases(const fs::path& pred_dir, const fs::path& gt_dir)
{
    const auto preds = files_by_stem(pred_dir, {".pmap", ".f32"});
    const auto truths = files_by_stem(gt_dir, {".png", ".pgm"});
    std::vector<std::string> orphans;
    std::vector<CasePair> pairs;
    for (const auto& [stem, path] : preds) {
        const auto it = truths.find(stem);
        if (it == truths.end()) {
            orphans.push_back("prediction without mask: " + path.generic_string());
        } else {
            pairs.push_back({stem, path, it->second});
        }
    }
    for (const auto& [stem, path] : truths) {
        if (!preds.contains(stem)) {
            orphans.push_back("mask without prediction: " + path.generic_string());
        }
    }
    if (!orphans.empty()) {
        std::ostringstream msg;
        msg << orphans.size() << " unpaired file(s)";
        for (const auto& o : orphans) {
            msg << "\n  " << o;
        }
        throw Error(ErrorCode::OrphanFile, msg.str());
    }
    if (pairs.empty()) {
        throw Error(ErrorCode::EmptyInput, "no prediction/mask pairs in " + pred_dir.string());
    }
    return pairs;
}

std::map<std::string, std::string> read_fold_mapping(const fs::path& path)
{
    const auto table = read_csv(path);
    const auto case_col = table.column("case_id");
    const auto fold_col = table.column("fold");
    std::map<std::string, std::string> out;
    for (const auto& row : table.rows) {
        out[row[case_col]] = row[fold_col];
    }
    return out;
}

BinningConfig parse_binning(std::uint32_t bins, const std::string& range, double threshold)
{
    BinningConfig cfg;
    cfg.bin_count = bins;
    cfg.threshold = threshold;
    const auto colon = range.find(':');
    if (colon == std::string::npos) {
        throw Error(ErrorCode::InvalidConfig, "--range must look like low:high, got '" + range + "'");
    }
    cfg.range_low = parse_double(range.substr(0, colon), "--range low");
    cfg.range_high = parse_double(range.substr(colon + 1), "--range high");
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------- subcommands

struct AggregateArgs {
    fs::path input;
    std::string mode;
    fs::path out;
};

void run_aggregate(const AggregateArgs& a)
{
    RunManifest manifest("aggregate");
    const auto mode = parse_mode(a.mode);
    manifest.config() = {{"mode", std::string(to_string(mode))}};
    manifest.input(a.input);
    const auto stack = read_sample_stack(a.input);
    const auto mean = aggregate_mean(stack, mode);
    ensure_parent(a.out);
    if (has_extension(a.out, ".pmap")) {
        write_mean_pmap(mean, a.out);
    } else {
        write_raw_f32(a.out, mean.height(), mean.width(), mean.values(), "mean foreground probability");
        manifest.output(sidecar_path(a.out));
    }
    manifest.output(a.out);
    manifest.write();
}

struct UncertaintyArgs {
    fs::path input;
    std::string mode = "combined";
    fs::path entropy_out;
    fs::path mi_out;
    std::string base = "nats";
    fs::path summary_out;
};

void run_uncertainty(const UncertaintyArgs& a)
{
    RunManifest manifest("uncertainty");
    const auto mode = parse_mode(a.mode);
    const auto base = parse_log_base(a.base);
    manifest.config() = {{"mode", std::string(to_string(mode))},
                         {"log_base", std::string(to_string(base))},
                         {"mi_average", "all K*T samples"}};
    manifest.input(a.input);
    const auto stack = read_sample_stack(a.input);
    check_mode(stack, mode);
    const auto maps = rescale(mutual_information_map(stack), base);
    if (!a.entropy_out.empty()) {
        write_uncertainty_field(maps.entropy, a.entropy_out, base, "predictive entropy");
        manifest.output(a.entropy_out);
    }
    if (!a.mi_out.empty()) {
        write_uncertainty_field(maps.mutual_information, a.mi_out, base, "mutual information");
        manifest.output(a.mi_out);
    }
    if (!a.summary_out.empty()) {
        ensure_parent(a.summary_out);
        write_json_file(a.summary_out, {{"schema", "segunc.uncertainty/1"},
                                        {"case_id", stack.case_id()},
                                        {"k", stack.members()},
                                        {"t", stack.passes()},
                                        {"pixels", stack.pixel_count()},
                                        {"log_base", std::string(to_string(base))},
                                        {"std_normalization", "population"},
                                        {"summary", summarize_uncertainty(maps)}});
        manifest.output(a.summary_out);
    }
    manifest.write();
}

struct CalibrateArgs {
    fs::path pred_dir;
    fs::path gt_dir;
    std::uint32_t bins = 30;
    std::string range = "0.5:1.0";
    double threshold = 0.5;
    std::string mode = "combined";
    fs::path out;
    fs::path reliability;
};

void run_calibrate(const CalibrateArgs& a)
{
    RunManifest manifest("calibrate");
    const auto cfg = parse_binning(a.bins, a.range, a.threshold);
    const auto mode = parse_mode(a.mode);
    manifest.config() = {{"binning", cfg}, {"mode", std::string(to_string(mode))},
                         {"pairing", "filename stem"}};
    const auto pairs = pair_cases(a.pred_dir, a.gt_dir);
    std::vector<CalibrationReport> reports;
    for (const auto& pair : pairs) {
        manifest.input(pair.prediction);
        manifest.input(pair.truth);
        const auto pred = load_prediction(pair.prediction, mode);
        const auto truth = read_mask(pair.truth);
        try {
            reports.push_back(compute_ece(pred.mean, truth, cfg, pair.case_id));
        } catch (const Error& e) {
            throw Error(e.code(), pair.case_id + ": " + e.what());
        }
    }
    const auto pooled = pool_calibration(reports);
    const auto mean_case_ece = [&] {
        double s = 0.0;
        for (const auto& r : reports) {
            s += r.ece;
        }
        return s / static_cast<double>(reports.size());
    }();
    ensure_parent(a.out);
    write_json_file(a.out, {{"schema", "segunc.calibration/1"},
                            {"config", cfg},
                            {"pooled", pooled},
                            {"mean_per_case_ece", mean_case_ece},
                            {"cases", reports}});
    manifest.output(a.out);
    if (!a.reliability.empty()) {
        ensure_parent(a.reliability);
        std::ofstream csv(a.reliability);
        write_reliability_csv(csv, pooled);
        if (!csv) {
            throw Error(ErrorCode::IoFailure, "cannot write " + a.reliability.string());
        }
        manifest.output(a.reliability);
    }
    manifest.write();
}

struct EvaluateArgs {
    fs::path pred_dir;
    fs::path gt_dir;
    double threshold = 0.5;
    std::string mode = "combined";
    fs::path folds;
    fs::path out_csv;
    fs::path out_json;
};

FoldAggregate aggregate_fold_map(const std::map<std::string, double>& per_fold)
{
    std::vector<double> means;
    for (const auto& [fold, mean] : per_fold) {
        means.push_back(mean);
    }
    return aggregate_folds(means);
}

json fold_section(const std::map<std::string, double>& per_fold)
{
    json folds = json::object();
    for (const auto& [fold, mean] : per_fold) {
        folds[fold] = mean;
    }
    return {{"per_fold_dice", folds}, {"aggregate", aggregate_fold_map(per_fold)}};
}

void run_evaluate(const EvaluateArgs& a)
{
    RunManifest manifest("evaluate");
    const auto mode = parse_mode(a.mode);
    manifest.config() = {{"threshold", a.threshold},
                         {"mode", std::string(to_string(mode))},
                         {"averaging", "macro"},
                         {"pairing", "filename stem"}};
    if (!(a.threshold >= 0.0 && a.threshold <= 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "threshold must lie in [0, 1]");
    }
    std::map<std::string, std::string> fold_of_case;
    if (!a.folds.empty()) {
        manifest.input(a.folds);
        fold_of_case = read_fold_mapping(a.folds);
    }
    std::vector<CaseEvaluation> cases;
    std::vector<UncertaintySummary> summaries;
    for (const auto& pair : pair_cases(a.pred_dir, a.gt_dir)) {
        manifest.input(pair.prediction);
        manifest.input(pair.truth);
        const auto pred = load_prediction(pair.prediction, mode);
        const auto truth = read_mask(pair.truth);
        CaseEvaluation eval;
        try {
            eval = evaluate_case(pred.mean, truth, a.threshold, pair.case_id);
        } catch (const Error& e) {
            throw Error(e.code(), pair.case_id + ": " + e.what());
        }
        eval.uncertainty = pred.uncertainty;
        if (pred.uncertainty) {
            summaries.push_back(*pred.uncertainty);
        }
        cases.push_back(std::move(eval));
    }
    json out = {{"schema", "segunc.evaluation/1"},
                {"threshold", a.threshold},
                {"cases", cases},
                {"macro_average", macro_average(cases)}};
    if (!summaries.empty()) {
        out["cohort_uncertainty"] = summarize_cohort(summaries);
    }
    if (!fold_of_case.empty()) {
        out["folds"] = fold_section(fold_dice_means(cases, fold_of_case));
    }
    if (!a.out_csv.empty()) {
        ensure_parent(a.out_csv);
        std::ofstream csv(a.out_csv);
        write_case_csv(csv, cases, fold_of_case);
        if (!csv) {
            throw Error(ErrorCode::IoFailure, "cannot write " + a.out_csv.string());
        }
        manifest.output(a.out_csv);
    }
    if (!a.out_json.empty()) {
        ensure_parent(a.out_json);
        write_json_file(a.out_json, out);
        manifest.output(a.out_json);
    }
    manifest.write();
}

struct ReportArgs {
    fs::path cases;
    fs::path folds;
    fs::path fold_table;
    fs::path out;
    fs::path out_csv;
};

// Either per-case rows (with a fold column or a --folds mapping) or a fold table
// whose first column labels folds and whose remaining columns are datasets.
void run_report(const ReportArgs& a)
{
    RunManifest manifest("report");
    json out = {{"schema", "segunc.fold-report/1"}};
    std::vector<std::pair<std::string, FoldAggregate>> rows;

    if (!a.fold_table.empty()) {
        manifest.input(a.fold_table);
        const auto table = read_csv(a.fold_table);
        if (table.header.size() < 2) {
            throw Error(ErrorCode::ParseError, a.fold_table.string() + ": need a fold column and at least one dataset column");
        }
        json datasets = json::object();
        for (std::size_t col = 1; col < table.header.size(); ++col) {
            std::vector<double> values;
            for (const auto& row : table.rows) {
                values.push_back(parse_double(row[col], a.fold_table.string() + " column " + table.header[col]));
            }
            auto agg = aggregate_folds(values);
            datasets[table.header[col]] = agg;
            rows.emplace_back(table.header[col], std::move(agg));
        }
        out["source"] = "fold table";
        out["datasets"] = datasets;
    } else if (!a.cases.empty()) {
        manifest.input(a.cases);
        const auto table = read_csv(a.cases);
        const auto id_col = table.column("case_id");
        const auto dice_col = table.column("dice");
        const auto iou_col = table.column("iou");
        const auto acc_col = table.column("pixel_accuracy");
        std::map<std::string, std::string> fold_of_case;
        if (!a.folds.empty()) {
            manifest.input(a.folds);
            fold_of_case = read_fold_mapping(a.folds);
        }
        std::vector<CaseEvaluation> cases;
        for (const auto& row : table.rows) {
            CaseEvaluation eval;
            eval.case_id = row[id_col];
            eval.dice = parse_double(row[dice_col], "dice of " + eval.case_id);
            eval.iou = parse_double(row[iou_col], "iou of " + eval.case_id);
            eval.pixel_accuracy = parse_double(row[acc_col], "pixel_accuracy of " + eval.case_id);
            if (a.folds.empty()) {
                const auto fold = row[table.column("fold")];
                if (!fold.empty()) {
                    fold_of_case[eval.case_id] = fold;
                }
            }
            cases.push_back(std::move(eval));
        }
        if (cases.empty()) {
            throw Error(ErrorCode::EmptyInput, a.cases.string() + " has no case rows");
        }
        out["source"] = "case table";
        out["macro_average"] = macro_average(cases);
        if (fold_of_case.empty()) {
            // No folds: every case stands alone, so the aggregate is over cases.
            std::vector<double> dices;
            for (const auto& c : cases) {
                dices.push_back(c.dice);
            }
            auto agg = aggregate_folds(dices);
            out["aggregate_over_cases"] = agg;
            rows.emplace_back("cases", std::move(agg));
        } else {
            const auto per_fold = fold_dice_means(cases, fold_of_case);
            rows.emplace_back("dice", aggregate_fold_map(per_fold));
            out["folds"] = fold_section(per_fold);
        }
    } else {
        throw Error(ErrorCode::InvalidConfig, "report needs --fold-table or --cases");
    }

    if (!a.out_csv.empty()) {
        ensure_parent(a.out_csv);
        std::ofstream csv(a.out_csv);
        csv << "dataset,folds,mean,std,min,max\n" << std::setprecision(17);
        for (const auto& [name, agg] : rows) {
            csv << name << ',' << agg.fold_means.size() << ',' << agg.mean << ',' << agg.std << ','
                << agg.min << ',' << agg.max << '\n';
        }
        manifest.output(a.out_csv);
    }
    ensure_parent(a.out);
    write_json_file(a.out, out);
    manifest.output(a.out);
    manifest.write();
}

struct DedupArgs {
    fs::path dir;
    std::string strategy;
    fs::path prefs;
    int hamming = 4;
    fs::path report;
    fs::path manifest;
};

void run_dedup(const DedupArgs& a)
{
    RunManifest manifest("dedup");
    if (a.hamming < 0 || a.hamming > 64) {
        throw Error(ErrorCode::InvalidConfig, "--hamming must lie in [0, 64]");
    }
    std::optional<DedupStrategy> strategy;
    if (!a.strategy.empty()) {
        strategy = parse_strategy(a.strategy);
    }
    if (strategy == DedupStrategy::A3 && a.prefs.empty()) {
        throw Error(ErrorCode::MissingPreference, "strategy a3 requires --prefs group_id,keep_path CSV");
    }
    if (strategy && a.manifest.empty()) {
        throw Error(ErrorCode::InvalidConfig, "--strategy needs --manifest to write the kept files");
    }
    std::optional<Preferences> prefs;
    if (!a.prefs.empty()) {
        manifest.input(a.prefs);
        prefs = read_preferences(a.prefs);
    }
    manifest.config() = {{"hamming_threshold", a.hamming},
                         {"strategy", strategy ? json(std::string(to_string(*strategy))) : json()},
                         {"ordering", "lexicographic relative image path"}};
    manifest.input(a.dir);

    const auto index = index_dataset(a.dir);
    const auto groups = find_duplicates(index, a.hamming);
    if (!a.report.empty()) {
        ensure_parent(a.report);
        write_json_file(a.report, audit_report(index, groups, a.hamming, prefs));
        manifest.output(a.report);
    }
    if (strategy) {
        const auto kept = apply_strategy(index, groups, *strategy, prefs.value_or(Preferences{}));
        ensure_parent(a.manifest);
        std::ofstream list(a.manifest);
        for (const auto& entry : kept.entries) {
            list << entry.image_path << '\n';
        }
        if (!list) {
            throw Error(ErrorCode::IoFailure, "cannot write " + a.manifest.string());
        }
        manifest.output(a.manifest);
    }
    manifest.write();
}

struct SynthArgs {
    std::uint64_t pixels = 0;
    std::uint32_t height = 0;
    std::uint32_t width = 0;
    std::uint32_t k = 1;
    std::uint32_t t = 1;
    std::uint64_t seed = 0;
    std::string regime = "calibrated";
    std::optional<double> gamma;
    double noise = 0.0;
    std::uint32_t cases = 1;
    std::string name = "synth";
    fs::path out;
};

void run_synth(const SynthArgs& a)
{
    RunManifest manifest("synth");
    SynthSpec spec;
    spec.regime = parse_regime(a.regime);
    if (a.height != 0 || a.width != 0) {
        spec.height = a.height;
        spec.width = a.width;
    } else {
        if (a.pixels == 0 || a.pixels > 0xFFFFFFFFULL) {
            throw Error(ErrorCode::InvalidSpec, "give --pixels (1..2^32-1) or --height and --width");
        }
        spec.height = 1;
        spec.width = static_cast<std::uint32_t>(a.pixels);
    }
    spec.k = a.k;
    spec.t = a.t;
    spec.noise_scale = a.noise;
    switch (spec.regime) {
    case Regime::Calibrated: spec.gamma = a.gamma.value_or(1.0); break;
    case Regime::Overconfident: spec.gamma = a.gamma.value_or(3.0); break;
    case Regime::Underconfident: spec.gamma = a.gamma.value_or(1.0 / 3.0); break;
    }
    if (a.cases == 0) {
        throw Error(ErrorCode::InvalidSpec, "--cases must be at least 1");
    }
    fs::create_directories(a.out);
    json specs = json::array();
    for (std::uint32_t c = 0; c < a.cases; ++c) {
        spec.seed = a.seed + c;
        if (a.cases == 1) {
            spec.case_id = a.name;
        } else {
            std::ostringstream id;
            id << a.name << '_' << std::setw(3) << std::setfill('0') << c;
            spec.case_id = id.str();
        }
        const auto generated = generate(spec);
        const auto stack_path = a.out / (spec.case_id + ".pmap");
        const auto mask_path = a.out / (spec.case_id + ".pgm");
        const auto spec_path = a.out / (spec.case_id + ".json");
        write_sample_stack(generated.stack, stack_path);
        write_mask(generated.truth, mask_path);
        write_json_file(spec_path, spec);
        for (const auto& p : {stack_path, mask_path, spec_path}) {
            manifest.output(p);
        }
        specs.push_back(spec);
    }
    manifest.config() = {{"specs", specs}};
    manifest.write();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"segunc: uncertainty, calibration and overlap evaluation for stochastic segmentation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", SEGUNC_VERSION);

    AggregateArgs agg;
    auto* c_agg = app.add_subcommand("aggregate", "Average a PMAP stack into a mean probability map");
    c_agg->add_option("--input", agg.input, "PMAP stack")->required();
    c_agg->add_option("--mode", agg.mode, "mc | ensemble | combined")->required();
    c_agg->add_option("--out", agg.out, "output: .f32 (raw + sidecar JSON) or .pmap (K=T=1)")->required();

    UncertaintyArgs unc;
    auto* c_unc = app.add_subcommand("uncertainty", "Predictive entropy and mutual information maps");
    c_unc->add_option("--input", unc.input, "PMAP stack")->required();
    c_unc->add_option("--mode", unc.mode, "mc | ensemble | combined (shape check only)");
    c_unc->add_option("--entropy-out", unc.entropy_out, "entropy map: .pgm (16-bit) or .f32");
    c_unc->add_option("--mi-out", unc.mi_out, "mutual information map: .pgm (16-bit) or .f32");
    c_unc->add_option("--base", unc.base, "nats | bits");
    c_unc->add_option("--summary-out", unc.summary_out, "per-case summary JSON");

    CalibrateArgs cal;
    auto* c_cal = app.add_subcommand("calibrate", "Expected calibration error over paired predictions and masks");
    c_cal->add_option("--pred-dir", cal.pred_dir, "directory of .pmap / .f32 predictions")->required();
    c_cal->add_option("--gt-dir", cal.gt_dir, "directory of .png / .pgm masks")->required();
    c_cal->add_option("--bins", cal.bins, "number of confidence bins");
    c_cal->add_option("--range", cal.range, "confidence range low:high");
    c_cal->add_option("--threshold", cal.threshold, "foreground decision threshold");
    c_cal->add_option("--mode", cal.mode, "aggregation mode for PMAP inputs");
    c_cal->add_option("--out", cal.out, "calibration JSON (pooled + per case)")->required();
    c_cal->add_option("--reliability", cal.reliability, "pooled reliability-diagram CSV");

    EvaluateArgs ev;
    auto* c_ev = app.add_subcommand("evaluate", "Dice, IoU and pixel accuracy per case");
    c_ev->add_option("--pred-dir", ev.pred_dir, "directory of .pmap / .f32 predictions")->required();
    c_ev->add_option("--gt-dir", ev.gt_dir, "directory of .png / .pgm masks")->required();
    c_ev->add_option("--threshold", ev.threshold, "foreground decision threshold");
    c_ev->add_option("--mode", ev.mode, "aggregation mode for PMAP inputs");
    c_ev->add_option("--folds", ev.folds, "CSV case_id,fold");
    c_ev->add_option("--out-csv", ev.out_csv, "per-case CSV");
    c_ev->add_option("--out-json", ev.out_json, "per-case and aggregate JSON");
    c_ev->callback([&] {
        if (ev.out_csv.empty() && ev.out_json.empty()) {
            throw CLI::ValidationError("evaluate", "give --out-csv and/or --out-json");
        }
    });

    ReportArgs rep;
    auto* c_rep = app.add_subcommand("report", "Fold-level mean and standard deviation");
    c_rep->add_option("--cases", rep.cases, "per-case CSV written by evaluate");
    c_rep->add_option("--folds", rep.folds, "CSV case_id,fold (overrides the fold column)");
    c_rep->add_option("--fold-table", rep.fold_table, "CSV: fold label column, then one column per dataset");
    c_rep->add_option("--out", rep.out, "report JSON")->required();
    c_rep->add_option("--out-csv", rep.out_csv, "summary CSV");

    DedupArgs dd;
    auto* c_dd = app.add_subcommand("dedup", "Audit a dataset tree for duplicates and apply A1/A2/A3");
    c_dd->add_option("--dir", dd.dir, "dataset root")->required();
    c_dd->add_option("--strategy", dd.strategy, "a1 | a2 | a3");
    c_dd->add_option("--prefs", dd.prefs, "A3 preferences CSV group_id,keep_path");
    c_dd->add_option("--hamming", dd.hamming, "near-duplicate dHash distance threshold");
    c_dd->add_option("--report", dd.report, "audit JSON");
    c_dd->add_option("--manifest", dd.manifest, "kept image paths, one per line");

    SynthArgs sy;
    auto* c_sy = app.add_subcommand("synth", "Generate synthetic stacks with known calibration");
    c_sy->add_option("--pixels", sy.pixels, "pixels per case (a 1 x N image)");
    c_sy->add_option("--height", sy.height, "image height");
    c_sy->add_option("--width", sy.width, "image width");
    c_sy->add_option("--k", sy.k, "ensemble members");
    c_sy->add_option("--t", sy.t, "passes per member");
    c_sy->add_option("--seed", sy.seed, "base seed; case i uses seed + i");
    c_sy->add_option("--regime", sy.regime, "calibrated | overconfident | underconfident");
    c_sy->add_option("--gamma", sy.gamma, "sharpening exponent (default 1, 3 or 1/3 by regime)");
    c_sy->add_option("--noise", sy.noise, "std of per-sample logit jitter");
    c_sy->add_option("--cases", sy.cases, "number of cases");
    c_sy->add_option("--name", sy.name, "case id (prefix when --cases > 1)");
    c_sy->add_option("--out", sy.out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error[Usage]: " << e.what() << '\n';
        return 2;
    }

    try {
        if (c_agg->parsed()) {
            run_aggregate(agg);
        } else if (c_unc->parsed()) {
            run_uncertainty(unc);
        } else if (c_cal->parsed()) {
            run_calibrate(cal);
        } else if (c_ev->parsed()) {
            run_evaluate(ev);
        } else if (c_rep->parsed()) {
            run_report(rep);
        } else if (c_dd->parsed()) {
            run_dedup(dd);
        } else if (c_sy->parsed()) {
            run_synth(sy);
        }
    } catch (const Error& e) {
        std::cerr << "error[" << to_string(e.code()) << "]: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error[Internal]: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
