#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "segunc/image_io.hpp"

namespace segunc {

struct DatasetEntry {
    std::string image_path;              // relative to the index root, '/' separated
    std::vector<std::string> mask_paths; // same convention, sorted
    std::string content_hash;            // SHA-256 hex of width, height and decoded gray pixels
    std::uint64_t perceptual_hash = 0;   // 64-bit difference hash
    std::uint32_t width = 0;
    std::uint32_t height = 0;
};

// Entries are sorted by image path; "first" and "second" occurrence refer to
// this order.
struct DatasetIndex {
    std::filesystem::path root;
    std::vector<DatasetEntry> entries;
};

// Scans `root` recursively. `<dir>/<name>_mask.png` and `<dir>/<name>_mask_<n>.png`
// (PNG or PGM) belong to `<dir>/<name>.png|pgm`. Throws MissingMask for an image
// with no mask and ShapeMismatch when a mask's size differs from its image.
[[nodiscard]] DatasetIndex index_dataset(const std::filesystem::path& root);

[[nodiscard]] std::string content_hash(const GrayImage& image);

// Area-average the image down to 9 columns x 8 rows; bit (row * 8 + col) is set
// when cell (row, col) is darker than cell (row, col + 1).
[[nodiscard]] std::uint64_t difference_hash(const GrayImage& image);

[[nodiscard]] int hamming_distance(std::uint64_t a, std::uint64_t b) noexcept;

struct PairComparison {
    std::size_t first = 0; // entry indices into DatasetIndex::entries
    std::size_t second = 0;
    bool exact = false; // equal content hash
    int hamming = 0;
    std::optional<double> mask_dice; // absent when mask sizes differ
};

struct DuplicateGroup {
    std::string id;
    std::vector<std::size_t> members; // ascending entry index
    std::vector<PairComparison> pairs;
    bool conflict = false; // some pairwise mask dice < 1
};

// Connected components of {equal content hash} union {dHash distance <= threshold}.
// Multiple masks of one image are unioned before the pairwise Dice.
[[nodiscard]] std::vector<DuplicateGroup> find_duplicates(const DatasetIndex& index,
                                                          int hamming_threshold = 4);

enum class DedupStrategy {
    A1, // drop the first occurrence
    A2, // drop the second occurrence
    A3, // keep the preferred member
};

[[nodiscard]] DedupStrategy parse_strategy(std::string_view name);
[[nodiscard]] std::string_view to_string(DedupStrategy strategy) noexcept;

// group id -> kept image path
using Preferences = std::map<std::string, std::string>;

// CSV `group_id,keep_path`, optional header row.
[[nodiscard]] Preferences read_preferences(const std::filesystem::path& path);

struct GroupDecision {
    std::string group_id;
    std::vector<std::size_t> keep;
    std::vector<std::size_t> remove;
};

// For pairs, A1 removes the first member and A2 the second. Larger groups keep a
// single member so no duplicates remain: A1 keeps the last, A2 keeps the first.
// A3 needs a preference for every group (MissingPreference) naming one of its
// members (InvalidPreference).
[[nodiscard]] std::vector<GroupDecision> plan_strategy(const DatasetIndex& index,
                                                       std::span<const DuplicateGroup> groups,
                                                       DedupStrategy strategy,
                                                       const Preferences& preferences = {});

[[nodiscard]] DatasetIndex apply_strategy(const DatasetIndex& index,
                                          std::span<const DuplicateGroup> groups,
                                          DedupStrategy strategy,
                                          const Preferences& preferences = {});

// Deterministic audit: groups, pairwise annotation Dice, conflict flags and the
// removal preview of each strategy. The A3 preview lists candidates only unless
// preferences cover every group.
[[nodiscard]] nlohmann::json audit_report(const DatasetIndex& index,
                                          std::span<const DuplicateGroup> groups,
                                          int hamming_threshold,
                                          const std::optional<Preferences>& preferences = {});

} // namespace segunc
