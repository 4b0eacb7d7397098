#include "segunc/dedup.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <regex>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "segunc/error.hpp"
#include "segunc/overlap.hpp"
#include "segunc/parallel.hpp"

namespace segunc {

namespace fs = std::filesystem;

namespace {

bool is_image_extension(const fs::path& p)
{
    auto ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".png" || ext == ".pgm";
}

std::string to_hex(std::span<const unsigned char> bytes)
{
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (unsigned char b : bytes) {
        out.push_back(kDigits[b >> 4U]);
        out.push_back(kDigits[b & 0xFU]);
    }
    return out;
}

// Source-pixel coverage of each of `cells` equal output intervals over [0, extent).
std::vector<std::vector<std::pair<std::uint32_t, double>>> coverage(std::uint32_t extent,
                                                                   std::uint32_t cells)
{
    std::vector<std::vector<std::pair<std::uint32_t, double>>> out(cells);
    const double step = static_cast<double>(extent) / cells;
    for (std::uint32_t c = 0; c < cells; ++c) {
        const double a = step * c;
        const double b = step * (c + 1);
        for (auto x = static_cast<std::uint32_t>(a); x < extent && x < b; ++x) {
            const double w = std::min(b, x + 1.0) - std::max(a, static_cast<double>(x));
            if (w > 0.0) {
                out[c].emplace_back(x, w);
            }
        }
    }
    return out;
}

BinaryMask union_mask(const DatasetIndex& index, const DatasetEntry& entry)
{
    std::vector<std::uint8_t> merged;
    std::uint32_t h = 0;
    std::uint32_t w = 0;
    for (const auto& rel : entry.mask_paths) {
        const auto mask = read_mask(index.root / rel);
        if (merged.empty()) {
            h = mask.height();
            w = mask.width();
            merged.assign(mask.values().begin(), mask.values().end());
        } else {
            require_same_shape(h, w, mask.height(), mask.width(),
                               ("masks of " + entry.image_path).c_str());
            for (std::size_t i = 0; i < merged.size(); ++i) {
                merged[i] |= mask.values()[i];
            }
        }
    }
    return BinaryMask(h, w, std::move(merged));
}

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x)
    {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent_[std::max(a, b)] = std::min(a, b);
        }
    }

private:
    std::vector<std::size_t> parent_;
};

} // namespace

std::string content_hash(const GrayImage& image)
{
    std::vector<unsigned char> buffer(8 + image.pixels.size());
    for (unsigned i = 0; i < 4; ++i) {
        buffer[i] = static_cast<unsigned char>((image.width >> (8U * i)) & 0xFFU);
        buffer[4 + i] = static_cast<unsigned char>((image.height >> (8U * i)) & 0xFFU);
    }
    std::copy(image.pixels.begin(), image.pixels.end(), buffer.begin() + 8);
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    if (EVP_Digest(buffer.data(), buffer.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    return to_hex(std::span<const unsigned char>(digest.data(), length));
}

std::uint64_t difference_hash(const GrayImage& image)
{
    constexpr std::uint32_t kCols = 9;
    constexpr std::uint32_t kRows = 8;
    const auto xs = coverage(image.width, kCols);
    const auto ys = coverage(image.height, kRows);
    std::array<std::array<double, kCols>, kRows> cell{};
    for (std::uint32_t r = 0; r < kRows; ++r) {
        for (std::uint32_t c = 0; c < kCols; ++c) {
            double sum = 0.0;
            double area = 0.0;
            for (const auto& [y, wy] : ys[r]) {
                const auto* row = image.pixels.data() + static_cast<std::size_t>(y) * image.width;
                for (const auto& [x, wx] : xs[c]) {
                    sum += wy * wx * row[x];
                    area += wy * wx;
                }
            }
            cell[r][c] = area > 0.0 ? sum / area : 0.0;
        }
    }
    std::uint64_t hash = 0;
    for (std::uint32_t r = 0; r < kRows; ++r) {
        for (std::uint32_t c = 0; c + 1 < kCols; ++c) {
            if (cell[r][c] < cell[r][c + 1]) {
                hash |= std::uint64_t{1} << (r * 8 + c);
            }
        }
    }
    return hash;
}

int hamming_distance(std::uint64_t a, std::uint64_t b) noexcept
{
    return std::popcount(a ^ b);
}

DatasetIndex index_dataset(const fs::path& root)
{
    if (!fs::is_directory(root)) {
        throw Error(ErrorCode::IoFailure, root.string() + " is not a directory");
    }
    static const std::regex kMaskStem(R"((.*)_mask(_[0-9]+)?)");

    std::vector<fs::path> images;
    std::map<std::string, std::vector<std::string>> masks_by_image_key;
    for (const auto& item : fs::recursive_directory_iterator(root)) {
        if (!item.is_regular_file() || !is_image_extension(item.path())) {
            continue;
        }
        const auto rel = fs::relative(item.path(), root);
        std::smatch match;
        const auto stem = rel.stem().string();
        if (std::regex_match(stem, match, kMaskStem)) {
            const auto key = (rel.parent_path() / match[1].str()).generic_string();
            masks_by_image_key[key].push_back(rel.generic_string());
        } else {
            images.push_back(rel);
        }
    }
    std::sort(images.begin(), images.end(),
              [](const fs::path& a, const fs::path& b) { return a.generic_string() < b.generic_string(); });

    DatasetIndex index;
    index.root = root;
    index.entries.resize(images.size());
    for (std::size_t i = 0; i < images.size(); ++i) {
        auto& entry = index.entries[i];
        entry.image_path = images[i].generic_string();
        const auto key = (images[i].parent_path() / images[i].stem()).generic_string();
        const auto it = masks_by_image_key.find(key);
        if (it == masks_by_image_key.end()) {
            throw Error(ErrorCode::MissingMask, "no mask for " + entry.image_path);
        }
        entry.mask_paths = it->second;
        std::sort(entry.mask_paths.begin(), entry.mask_paths.end());
    }

    for_each_chunk(index.entries.size(), 1, [&](std::size_t begin, std::size_t end, std::size_t) {
        for (std::size_t i = begin; i < end; ++i) {
            auto& entry = index.entries[i];
            GrayImage image;
            try {
                image = read_gray_image(root / entry.image_path, ColorPolicy::ConvertToGray);
            } catch (const Error& e) {
                throw Error(ErrorCode::UnreadableImage, e.what());
            }
            entry.width = image.width;
            entry.height = image.height;
            entry.content_hash = content_hash(image);
            entry.perceptual_hash = difference_hash(image);
            for (const auto& rel : entry.mask_paths) {
                const auto mask = read_mask(root / rel);
                require_same_shape(mask.height(), mask.width(), image.height, image.width,
                                   ("mask " + rel + " vs image " + entry.image_path).c_str());
            }
        }
    });
    return index;
}

std::vector<DuplicateGroup> find_duplicates(const DatasetIndex& index, int hamming_threshold)
{
    const auto& entries = index.entries;
    const auto n = entries.size();
    DisjointSets sets(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (entries[i].content_hash == entries[j].content_hash ||
                hamming_distance(entries[i].perceptual_hash, entries[j].perceptual_hash) <=
                    hamming_threshold) {
                sets.unite(i, j);
            }
        }
    }

    std::map<std::size_t, std::vector<std::size_t>> components;
    for (std::size_t i = 0; i < n; ++i) {
        components[sets.find(i)].push_back(i);
    }

    std::vector<DuplicateGroup> groups;
    for (auto& [root, members] : components) {
        if (members.size() < 2) {
            continue;
        }
        DuplicateGroup group;
        std::ostringstream id;
        id << "dup-" << std::setw(3) << std::setfill('0') << groups.size() + 1;
        group.id = id.str();
        group.members = members;

        std::vector<BinaryMask> masks;
        masks.reserve(members.size());
        for (auto m : members) {
            masks.push_back(union_mask(index, entries[m]));
        }
        for (std::size_t a = 0; a < members.size(); ++a) {
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                PairComparison pair;
                pair.first = members[a];
                pair.second = members[b];
                pair.exact = entries[pair.first].content_hash == entries[pair.second].content_hash;
                pair.hamming = hamming_distance(entries[pair.first].perceptual_hash,
                                                entries[pair.second].perceptual_hash);
                if (masks[a].height() == masks[b].height() && masks[a].width() == masks[b].width()) {
                    pair.mask_dice = dice(masks[a], masks[b]);
                    group.conflict = group.conflict || *pair.mask_dice < 1.0;
                }
                group.pairs.push_back(pair);
            }
        }
        groups.push_back(std::move(group));
    }
    return groups;
}

DedupStrategy parse_strategy(std::string_view name)
{
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "a1") {
        return DedupStrategy::A1;
    }
    if (lower == "a2") {
        return DedupStrategy::A2;
    }
    if (lower == "a3") {
        return DedupStrategy::A3;
    }
    throw Error(ErrorCode::InvalidConfig, "unknown dedup strategy '" + std::string(name) + "'");
}

std::string_view to_string(DedupStrategy strategy) noexcept
{
    switch (strategy) {
    case DedupStrategy::A1: return "A1";
    case DedupStrategy::A2: return "A2";
    case DedupStrategy::A3: return "A3";
    }
    return "unknown";
}

Preferences read_preferences(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoFailure, "cannot open preferences " + path.string());
    }
    Preferences prefs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw Error(ErrorCode::ParseError,
                        path.string() + ":" + std::to_string(line_no) + ": expected group_id,keep_path");
        }
        auto group = line.substr(0, comma);
        auto keep = line.substr(comma + 1);
        if (line_no == 1 && group == "group_id") {
            continue;
        }
        prefs[group] = keep;
    }
    return prefs;
}

std::vector<GroupDecision> plan_strategy(const DatasetIndex& index,
                                         std::span<const DuplicateGroup> groups,
                                         DedupStrategy strategy, const Preferences& preferences)
{
    std::vector<GroupDecision> plan;
    plan.reserve(groups.size());
    for (const auto& group : groups) {
        GroupDecision decision;
        decision.group_id = group.id;
        const auto& m = group.members;
        std::size_t kept = m.front();
        switch (strategy) {
        case DedupStrategy::A1: kept = m.back(); break;
        case DedupStrategy::A2: kept = m.front(); break;
        case DedupStrategy::A3: {
            const auto it = preferences.find(group.id);
            if (it == preferences.end()) {
                throw Error(ErrorCode::MissingPreference, "no A3 preference for group " + group.id);
            }
            const auto member = std::find_if(m.begin(), m.end(), [&](std::size_t e) {
                return index.entries[e].image_path == it->second;
            });
            if (member == m.end()) {
                throw Error(ErrorCode::InvalidPreference,
                            "preference '" + it->second + "' is not a member of group " + group.id);
            }
            kept = *member;
            break;
        }
        }
        for (auto e : m) {
            (e == kept ? decision.keep : decision.remove).push_back(e);
        }
        plan.push_back(std::move(decision));
    }
    return plan;
}

DatasetIndex apply_strategy(const DatasetIndex& index, std::span<const DuplicateGroup> groups,
                            DedupStrategy strategy, const Preferences& preferences)
{
    std::set<std::size_t> removed;
    for (const auto& decision : plan_strategy(index, groups, strategy, preferences)) {
        removed.insert(decision.remove.begin(), decision.remove.end());
    }
    DatasetIndex out;
    out.root = index.root;
    for (std::size_t i = 0; i < index.entries.size(); ++i) {
        if (!removed.contains(i)) {
            out.entries.push_back(index.entries[i]);
        }
    }
    return out;
}

namespace {

nlohmann::json paths_of(const DatasetIndex& index, const std::vector<std::size_t>& ids)
{
    auto out = nlohmann::json::array();
    for (auto id : ids) {
        out.push_back(index.entries[id].image_path);
    }
    return out;
}

nlohmann::json preview(const DatasetIndex& index, const GroupDecision& decision)
{
    return {{"keep", paths_of(index, decision.keep)}, {"remove", paths_of(index, decision.remove)}};
}

} // namespace

nlohmann::json audit_report(const DatasetIndex& index, std::span<const DuplicateGroup> groups,
                            int hamming_threshold, const std::optional<Preferences>& preferences)
{
    const auto a1 = plan_strategy(index, groups, DedupStrategy::A1);
    const auto a2 = plan_strategy(index, groups, DedupStrategy::A2);
    std::optional<std::vector<GroupDecision>> a3;
    if (preferences) {
        a3 = plan_strategy(index, groups, DedupStrategy::A3, *preferences);
    }

    auto group_rows = nlohmann::json::array();
    std::size_t conflicted = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto& group = groups[g];
        conflicted += group.conflict ? 1 : 0;
        auto pairs = nlohmann::json::array();
        for (const auto& pair : group.pairs) {
            pairs.push_back({
                {"first", index.entries[pair.first].image_path},
                {"second", index.entries[pair.second].image_path},
                {"exact", pair.exact},
                {"hamming", pair.hamming},
                {"mask_dice", pair.mask_dice ? nlohmann::json(*pair.mask_dice) : nlohmann::json()},
            });
        }
        nlohmann::json previews = {
            {"A1", preview(index, a1[g])},
            {"A2", preview(index, a2[g])},
        };
        if (a3) {
            previews["A3"] = preview(index, (*a3)[g]);
        } else {
            previews["A3"] = {{"keep", nullptr},
                              {"candidates", paths_of(index, group.members)},
                              {"requires", "preference CSV row: group_id,keep_path"}};
        }
        nlohmann::json row = {
            {"group_id", group.id},
            {"members", paths_of(index, group.members)},
            {"size", group.members.size()},
            {"pairs", pairs},
            {"conflict", group.conflict},
            {"previews", previews},
        };
        if (group.members.size() > 2) {
            row["note"] = "group larger than a pair: A1 keeps the last member, A2 keeps the first";
        }
        group_rows.push_back(std::move(row));
    }

    return {
        {"schema", "segunc.dedup-audit/1"},
        {"root", index.root.generic_string()},
        {"ordering", "lexicographic relative image path"},
        {"hamming_threshold", hamming_threshold},
        {"content_hash", "sha256(width u32le, height u32le, decoded 8-bit gray pixels)"},
        {"perceptual_hash", "dhash64 over 9x8 area-averaged grayscale"},
        {"entries", index.entries.size()},
        {"group_count", groups.size()},
        {"conflicted_groups", conflicted},
        {"groups", group_rows},
    };
}

} // namespace segunc
