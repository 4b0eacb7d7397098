#include <doctest.h>

#include <algorithm>
#include <fstream>

#include "segunc/dedup.hpp"
#include "segunc/error.hpp"
#include "segunc/image_io.hpp"
#include "support/test_support.hpp"

using namespace segunc;
using segunc::testing::TempDir;

namespace {

std::vector<std::string> image_paths(const DatasetIndex& index)
{
    std::vector<std::string> out;
    for (const auto& e : index.entries) {
        out.push_back(e.image_path);
    }
    return out;
}

std::vector<std::string> member_paths(const DatasetIndex& index, const DuplicateGroup& g)
{
    std::vector<std::string> out;
    for (auto m : g.members) {
        out.push_back(index.entries[m].image_path);
    }
    return out;
}

ErrorCode code_of(const auto& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no throw");
    return ErrorCode::ParseError;
}

} // namespace

TEST_CASE("hashes")
{
    const auto a = segunc::testing::textured_image(1, 48, 64);
    auto b = a;
    CHECK(content_hash(a) == content_hash(b));
    CHECK(content_hash(a).size() == 64);
    b.pixels[0] ^= 1;
    CHECK(content_hash(a) != content_hash(b));
    CHECK(hamming_distance(difference_hash(a), difference_hash(b)) <= 1);

    SUBCASE("dimensions are part of the content hash")
    {
        GrayImage wide{4, 1, {1, 2, 3, 4}};
        GrayImage tall{1, 4, {1, 2, 3, 4}};
        CHECK(content_hash(wide) != content_hash(tall));
    }
    SUBCASE("dHash of a horizontal ramp sets every bit")
    {
        GrayImage ramp{90, 8, {}};
        for (std::uint32_t y = 0; y < 8; ++y) {
            for (std::uint32_t x = 0; x < 90; ++x) {
                ramp.pixels.push_back(static_cast<std::uint8_t>(x * 2));
            }
        }
        CHECK(difference_hash(ramp) == ~std::uint64_t{0});
        GrayImage flat{90, 8, std::vector<std::uint8_t>(720, 9)};
        CHECK(difference_hash(flat) == 0);
    }
    CHECK(hamming_distance(0, ~std::uint64_t{0}) == 64);
    CHECK(hamming_distance(0b1011, 0b0001) == 2);
    CHECK(hamming_distance(difference_hash(segunc::testing::textured_image(1, 48, 64)),
                           difference_hash(segunc::testing::textured_image(2, 48, 64))) > 4);
}

TEST_CASE("indexing the planted tree")
{
    TempDir dir;
    const auto tree = segunc::testing::build_planted_tree(dir.path());
    const auto index = index_dataset(dir.path());
    CHECK(image_paths(index) == tree.images);

    const auto& m05 = *std::find_if(index.entries.begin(), index.entries.end(),
                                    [](const auto& e) { return e.image_path == "malignant/m05.png"; });
    CHECK(m05.mask_paths ==
          std::vector<std::string>{"malignant/m05_mask.png", "malignant/m05_mask_1.png"});
    CHECK(m05.width == 64);
    CHECK(m05.height == 48);

    SUBCASE("re-encoding keeps the content hash")
    {
        CHECK(index.entries[0].content_hash == index.entries[3].content_hash);
        CHECK(index.entries[0].perceptual_hash == index.entries[3].perceptual_hash);
    }
}

TEST_CASE("duplicate detection on the planted tree")
{
    TempDir dir;
    const auto tree = segunc::testing::build_planted_tree(dir.path());
    const auto index = index_dataset(dir.path());
    const auto groups = find_duplicates(index);
    REQUIRE(groups.size() == tree.duplicate_pairs.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        CHECK(member_paths(index, groups[g]) == tree.duplicate_pairs[g]);
        REQUIRE(groups[g].pairs.size() == 1);
    }
    CHECK(groups[0].id == "dup-001");
    CHECK(groups[2].id == "dup-003");

    // exact re-encode with identical masks
    CHECK(groups[0].pairs[0].exact);
    CHECK_FALSE(groups[0].conflict);
    // byte copy with the mask split over two files
    CHECK(groups[1].pairs[0].exact);
    CHECK(groups[1].pairs[0].mask_dice == doctest::Approx(1.0));
    CHECK_FALSE(groups[1].conflict);
    // perturbed copy with a shifted mask
    const auto& near = groups[2].pairs[0];
    CHECK_FALSE(near.exact);
    CHECK(near.hamming <= 4);
    CHECK(groups[2].conflict);
    REQUIRE(near.mask_dice.has_value());
    CHECK(*near.mask_dice == doctest::Approx(tree.conflicted_dice));

    SUBCASE("a zero threshold keeps only exact duplicates when the near pair differs")
    {
        const auto strict = find_duplicates(index, -1);
        CHECK(strict.size() == 2);
    }
}

TEST_CASE("strategies A1, A2, A3")
{
    TempDir dir;
    const auto tree = segunc::testing::build_planted_tree(dir.path());
    const auto index = index_dataset(dir.path());
    const auto groups = find_duplicates(index);

    auto without = [&](std::vector<std::string> drop) {
        std::vector<std::string> out;
        for (const auto& p : tree.images) {
            if (std::find(drop.begin(), drop.end(), p) == drop.end()) {
                out.push_back(p);
            }
        }
        return out;
    };

    const auto a1 = apply_strategy(index, groups, DedupStrategy::A1);
    CHECK(image_paths(a1) == without({"benign/b01.png", "malignant/m02.png", "normal/n01.png"}));
    const auto a2 = apply_strategy(index, groups, DedupStrategy::A2);
    CHECK(image_paths(a2) == without({"benign/b07.pgm", "malignant/m05.png", "normal/n03.png"}));

    const Preferences prefs{{"dup-001", "benign/b07.pgm"},
                            {"dup-002", "malignant/m02.png"},
                            {"dup-003", "normal/n03.png"}};
    const auto a3 = apply_strategy(index, groups, DedupStrategy::A3, prefs);
    CHECK(image_paths(a3) == without({"benign/b01.png", "malignant/m05.png", "normal/n01.png"}));

    SUBCASE("re-running on the output finds nothing to remove")
    {
        for (const auto* out : {&a1, &a2, &a3}) {
            const auto again = find_duplicates(*out);
            CHECK(again.empty());
            CHECK(image_paths(apply_strategy(*out, again, DedupStrategy::A1)) == image_paths(*out));
        }
    }
    SUBCASE("A3 requires a valid preference for every group")
    {
        Preferences missing = prefs;
        missing.erase("dup-002");
        CHECK(code_of([&] { (void)apply_strategy(index, groups, DedupStrategy::A3, missing); }) ==
              ErrorCode::MissingPreference);
        Preferences foreign = prefs;
        foreign["dup-002"] = "benign/b02.png";
        CHECK(code_of([&] { (void)apply_strategy(index, groups, DedupStrategy::A3, foreign); }) ==
              ErrorCode::InvalidPreference);
    }
}

TEST_CASE("groups larger than a pair keep exactly one member")
{
    TempDir dir;
    const auto img = segunc::testing::textured_image(9, 32, 32);
    const BinaryMask mask(32, 32, std::vector<std::uint8_t>(32 * 32, 1));
    for (const char* name : {"x1", "x2", "x3"}) {
        write_png8(dir / (std::string(name) + ".png"), img);
        write_mask(mask, dir / (std::string(name) + "_mask.png"));
    }
    const auto index = index_dataset(dir.path());
    const auto groups = find_duplicates(index);
    REQUIRE(groups.size() == 1);
    CHECK(groups[0].members.size() == 3);
    CHECK(groups[0].pairs.size() == 3);
    CHECK(image_paths(apply_strategy(index, groups, DedupStrategy::A1)) ==
          std::vector<std::string>{"x3.png"});
    CHECK(image_paths(apply_strategy(index, groups, DedupStrategy::A2)) ==
          std::vector<std::string>{"x1.png"});
}

TEST_CASE("index errors")
{
    SUBCASE("empty directory")
    {
        TempDir dir;
        const auto index = index_dataset(dir.path());
        CHECK(index.entries.empty());
        CHECK(find_duplicates(index).empty());
    }
    SUBCASE("image without a mask")
    {
        TempDir dir;
        write_png8(dir / "lonely.png", segunc::testing::textured_image(1, 8, 8));
        CHECK(code_of([&] { (void)index_dataset(dir.path()); }) == ErrorCode::MissingMask);
    }
    SUBCASE("mask of the wrong size")
    {
        TempDir dir;
        write_png8(dir / "a.png", segunc::testing::textured_image(1, 8, 8));
        write_mask(BinaryMask(4, 4, std::vector<std::uint8_t>(16, 0)), dir / "a_mask.png");
        CHECK(code_of([&] { (void)index_dataset(dir.path()); }) == ErrorCode::ShapeMismatch);
    }
    SUBCASE("unreadable image")
    {
        TempDir dir;
        std::ofstream(dir / "junk.png") << "not an image";
        write_mask(BinaryMask(4, 4, std::vector<std::uint8_t>(16, 0)), dir / "junk_mask.png");
        CHECK(code_of([&] { (void)index_dataset(dir.path()); }) == ErrorCode::UnreadableImage);
    }
}

TEST_CASE("preferences CSV")
{
    TempDir dir;
    std::ofstream(dir / "prefs.csv") << "group_id,keep_path\ndup-001,a/b.png\r\ndup-002,c.png\n";
    const auto prefs = read_preferences(dir / "prefs.csv");
    CHECK(prefs.size() == 2);
    CHECK(prefs.at("dup-001") == "a/b.png");
    CHECK(prefs.at("dup-002") == "c.png");
    CHECK(parse_strategy("A2") == DedupStrategy::A2);
    CHECK_THROWS_AS((void)parse_strategy("A4"), Error);
}

TEST_CASE("audit report")
{
    TempDir dir;
    (void)segunc::testing::build_planted_tree(dir.path());
    const auto index = index_dataset(dir.path());
    const auto groups = find_duplicates(index);
    const auto report = audit_report(index, groups, 4);
    CHECK(report.at("schema") == "segunc.dedup-audit/1");
    CHECK(report.at("group_count") == 3);
    CHECK(report.at("conflicted_groups").size() == 1);
    CHECK(report.at("groups")[2].at("conflict") == true);
    CHECK(report.at("groups")[0].at("previews").at("A3").at("keep").is_null());
    // rebuilding from scratch gives the same document
    CHECK(audit_report(index_dataset(dir.path()), groups, 4).dump() == report.dump());
}
