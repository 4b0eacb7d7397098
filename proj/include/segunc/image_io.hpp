#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "segunc/datamodel.hpp"

namespace segunc {

// Decoded 8-bit grayscale raster, row-major.
struct GrayImage {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<std::uint8_t> pixels;
};

enum class ColorPolicy {
    RequireGray,  // masks: 8-bit (or lower) grayscale only
    ConvertToGray // dataset images: RGB and 16-bit inputs are reduced to 8-bit gray
};

// Reads binary PGM (P5, maxval <= 255) or PNG, detected by content, not extension.
[[nodiscard]] GrayImage read_gray_image(const std::filesystem::path& path,
                                        ColorPolicy policy = ColorPolicy::RequireGray);

void write_pgm8(const std::filesystem::path& path, const GrayImage& image);
void write_pgm16(const std::filesystem::path& path, std::uint32_t height, std::uint32_t width,
                 std::span<const std::uint16_t> pixels);
void write_png8(const std::filesystem::path& path, const GrayImage& image);

[[nodiscard]] BinaryMask read_mask(const std::filesystem::path& path);

// Writes foreground as 255. Format follows the extension (.png, otherwise PGM).
void write_mask(const BinaryMask& mask, const std::filesystem::path& path);

} // namespace segunc
