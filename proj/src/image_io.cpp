#include "segunc/image_io.hpp"

#include <cctype>
#include <cstring>
#include <fstream>
#include <string>

#include <png.h>

#include "segunc/error.hpp"
#include "segunc/pmap.hpp"

namespace segunc {

namespace {

constexpr unsigned char kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};

class PgmCursor {
public:
    PgmCursor(std::span<const std::byte> bytes, const std::filesystem::path& path)
        : bytes_(bytes), path_(path) {}

    // Next whitespace-delimited header token, skipping '#' comments.
    unsigned long next_number()
    {
        skip_space_and_comments();
        std::string digits;
        while (pos_ < bytes_.size() && std::isdigit(byte_at(pos_)) != 0) {
            digits.push_back(static_cast<char>(byte_at(pos_++)));
        }
        if (digits.empty() || digits.size() > 9) {
            throw Error(ErrorCode::UnreadableImage, path_.string() + ": malformed PGM header");
        }
        return std::stoul(digits);
    }

    // Exactly one whitespace byte separates maxval from the raster.
    std::size_t raster_offset()
    {
        if (pos_ >= bytes_.size() || std::isspace(byte_at(pos_)) == 0) {
            throw Error(ErrorCode::UnreadableImage, path_.string() + ": malformed PGM header");
        }
        return pos_ + 1;
    }

private:
    int byte_at(std::size_t i) const { return std::to_integer<int>(bytes_[i]); }

    void skip_space_and_comments()
    {
        while (pos_ < bytes_.size()) {
            if (std::isspace(byte_at(pos_)) != 0) {
                ++pos_;
            } else if (byte_at(pos_) == '#') {
                while (pos_ < bytes_.size() && byte_at(pos_) != '\n') {
                    ++pos_;
                }
            } else {
                break;
            }
        }
    }

    std::span<const std::byte> bytes_;
    const std::filesystem::path& path_;
    std::size_t pos_ = 2;
};

GrayImage decode_pgm(std::span<const std::byte> bytes, const std::filesystem::path& path)
{
    PgmCursor cursor(bytes, path);
    const auto width = cursor.next_number();
    const auto height = cursor.next_number();
    const auto maxval = cursor.next_number();
    if (width == 0 || height == 0) {
        throw Error(ErrorCode::UnreadableImage, path.string() + ": zero-sized PGM");
    }
    if (maxval == 0 || maxval > 255) {
        throw Error(ErrorCode::UnsupportedFormat,
                    path.string() + ": only 8-bit PGM is supported (maxval " +
                        std::to_string(maxval) + ")");
    }
    const auto offset = cursor.raster_offset();
    const auto count = static_cast<std::size_t>(width) * height;
    if (bytes.size() < offset + count) {
        throw Error(ErrorCode::TruncatedFile, path.string() + ": PGM raster is truncated");
    }
    GrayImage image;
    image.width = static_cast<std::uint32_t>(width);
    image.height = static_cast<std::uint32_t>(height);
    image.pixels.resize(count);
    std::memcpy(image.pixels.data(), bytes.data() + offset, count);
    return image;
}

GrayImage decode_png(std::span<const std::byte> bytes, const std::filesystem::path& path,
                     ColorPolicy policy)
{
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    if (png_image_begin_read_from_memory(&png, bytes.data(), bytes.size()) == 0) {
        throw Error(ErrorCode::UnreadableImage, path.string() + ": " + png.message);
    }
    constexpr png_uint_32 kNonGray =
        PNG_FORMAT_FLAG_COLOR | PNG_FORMAT_FLAG_LINEAR | PNG_FORMAT_FLAG_COLORMAP;
    if (policy == ColorPolicy::RequireGray && (png.format & kNonGray) != 0) {
        png_image_free(&png);
        throw Error(ErrorCode::UnsupportedFormat,
                    path.string() + ": expected 8-bit grayscale PNG");
    }
    png.format = PNG_FORMAT_GRAY;
    GrayImage image;
    image.width = png.width;
    image.height = png.height;
    image.pixels.resize(PNG_IMAGE_SIZE(png));
    if (png_image_finish_read(&png, nullptr, image.pixels.data(), 0, nullptr) == 0) {
        const std::string message = png.message;
        png_image_free(&png);
        throw Error(ErrorCode::UnreadableImage, path.string() + ": " + message);
    }
    return image;
}

} // namespace

GrayImage read_gray_image(const std::filesystem::path& path, ColorPolicy policy)
{
    const auto bytes = read_file_bytes(path);
    if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSignature, 8) == 0) {
        return decode_png(bytes, path, policy);
    }
    if (bytes.size() >= 2 && std::to_integer<char>(bytes[0]) == 'P' &&
        std::to_integer<char>(bytes[1]) == '5') {
        return decode_pgm(bytes, path);
    }
    throw Error(ErrorCode::UnsupportedFormat, path.string() + ": not a binary PGM or PNG");
}

void write_pgm8(const std::filesystem::path& path, const GrayImage& image)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.pixels.data()),
              static_cast<std::streamsize>(image.pixels.size()));
    if (!out) {
        throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    }
}

void write_pgm16(const std::filesystem::path& path, std::uint32_t height, std::uint32_t width,
                 std::span<const std::uint16_t> pixels)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << "P5\n" << width << ' ' << height << "\n65535\n";
    // PGM samples wider than one byte are big-endian.
    std::vector<char> raster(pixels.size() * 2);
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        raster[2 * i] = static_cast<char>(pixels[i] >> 8U);
        raster[2 * i + 1] = static_cast<char>(pixels[i] & 0xFFU);
    }
    out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
    if (!out) {
        throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    }
}

void write_png8(const std::filesystem::path& path, const GrayImage& image)
{
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    png.width = image.width;
    png.height = image.height;
    png.format = PNG_FORMAT_GRAY;
    if (png_image_write_to_file(&png, path.c_str(), 0, image.pixels.data(), 0, nullptr) == 0) {
        throw Error(ErrorCode::IoFailure, path.string() + ": " + png.message);
    }
}

BinaryMask read_mask(const std::filesystem::path& path)
{
    auto image = read_gray_image(path, ColorPolicy::RequireGray);
    return BinaryMask(image.height, image.width, std::move(image.pixels));
}

void write_mask(const BinaryMask& mask, const std::filesystem::path& path)
{
    GrayImage image;
    image.width = mask.width();
    image.height = mask.height();
    image.pixels.resize(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) {
        image.pixels[i] = mask[i] ? 255 : 0;
    }
    if (path.extension() == ".png") {
        write_png8(path, image);
    } else {
        write_pgm8(path, image);
    }
}

} // namespace segunc
