#include "segunc/pmap.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "segunc/error.hpp"

namespace segunc {

namespace {

constexpr std::array<char, 6> kMagic = {'P', 'M', 'A', 'P', '1', '\0'};

void put_u16(std::vector<std::byte>& out, std::uint16_t v)
{
    out.push_back(static_cast<std::byte>(v & 0xFFU));
    out.push_back(static_cast<std::byte>((v >> 8U) & 0xFFU));
}

void put_u32(std::vector<std::byte>& out, std::uint32_t v)
{
    for (unsigned shift = 0; shift < 32; shift += 8) {
        out.push_back(static_cast<std::byte>((v >> shift) & 0xFFU));
    }
}

std::uint16_t get_u16(std::span<const std::byte> in, std::size_t offset)
{
    return static_cast<std::uint16_t>(std::to_integer<unsigned>(in[offset]) |
                                      (std::to_integer<unsigned>(in[offset + 1]) << 8U));
}

std::uint32_t get_u32(std::span<const std::byte> in, std::size_t offset)
{
    std::uint32_t v = 0;
    for (unsigned i = 0; i < 4; ++i) {
        v |= std::to_integer<std::uint32_t>(in[offset + i]) << (8U * i);
    }
    return v;
}

void append_f32(std::vector<std::byte>& out, std::span<const float> values)
{
    for (float f : values) {
        put_u32(out, std::bit_cast<std::uint32_t>(f));
    }
}

std::vector<float> decode_f32(std::span<const std::byte> in)
{
    std::vector<float> out(in.size() / 4);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = std::bit_cast<float>(get_u32(in, i * 4));
    }
    return out;
}

// K*T*H*W*4 without wrapping.
std::size_t checked_payload_bytes(std::uint32_t k, std::uint32_t t, std::uint32_t h,
                                  std::uint32_t w)
{
    std::uint64_t total = 4;
    for (std::uint64_t factor : {std::uint64_t{k}, std::uint64_t{t}, std::uint64_t{h},
                                 std::uint64_t{w}}) {
        if (factor != 0 && total > std::numeric_limits<std::uint64_t>::max() / factor) {
            throw Error(ErrorCode::DimensionOverflow, "K*T*H*W overflows 64-bit byte count");
        }
        total *= factor;
    }
    if (total > std::numeric_limits<std::size_t>::max()) {
        throw Error(ErrorCode::DimensionOverflow, "payload size exceeds addressable memory");
    }
    return static_cast<std::size_t>(total);
}

} // namespace

std::vector<std::byte> encode_pmap(const SampleStack& stack)
{
    std::vector<std::byte> out;
    out.reserve(kPmapHeaderSize + stack.values().size() * 4);
    for (char c : kMagic) {
        out.push_back(static_cast<std::byte>(c));
    }
    put_u16(out, kPmapVersion);
    put_u32(out, stack.members());
    put_u32(out, stack.passes());
    put_u32(out, stack.height());
    put_u32(out, stack.width());
    append_f32(out, stack.values());
    return out;
}

SampleStack decode_pmap(std::span<const std::byte> bytes, std::string case_id)
{
    if (bytes.size() < kMagic.size() ||
        std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
        throw Error(ErrorCode::BadMagic, "missing PMAP1 magic");
    }
    if (bytes.size() < kPmapHeaderSize) {
        throw Error(ErrorCode::TruncatedFile, "header shorter than 24 bytes");
    }
    const auto version = get_u16(bytes, 6);
    if (version != kPmapVersion) {
        throw Error(ErrorCode::UnsupportedVersion,
                    "PMAP version " + std::to_string(version) + " (expected 1)");
    }
    const auto k = get_u32(bytes, 8);
    const auto t = get_u32(bytes, 12);
    const auto h = get_u32(bytes, 16);
    const auto w = get_u32(bytes, 20);
    const auto payload = checked_payload_bytes(k, t, h, w);
    const auto available = bytes.size() - kPmapHeaderSize;
    if (available < payload) {
        std::ostringstream msg;
        msg << "payload has " << available << " bytes, header K=" << k << " T=" << t
            << " H=" << h << " W=" << w << " requires " << payload;
        throw Error(ErrorCode::TruncatedFile, msg.str());
    }
    if (available > payload) {
        throw Error(ErrorCode::TrailingData,
                    std::to_string(available - payload) + " bytes after payload");
    }
    return SampleStack(std::move(case_id), k, t, h, w,
                       decode_f32(bytes.subspan(kPmapHeaderSize, payload)));
}

std::vector<std::byte> read_file_bytes(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    }
    in.seekg(0, std::ios::end);
    const auto size = static_cast<std::size_t>(in.tellg());
    in.seekg(0, std::ios::beg);
    std::vector<std::byte> bytes(size);
    if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()),
                             static_cast<std::streamsize>(size))) {
        throw Error(ErrorCode::IoFailure, "short read on " + path.string());
    }
    return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::byte> bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::IoFailure, "cannot create " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error(ErrorCode::IoFailure, "write failed on " + path.string());
    }
}

SampleStack read_sample_stack(const std::filesystem::path& path)
{
    const auto bytes = read_file_bytes(path);
    try {
        return decode_pmap(bytes, path.stem().string());
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

void write_sample_stack(const SampleStack& stack, const std::filesystem::path& path)
{
    write_file_bytes(path, encode_pmap(stack));
}

std::filesystem::path sidecar_path(const std::filesystem::path& path)
{
    auto p = path;
    p += ".json";
    return p;
}

void write_raw_f32(const std::filesystem::path& path, std::uint32_t height, std::uint32_t width,
                   std::span<const double> values, const std::string& quantity)
{
    if (values.size() != static_cast<std::size_t>(height) * width) {
        throw Error(ErrorCode::InvalidDimensions, "raw dump size does not match dimensions");
    }
    std::vector<std::byte> out;
    out.reserve(values.size() * 4);
    for (double v : values) {
        put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
    write_file_bytes(path, out);

    const nlohmann::json meta = {
        {"format", "f32-raw"},
        {"dtype", "float32"},
        {"byte_order", "little"},
        {"layout", "row-major"},
        {"height", height},
        {"width", width},
        {"quantity", quantity},
    };
    std::ofstream side(sidecar_path(path));
    side << meta.dump(2) << '\n';
    if (!side) {
        throw Error(ErrorCode::IoFailure, "cannot write " + sidecar_path(path).string());
    }
}

ScalarField read_raw_f32(const std::filesystem::path& path)
{
    std::ifstream side(sidecar_path(path));
    if (!side) {
        throw Error(ErrorCode::IoFailure, "missing sidecar " + sidecar_path(path).string());
    }
    nlohmann::json meta;
    try {
        side >> meta;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, sidecar_path(path).string() + ": " + e.what());
    }
    ScalarField field;
    field.height = meta.at("height").get<std::uint32_t>();
    field.width = meta.at("width").get<std::uint32_t>();
    const auto bytes = read_file_bytes(path);
    const auto expected = static_cast<std::size_t>(field.height) * field.width * 4;
    if (bytes.size() != expected) {
        throw Error(bytes.size() < expected ? ErrorCode::TruncatedFile : ErrorCode::TrailingData,
                    path.string() + ": size " + std::to_string(bytes.size()) + " != " +
                        std::to_string(expected));
    }
    const auto floats = decode_f32(bytes);
    field.values.assign(floats.begin(), floats.end());
    return field;
}

void write_mean_pmap(const ProbabilityMap& mean, const std::filesystem::path& path)
{
    std::vector<float> values(mean.values().begin(), mean.values().end());
    write_sample_stack(SampleStack(path.stem().string(), 1, 1, mean.height(), mean.width(),
                                   std::move(values)),
                       path);
}

} // namespace segunc
