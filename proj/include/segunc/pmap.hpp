#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "segunc/datamodel.hpp"

namespace segunc {

// PMAP container, little-endian:
//   "PMAP1\0" | u16 version (=1) | u32 K | u32 T | u32 H | u32 W | K*T*H*W float32
// Payload is ordered [k][t][row][col].
inline constexpr std::size_t kPmapHeaderSize = 24;
inline constexpr std::uint16_t kPmapVersion = 1;

[[nodiscard]] std::vector<std::byte> encode_pmap(const SampleStack& stack);
[[nodiscard]] SampleStack decode_pmap(std::span<const std::byte> bytes, std::string case_id);

// The case id of a stack read from disk is the file stem.
[[nodiscard]] SampleStack read_sample_stack(const std::filesystem::path& path);
void write_sample_stack(const SampleStack& stack, const std::filesystem::path& path);

// Headerless float32 row-major dump. Dimensions live in a sidecar `<path>.json`.
void write_raw_f32(const std::filesystem::path& path, std::uint32_t height, std::uint32_t width,
                   std::span<const double> values, const std::string& quantity);
[[nodiscard]] ScalarField read_raw_f32(const std::filesystem::path& path);

// Mean-map export as a K=T=1 PMAP.
void write_mean_pmap(const ProbabilityMap& mean, const std::filesystem::path& path);

[[nodiscard]] std::filesystem::path sidecar_path(const std::filesystem::path& path);

[[nodiscard]] std::vector<std::byte> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::byte> bytes);

} // namespace segunc
