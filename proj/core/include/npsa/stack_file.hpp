#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "npsa/fringe_synth.hpp"

namespace npsa {

/// Binary fringe-stack container, all integers and floats little-endian:
///
///   offset  size        field
///   0       4           magic "NPSA"
///   4       2           format version (u16, currently 1)
///   6       2           frame count N (u16)
///   8       4           height (u32)
///   12      4           width (u32)
///   16      1           steps-present flag (u8, 0 or 1)
///   17      8N          steps as float64, only when the flag is 1
///   ...     8NHW        frames as float64, frame-major then row-major
///   end-4   4           CRC-32 (zlib polynomial) of every preceding byte
inline constexpr std::uint16_t kStackFileVersion = 1;

std::vector<std::uint8_t> encode_stack(const FringeStack& stack);

/// Throws InvalidInput on bad magic, unsupported version, size mismatch or
/// CRC mismatch.
FringeStack decode_stack(std::span<const std::uint8_t> bytes);

/// Atomic: writes a sibling temporary file and renames it into place.
void write_stack(const std::filesystem::path& path, const FringeStack& stack);
FringeStack read_stack(const std::filesystem::path& path);

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

/// Helpers shared with the CLI for whole-file I/O.
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace npsa
