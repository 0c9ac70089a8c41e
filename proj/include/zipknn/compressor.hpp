#pragma once

#include <cstddef>
#include <string>

#include "zipknn/bytes.hpp"

namespace zipknn {

enum class Codec { GzipDeflate };

// Fixed gzip member framing: 10-byte header plus 8-byte CRC32/ISIZE trailer.
inline constexpr std::size_t kGzipFramingBytes = 18;

struct CompressorConfig {
  Codec codec = Codec::GzipDeflate;
  int level = 6;                 // deflate effort, 1..9
  bool normalize_header = true;  // zero mtime and pin the OS byte for reproducible output
};

// Throws InvalidConfig when level is outside [1, 9].
void validate(const CompressorConfig& cfg);

// Identity string recorded in run manifests; absolute lengths differ across
// encoder implementations, so results are only comparable under the same id.
std::string codec_id(const CompressorConfig& cfg);

// Full gzip member for `data`. Deterministic: byte-identical output for equal
// (data, cfg).
ByteSequence compress(ByteView data, const CompressorConfig& cfg);

std::size_t compress_len(ByteView data, const CompressorConfig& cfg);

// Length of the compressed concatenation a ++ b, in that order. Equal to
// compress_len on the concatenated buffer; no separator byte is inserted.
std::size_t compress_len_concat(ByteView a, ByteView b, const CompressorConfig& cfg);

}  // namespace zipknn
