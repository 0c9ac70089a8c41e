#include "zipknn/compressor.hpp"

#include <zlib.h>

#include <array>
#include <cstring>
#include <ctime>
#include <stdexcept>

#include "zipknn/error.hpp"

namespace zipknn {
namespace {

// RFC 1952 XFL hint: 2 = max compression, 4 = fastest.
std::uint8_t extra_flags(int level) {
  if (level == 9) return 2;
  if (level == 1) return 4;
  return 0;
}

void put_le32(ByteSequence& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

// One gzip member over the concatenation of `parts`: 10-byte header, raw
// deflate stream, CRC32 + ISIZE trailer. Writing the framing by hand keeps
// the byte stream identical across platforms and zlib builds.
ByteSequence gzip_member(std::span<const ByteView> parts, const CompressorConfig& cfg) {
  validate(cfg);

  std::size_t total_in = 0;
  for (const auto& p : parts) total_in += p.size();

  z_stream zs;
  std::memset(&zs, 0, sizeof(zs));
  if (deflateInit2(&zs, cfg.level, Z_DEFLATED, -15 /* raw deflate */, 8,
                   Z_DEFAULT_STRATEGY) != Z_OK) {
    throw std::runtime_error("deflateInit2 failed");
  }

  const std::size_t bound = deflateBound(&zs, static_cast<uLong>(total_in));

  ByteSequence out;
  out.reserve(kGzipFramingBytes + bound);
  out.push_back(0x1f);
  out.push_back(0x8b);
  out.push_back(0x08);  // CM = deflate
  out.push_back(0x00);  // FLG: no name, comment, extra or CRC16
  std::uint32_t mtime = 0;
  std::uint8_t os_byte = 0x03;  // Unix
  if (!cfg.normalize_header) {
    mtime = static_cast<std::uint32_t>(std::time(nullptr));
  }
  put_le32(out, mtime);
  out.push_back(extra_flags(cfg.level));
  out.push_back(os_byte);

  const std::size_t header_size = out.size();
  out.resize(header_size + bound);
  zs.next_out = out.data() + header_size;
  zs.avail_out = static_cast<uInt>(bound);

  std::uint32_t crc = crc32(0L, Z_NULL, 0);
  for (const ByteView part : parts) {
    if (part.empty()) continue;
    crc = crc32(crc, part.data(), static_cast<uInt>(part.size()));
    zs.next_in = const_cast<Bytef*>(part.data());
    zs.avail_in = static_cast<uInt>(part.size());
    if (deflate(&zs, Z_NO_FLUSH) != Z_OK) {
      deflateEnd(&zs);
      throw std::runtime_error("deflate failed");
    }
  }
  zs.next_in = nullptr;
  zs.avail_in = 0;
  if (deflate(&zs, Z_FINISH) != Z_STREAM_END) {
    deflateEnd(&zs);
    throw std::runtime_error("deflate failed to finish");
  }
  out.resize(header_size + zs.total_out);
  deflateEnd(&zs);

  put_le32(out, crc);
  put_le32(out, static_cast<std::uint32_t>(total_in & 0xffffffffull));
  return out;
}

}  // namespace

void validate(const CompressorConfig& cfg) {
  if (cfg.codec != Codec::GzipDeflate) {
    raise(Errc::InvalidConfig, "unsupported codec");
  }
  if (cfg.level < 1 || cfg.level > 9) {
    raise(Errc::InvalidConfig, "gzip level must be in [1, 9], got " + std::to_string(cfg.level));
  }
}

std::string codec_id(const CompressorConfig& cfg) {
  validate(cfg);
  std::string id = "gzip-deflate;zlib-";
  id += zlibVersion();
  id += ";level=" + std::to_string(cfg.level);
  id += ";normalized-header=";
  id += cfg.normalize_header ? "1" : "0";
  return id;
}

ByteSequence compress(ByteView data, const CompressorConfig& cfg) {
  std::array<ByteView, 1> parts{data};
  return gzip_member(parts, cfg);
}

std::size_t compress_len(ByteView data, const CompressorConfig& cfg) {
  std::array<ByteView, 1> parts{data};
  return gzip_member(parts, cfg).size();
}

std::size_t compress_len_concat(ByteView a, ByteView b, const CompressorConfig& cfg) {
  std::array<ByteView, 2> parts{a, b};
  return gzip_member(parts, cfg).size();
}

}  // namespace zipknn
