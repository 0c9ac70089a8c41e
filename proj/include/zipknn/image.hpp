#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "zipknn/bytes.hpp"

namespace zipknn {

// Interleaved 8-bit samples, row-major. channels is 1 (gray), 3 (RGB) or
// 4 (RGBA, alpha ignored downstream).
struct RawImage {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> pixels;
};

// Fixed side x side grayscale raster; the unit of classification.
struct CanonicalImage {
  int side = 0;
  std::vector<std::uint8_t> pixels;
};

inline constexpr const char* kGrayscaleId = "bt601-round-half-away-from-zero";

// Decodes PNG/JPEG/PGM from disk into RGB(A) or gray samples.
// Throws UndecodableImage / UnsupportedChannelCount.
RawImage decode_image(const std::filesystem::path& path);

// BT.601 luma, round half away from zero. 1-channel input passes through,
// a 4th channel is ignored.
RawImage to_grayscale(const RawImage& img);

// Area-weighted box resample of a grayscale image to side x side. Each output
// sample is the fractional-coverage-weighted mean of its source region,
// rounded half away from zero. Works for both down- and upscaling.
CanonicalImage resize_box(const RawImage& gray, int side);

// to_grayscale followed by resize_box.
CanonicalImage canonicalize(const RawImage& img, int side);

// Raw row-major samples, no header, no padding; length = side^2.
ByteSequence serialize(const CanonicalImage& img);

}  // namespace zipknn
