#include "zipknn/image.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <cstdint>

#include "zipknn/error.hpp"

namespace zipknn {

RawImage decode_image(const std::filesystem::path& path) {
  cv::Mat mat = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (mat.empty()) {
    raise(Errc::UndecodableImage, path.string());
  }
  if (mat.depth() != CV_8U) {
    raise(Errc::UndecodableImage, path.string() + ": only 8-bit samples are supported");
  }
  const int channels = mat.channels();
  if (channels != 1 && channels != 3 && channels != 4) {
    raise(Errc::UnsupportedChannelCount,
          path.string() + ": got " + std::to_string(channels) + " channels");
  }

  RawImage img;
  img.width = mat.cols;
  img.height = mat.rows;
  img.channels = channels;
  img.pixels.resize(static_cast<std::size_t>(mat.cols) * mat.rows * channels);

  // OpenCV decodes color as BGR(A); store RGB(A).
  for (int y = 0; y < mat.rows; ++y) {
    const std::uint8_t* row = mat.ptr<std::uint8_t>(y);
    std::uint8_t* out = img.pixels.data() + static_cast<std::size_t>(y) * mat.cols * channels;
    if (channels == 1) {
      std::copy(row, row + mat.cols, out);
    } else {
      for (int x = 0; x < mat.cols; ++x) {
        const std::uint8_t* px = row + static_cast<std::size_t>(x) * channels;
        out[static_cast<std::size_t>(x) * channels + 0] = px[2];
        out[static_cast<std::size_t>(x) * channels + 1] = px[1];
        out[static_cast<std::size_t>(x) * channels + 2] = px[0];
        if (channels == 4) out[static_cast<std::size_t>(x) * channels + 3] = px[3];
      }
    }
  }
  return img;
}

RawImage to_grayscale(const RawImage& img) {
  if (img.channels == 1) return img;
  if (img.channels != 3 && img.channels != 4) {
    raise(Errc::UnsupportedChannelCount,
          "grayscale conversion expects 1, 3 or 4 channels, got " + std::to_string(img.channels));
  }

  RawImage out;
  out.width = img.width;
  out.height = img.height;
  out.channels = 1;
  out.pixels.resize(static_cast<std::size_t>(img.width) * img.height);

  // BT.601 luma in exact integer arithmetic: round half away from zero of
  // (299 R + 587 G + 114 B) / 1000.
  const std::size_t n = out.pixels.size();
  const std::size_t step = static_cast<std::size_t>(img.channels);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t* px = img.pixels.data() + i * step;
    const std::uint32_t luma_x1000 =
        299u * px[0] + 587u * px[1] + 114u * px[2];
    out.pixels[i] = static_cast<std::uint8_t>((luma_x1000 + 500u) / 1000u);
  }
  return out;
}

CanonicalImage resize_box(const RawImage& gray, int side) {
  if (gray.channels != 1) {
    raise(Errc::UnsupportedChannelCount, "resize expects a grayscale image");
  }
  if (side < 1) {
    raise(Errc::InvalidSide, "target side must be >= 1, got " + std::to_string(side));
  }

  CanonicalImage out;
  out.side = side;
  out.pixels.resize(static_cast<std::size_t>(side) * side);

  // All region boundaries are rationals with denominator `side`, so the
  // coverage-weighted mean is computed exactly in integers: coordinates are
  // scaled by `side`, making source pixel ix span [ix*side, (ix+1)*side) and
  // output pixel ox span [ox*w, (ox+1)*w). The accumulated weight per output
  // pixel is exactly w*h.
  const std::int64_t w = gray.width;
  const std::int64_t h = gray.height;
  const std::int64_t s = side;
  const std::int64_t denom = w * h;

  for (std::int64_t oy = 0; oy < s; ++oy) {
    const std::int64_t y0 = oy * h;
    const std::int64_t y1 = y0 + h;
    const std::int64_t iy_begin = y0 / s;
    const std::int64_t iy_end = (y1 - 1) / s;
    for (std::int64_t ox = 0; ox < s; ++ox) {
      const std::int64_t x0 = ox * w;
      const std::int64_t x1 = x0 + w;
      const std::int64_t ix_begin = x0 / s;
      const std::int64_t ix_end = (x1 - 1) / s;

      std::int64_t acc = 0;
      for (std::int64_t iy = iy_begin; iy <= iy_end; ++iy) {
        const std::int64_t wy = std::min(y1, (iy + 1) * s) - std::max(y0, iy * s);
        const std::uint8_t* row = gray.pixels.data() + static_cast<std::size_t>(iy * w);
        for (std::int64_t ix = ix_begin; ix <= ix_end; ++ix) {
          const std::int64_t wx = std::min(x1, (ix + 1) * s) - std::max(x0, ix * s);
          acc += wx * wy * row[ix];
        }
      }
      // round half away from zero; acc and denom are nonnegative
      out.pixels[static_cast<std::size_t>(oy * s + ox)] =
          static_cast<std::uint8_t>((2 * acc + denom) / (2 * denom));
    }
  }
  return out;
}

CanonicalImage canonicalize(const RawImage& img, int side) {
  return resize_box(to_grayscale(img), side);
}

ByteSequence serialize(const CanonicalImage& img) {
  return ByteSequence(img.pixels.begin(), img.pixels.end());
}

}  // namespace zipknn
