#pragma once

// Test-only helpers and independent oracles. Nothing here may call into the
// implementation paths it is used to check.

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "zipknn/bytes.hpp"
#include "zipknn/image.hpp"

namespace testsup {

inline zipknn::ByteSequence prng_bytes(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  zipknn::ByteSequence out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng() & 0xff);
  return out;
}

inline zipknn::ByteSequence periodic_bytes(std::uint64_t seed, std::size_t n, std::size_t period) {
  const zipknn::ByteSequence motif = prng_bytes(seed, period);
  zipknn::ByteSequence out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = motif[i % period];
  return out;
}

inline zipknn::ByteSequence concat(const zipknn::ByteSequence& a, const zipknn::ByteSequence& b) {
  zipknn::ByteSequence out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

inline zipknn::CanonicalImage constant_image(int side, std::uint8_t value) {
  zipknn::CanonicalImage img;
  img.side = side;
  img.pixels.assign(static_cast<std::size_t>(side) * side, value);
  return img;
}

inline zipknn::CanonicalImage noise_image(int side, std::uint64_t seed) {
  zipknn::CanonicalImage img;
  img.side = side;
  img.pixels = prng_bytes(seed, static_cast<std::size_t>(side) * side);
  return img;
}

inline void write_pgm(const std::filesystem::path& path, int width, int height,
                      const std::vector<std::uint8_t>& pixels) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << "P5\n" << width << " " << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
}

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("zipknn_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Brute-force kNN oracle: full sort over (distance, index) pairs, map-based
// tallies, same tie-break cascade as the spec but a separate code path.
inline int oracle_knn_label(const std::vector<double>& distances, const std::vector<int>& labels,
                            const std::vector<std::string>& class_names, int k) {
  std::vector<std::pair<double, std::size_t>> pairs;
  for (std::size_t i = 0; i < distances.size(); ++i) pairs.emplace_back(distances[i], i);
  std::sort(pairs.begin(), pairs.end());  // (distance, index) ascending

  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), pairs.size());
  std::map<int, int> votes;
  std::map<int, double> dist_sum;
  for (std::size_t r = 0; r < kk; ++r) {
    const int label = labels[pairs[r].second];
    votes[label] += 1;
    dist_sum[label] += pairs[r].first;
  }

  int max_votes = 0;
  for (const auto& [label, count] : votes) max_votes = std::max(max_votes, count);

  int best = -1;
  for (const auto& [label, count] : votes) {
    if (count != max_votes) continue;
    if (best < 0) {
      best = label;
      continue;
    }
    const double mean_best = dist_sum[best] / votes[best];
    const double mean_cand = dist_sum[label] / count;
    if (mean_cand < mean_best ||
        (mean_cand == mean_best && class_names[static_cast<std::size_t>(label)] <
                                       class_names[static_cast<std::size_t>(best)])) {
      best = label;
    }
  }
  return best;
}

// Real-valued coverage-weighted mean of the source region of output pixel
// (ox, oy); the implementation's integer result must be a correct rounding of
// this value.
inline double oracle_box_mean(const zipknn::RawImage& gray, int side, int ox, int oy) {
  const double sx = static_cast<double>(gray.width) / side;
  const double sy = static_cast<double>(gray.height) / side;
  const double x0 = ox * sx, x1 = (ox + 1) * sx;
  const double y0 = oy * sy, y1 = (oy + 1) * sy;
  double acc = 0.0, area = 0.0;
  for (int iy = 0; iy < gray.height; ++iy) {
    const double wy = std::min<double>(y1, iy + 1.0) - std::max<double>(y0, iy);
    if (wy <= 0.0) continue;
    for (int ix = 0; ix < gray.width; ++ix) {
      const double wx = std::min<double>(x1, ix + 1.0) - std::max<double>(x0, ix);
      if (wx <= 0.0) continue;
      acc += wx * wy * gray.pixels[static_cast<std::size_t>(iy) * gray.width + ix];
      area += wx * wy;
    }
  }
  return acc / area;
}

}  // namespace testsup
